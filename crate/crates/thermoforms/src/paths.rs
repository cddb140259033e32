//! Parametrized paths in the entropy-volume plane.
//!
//! A path is a piecewise-smooth map `t in [0, 1] -> (S(t), V(t))` carrying
//! its own velocity, so line integrals never have to differentiate the
//! parametrization numerically. Endpoints are handled exactly: the sine-mode
//! constructors are built to return the endpoint values *bitwise* at
//! `t = 0` and `t = 1`, which lets path-independence checks compare runs
//! without endpoint jitter.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;

use crate::calculus::{self, DerivMode, OneForm, TwoForm};
use crate::chart::{Chart, Tolerances};
use crate::eos::{DomainBox, Eos};
use crate::error::{Error, Result};
use crate::quad;

type Curve = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One smooth leg of a path, parametrized over a local `t in [0, 1]`.
#[derive(Clone)]
pub(crate) struct PathPiece {
    pub(crate) s: Curve,
    pub(crate) v: Curve,
    pub(crate) ds: Curve,
    pub(crate) dv: Curve,
}

impl PathPiece {
    pub(crate) fn point(&self, t: f64) -> (f64, f64) {
        ((self.s)(t), (self.v)(t))
    }

    pub(crate) fn velocity(&self, t: f64) -> (f64, f64) {
        ((self.ds)(t), (self.dv)(t))
    }
}

/// `sin(k pi t)`, forced to exact zero at the endpoints so perturbed paths
/// stay pinned bitwise.
fn sin_pi(k: usize, t: f64) -> f64 {
    if t == 0.0 || t == 1.0 {
        0.0
    } else {
        (k as f64 * PI * t).sin()
    }
}

fn cos_pi(k: usize, t: f64) -> f64 {
    (k as f64 * PI * t).cos()
}

/// A piecewise-smooth oriented path. Global parameter `t in [0, 1]` is split
/// uniformly across the pieces.
#[derive(Clone)]
pub struct Path {
    pieces: Vec<PathPiece>,
    closed: bool,
}

impl std::fmt::Debug for Path {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = self.endpoints();
        f.debug_struct("Path")
            .field("pieces", &self.pieces.len())
            .field("closed", &self.closed)
            .field("from", &a)
            .field("to", &b)
            .finish()
    }
}

impl Path {
    pub(crate) fn from_pieces(pieces: Vec<PathPiece>, closed: bool) -> Self {
        assert!(!pieces.is_empty(), "a path needs at least one piece");
        Path { pieces, closed }
    }

    /// Straight segment from `a` to `b`; endpoint values are exact.
    pub fn straight(a: (f64, f64), b: (f64, f64)) -> Self {
        let piece = PathPiece {
            s: Arc::new(move |t| a.0 * (1.0 - t) + b.0 * t),
            v: Arc::new(move |t| a.1 * (1.0 - t) + b.1 * t),
            ds: Arc::new(move |_| b.0 - a.0),
            dv: Arc::new(move |_| b.1 - a.1),
        };
        Path::from_pieces(vec![piece], a == b)
    }

    /// Straight chord from `a` to `b` deflected by sine modes:
    /// `S(t) = lerp + sum_k amp_s[k] sin((k+1) pi t)` and likewise for `V`.
    /// Shares endpoints with [`Path::straight`] bitwise.
    pub fn curved(a: (f64, f64), b: (f64, f64), amps_s: &[f64], amps_v: &[f64]) -> Self {
        let (asv, avv) = (amps_s.to_vec(), amps_v.to_vec());
        let (asd, avd) = (asv.clone(), avv.clone());
        let piece = PathPiece {
            s: Arc::new(move |t| {
                let mut x = a.0 * (1.0 - t) + b.0 * t;
                for (i, amp) in asv.iter().enumerate() {
                    x += amp * sin_pi(i + 1, t);
                }
                x
            }),
            v: Arc::new(move |t| {
                let mut x = a.1 * (1.0 - t) + b.1 * t;
                for (i, amp) in avv.iter().enumerate() {
                    x += amp * sin_pi(i + 1, t);
                }
                x
            }),
            ds: Arc::new(move |t| {
                let mut x = b.0 - a.0;
                for (i, amp) in asd.iter().enumerate() {
                    let k = (i + 1) as f64;
                    x += amp * k * PI * cos_pi(i + 1, t);
                }
                x
            }),
            dv: Arc::new(move |t| {
                let mut x = b.1 - a.1;
                for (i, amp) in avd.iter().enumerate() {
                    let k = (i + 1) as f64;
                    x += amp * k * PI * cos_pi(i + 1, t);
                }
                x
            }),
        };
        Path::from_pieces(vec![piece], false)
    }

    /// The straight segment from `a` to `b` traversed under a smooth monotone
    /// time change `w(t) = t + sum_k c_k sin(k pi t)/(k pi)`. Same image and
    /// endpoints as the plain chord, different map. Requires
    /// `sum |c_k| <= 0.8` so that `w' >= 0.2 > 0`.
    pub fn straight_reparametrized(a: (f64, f64), b: (f64, f64), coeffs: &[f64]) -> Result<Self> {
        let budget: f64 = coeffs.iter().map(|c| c.abs()).sum();
        if budget.is_nan() || budget > 0.8 {
            return Err(Error::Config(format!(
                "reparametrization coefficients too large: sum |c_k| = {budget} > 0.8"
            )));
        }
        let cw = coeffs.to_vec();
        let cd = cw.clone();
        let w = move |t: f64| -> f64 {
            if t == 0.0 || t == 1.0 {
                return t; // keep endpoints exact
            }
            let mut x = t;
            for (i, c) in cw.iter().enumerate() {
                let k = (i + 1) as f64;
                x += c * sin_pi(i + 1, t) / (k * PI);
            }
            x
        };
        let dw = move |t: f64| -> f64 {
            let mut x = 1.0;
            for (i, c) in cd.iter().enumerate() {
                x += c * cos_pi(i + 1, t);
            }
            x
        };
        let (w1, w2) = (w.clone(), w);
        let (dw1, dw2) = (dw.clone(), dw);
        let piece = PathPiece {
            s: Arc::new(move |t| {
                let u = w1(t);
                a.0 * (1.0 - u) + b.0 * u
            }),
            v: Arc::new(move |t| {
                let u = w2(t);
                a.1 * (1.0 - u) + b.1 * u
            }),
            ds: Arc::new(move |t| (b.0 - a.0) * dw1(t)),
            dv: Arc::new(move |t| (b.1 - a.1) * dw2(t)),
        };
        Ok(Path::from_pieces(vec![piece], false))
    }

    /// Counter-clockwise boundary of an axis-aligned box, starting and ending
    /// at `(s_lo, v_lo)`. Closed by construction.
    pub fn rectangle(rect: &DomainBox) -> Self {
        let [s0, s1] = rect.s;
        let [v0, v1] = rect.v;
        let legs = [
            Path::straight((s0, v0), (s1, v0)),
            Path::straight((s1, v0), (s1, v1)),
            Path::straight((s1, v1), (s0, v1)),
            Path::straight((s0, v1), (s0, v0)),
        ];
        let pieces = legs.into_iter().flat_map(|p| p.pieces).collect();
        Path::from_pieces(pieces, true)
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub(crate) fn pieces(&self) -> &[PathPiece] {
        &self.pieces
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Start and end points (equal for closed paths).
    pub fn endpoints(&self) -> ((f64, f64), (f64, f64)) {
        let first = self.pieces.first().unwrap().point(0.0);
        let last = self.pieces.last().unwrap().point(1.0);
        (first, last)
    }

    /// Maps a global parameter to (piece index, local parameter). The global
    /// endpoints hit the local endpoints exactly.
    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.pieces.len();
        if t <= 0.0 {
            return (0, 0.0);
        }
        if t >= 1.0 {
            return (n - 1, 1.0);
        }
        let u = t * n as f64;
        let i = (u.floor() as usize).min(n - 1);
        (i, u - i as f64)
    }

    pub fn point(&self, t: f64) -> (f64, f64) {
        let (i, local) = self.locate(t);
        self.pieces[i].point(local)
    }

    /// Velocity with respect to the *global* parameter (piece velocity times
    /// the number of pieces).
    pub fn velocity(&self, t: f64) -> (f64, f64) {
        let (i, local) = self.locate(t);
        let (ds, dv) = self.pieces[i].velocity(local);
        let n = self.pieces.len() as f64;
        (ds * n, dv * n)
    }

    /// `n` points at uniform global parameters, endpoints included.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64)> {
        assert!(n >= 2, "need at least the two endpoints");
        (0..n).map(|j| self.point(j as f64 / (n - 1) as f64)).collect()
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| {
                let (s, v, ds, dv) = (p.s.clone(), p.v.clone(), p.ds.clone(), p.dv.clone());
                PathPiece {
                    s: Arc::new(move |t| s(1.0 - t)),
                    v: Arc::new(move |t| v(1.0 - t)),
                    ds: Arc::new(move |t| -ds(1.0 - t)),
                    dv: Arc::new(move |t| -dv(1.0 - t)),
                }
            })
            .collect();
        Path { pieces, closed: self.closed }
    }

    /// Concatenation; the pieces must chain head-to-tail (within roundoff of
    /// the coordinate scale).
    pub fn then(&self, next: &Path) -> Result<Self> {
        let (_, end) = self.endpoints();
        let (start, _) = next.endpoints();
        let scale = end.0.abs().max(end.1.abs()).max(1.0);
        if (end.0 - start.0).abs() > 1e-9 * scale || (end.1 - start.1).abs() > 1e-9 * scale {
            return Err(Error::NonClosingChain {
                what: format!("segment ends at ({}, {}) but next starts at ({}, {})",
                    end.0, end.1, start.0, start.1),
            });
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(next.pieces.iter().cloned());
        Ok(Path::from_pieces(pieces, false))
    }

    /// Marks the path closed, verifying that the ends actually meet.
    pub fn close(mut self) -> Result<Self> {
        let ((s0, v0), (s1, v1)) = self.endpoints();
        let scale = s0.abs().max(v0.abs()).max(1.0);
        let (gap_s, gap_v) = (s1 - s0, v1 - v0);
        if gap_s.abs() > 1e-9 * scale || gap_v.abs() > 1e-9 * scale {
            return Err(Error::NotClosed { gap_s, gap_v });
        }
        self.closed = true;
        Ok(self)
    }

    /// Largest pointwise distance to another path at `n` shared parameters;
    /// used to report how far a perturbed path strays from its base.
    pub fn max_deflection(&self, other: &Path, n: usize) -> f64 {
        (0..n)
            .map(|j| {
                let t = j as f64 / (n - 1) as f64;
                let (s1, v1) = self.point(t);
                let (s2, v2) = other.point(t);
                ((s1 - s2).powi(2) + (v1 - v2).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// True if `n` uniform samples all lie in `boxx`.
    pub fn stays_in(&self, boxx: &DomainBox, n: usize) -> bool {
        self.sample(n).iter().all(|&(s, v)| boxx.contains(s, v))
    }
}

/// Draws `count` random sine-deflected paths from `a` to `b`, each verified
/// to stay inside `boxx` at 201 sample points. `amplitude` scales the
/// deflection relative to the box spans. Endpoints are pinned bitwise.
pub fn generate_paths<R: Rng>(
    rng: &mut R,
    boxx: &DomainBox,
    a: (f64, f64),
    b: (f64, f64),
    count: usize,
    amplitude: f64,
) -> Result<Vec<Path>> {
    const MODES: usize = 5;
    const TRIES_PER_PATH: usize = 64;
    let amp_s = amplitude * boxx.s_span();
    let amp_v = amplitude * boxx.v_span();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > TRIES_PER_PATH * count.max(1) {
            return Err(Error::PathGeneration { attempts });
        }
        let amps_s: Vec<f64> = (0..MODES).map(|_| rng.gen_range(-amp_s..=amp_s)).collect();
        let amps_v: Vec<f64> = (0..MODES).map(|_| rng.gen_range(-amp_v..=amp_v)).collect();
        let path = Path::curved(a, b, &amps_s, &amps_v);
        if path.stays_in(boxx, 201) {
            out.push(path);
        }
    }
    Ok(out)
}

/// Pushes an entropy-volume tangent vector through the chart map: the rate
/// of change of the chart coordinates along a path with velocity `(ds, dv)`.
fn chart_tangent(model: &dyn Eos, chart: Chart, s: f64, v: f64, ds: f64, dv: f64) -> (f64, f64) {
    match chart {
        Chart::SV => (ds, dv),
        _ => {
            let (q1, q2) = calculus::chart_quantities(chart);
            let g1 = q1.grad(model, s, v, DerivMode::Analytic);
            let g2 = q2.grad(model, s, v, DerivMode::Analytic);
            (g1.0 * ds + g1.1 * dv, g2.0 * ds + g2.1 * dv)
        }
    }
}

/// Line integral of a 1-form along a path, by adaptive quadrature piece by
/// piece. The form's chart may differ from the fundamental one; the chart
/// coordinates are then differentiated along the path analytically.
///
/// The path is pre-scanned for domain violations, and any non-finite sample
/// during integration is reported as [`Error::DomainExit`] with the offending
/// global parameter.
pub fn line_integral(form: &OneForm, path: &Path, tol: &Tolerances) -> Result<f64> {
    let model = form.model().clone();
    let pieces = path.pieces();
    let n = pieces.len();
    // Cheap detection first: a path that leaves the hard domain produces a
    // much better error message here than a NaN inside the quadrature.
    for (i, piece) in pieces.iter().enumerate() {
        for j in 0..=64 {
            let t = j as f64 / 64.0;
            let (s, v) = piece.point(t);
            if !model.in_hard_domain(s, v) {
                return Err(Error::DomainExit { t: (i as f64 + t) / n as f64 });
            }
        }
    }

    let piece_tol = tol.quad_abs / n as f64;
    let mut total = 0.0;
    for (i, piece) in pieces.iter().enumerate() {
        let bad_t: Cell<Option<f64>> = Cell::new(None);
        let integrand = |t: f64| -> f64 {
            let (s, v) = piece.point(t);
            let (ds, dv) = piece.velocity(t);
            if !model.in_hard_domain(s, v) {
                bad_t.set(Some(t));
                return f64::NAN;
            }
            let (f1, f2) = form.components(s, v);
            let (dc1, dc2) = chart_tangent(model.as_ref(), form.chart(), s, v, ds, dv);
            let val = f1 * dc1 + f2 * dc2;
            if !val.is_finite() {
                bad_t.set(Some(t));
                return f64::NAN;
            }
            val
        };
        match quad::adaptive(&integrand, 0.0, 1.0, piece_tol) {
            Ok(x) => total += x,
            Err(e) => {
                return Err(match bad_t.get() {
                    Some(t) => Error::DomainExit { t: (i as f64 + t) / n as f64 },
                    None => e,
                })
            }
        }
    }
    Ok(total)
}

/// Loop integral: a line integral that insists the path is closed.
pub fn loop_integral(form: &OneForm, path: &Path, tol: &Tolerances) -> Result<f64> {
    if !path.is_closed() {
        let ((s0, v0), (s1, v1)) = path.endpoints();
        return Err(Error::NotClosed { gap_s: s1 - s0, gap_v: v1 - v0 });
    }
    line_integral(form, path, tol)
}

/// An integration region in the entropy-volume plane: either an axis-aligned
/// rectangle (the canonical case, integrated by tensor-product quadrature) or
/// a simple counter-clockwise loop (integrated by reduction to its boundary).
#[derive(Debug, Clone)]
pub enum Region {
    Rectangle(DomainBox),
    Boundary(Path),
}

impl Region {
    /// The boundary as an oriented closed path (counter-clockwise for
    /// rectangles).
    pub fn boundary(&self) -> Path {
        match self {
            Region::Rectangle(rect) => Path::rectangle(rect),
            Region::Boundary(path) => path.clone(),
        }
    }
}

/// Integral of a 2-form (fundamental chart only) over a region.
///
/// Rectangles use tensor-product adaptive quadrature. A `Boundary` region is
/// handled by writing the coefficient as `dF/dS` with
/// `F(s, v) = integral of coeff from a reference entropy`, which turns the
/// area integral into the loop integral of `F dV` — Green's theorem used
/// constructively, so the rectangle and boundary answers are computed by
/// genuinely different means.
pub fn region_integral(w: &TwoForm, region: &Region, tol: &Tolerances) -> Result<f64> {
    if w.chart() != Chart::SV {
        return Err(Error::ChartMismatch { expected: "SV", got: w.chart().name() });
    }
    match region {
        Region::Rectangle(rect) => {
            rect.validate()?;
            let inner_tol = tol.quad_abs / (10.0 * rect.s_span().max(1.0));
            let outer_tol = 0.5 * tol.quad_abs;
            let inner_err: RefCell<Option<Error>> = RefCell::new(None);
            let outer = |s: f64| -> f64 {
                let slice = |v: f64| w.coeff_at(s, v);
                match quad::adaptive(&slice, rect.v[0], rect.v[1], inner_tol) {
                    Ok(x) => x,
                    Err(e) => {
                        inner_err.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                }
            };
            match quad::adaptive(&outer, rect.s[0], rect.s[1], outer_tol) {
                Ok(x) => Ok(x),
                Err(e) => Err(inner_err.borrow_mut().take().unwrap_or(e)),
            }
        }
        Region::Boundary(path) => {
            if !path.is_closed() {
                let ((s0, v0), (s1, v1)) = path.endpoints();
                return Err(Error::NotClosed { gap_s: s1 - s0, gap_v: v1 - v0 });
            }
            let area = shoelace_area(path, tol)?;
            if area <= 0.0 {
                return Err(Error::NotCounterClockwise { area });
            }
            let s_ref = path
                .sample(201)
                .iter()
                .map(|&(s, _)| s)
                .fold(f64::INFINITY, f64::min);
            let inner_tol = 0.01 * tol.quad_abs;
            let inner_err: RefCell<Option<Error>> = RefCell::new(None);
            let primitive = |s: f64, v: f64| -> f64 {
                let slice = |sigma: f64| w.coeff_at(sigma, v);
                match quad::adaptive(&slice, s_ref, s, inner_tol) {
                    Ok(x) => x,
                    Err(e) => {
                        inner_err.borrow_mut().get_or_insert(e);
                        f64::NAN
                    }
                }
            };
            let pieces = path.pieces();
            let piece_tol = 0.5 * tol.quad_abs / pieces.len() as f64;
            let mut total = 0.0;
            for piece in pieces {
                let integrand = |t: f64| -> f64 {
                    let (s, v) = piece.point(t);
                    let (_, dv) = piece.velocity(t);
                    primitive(s, v) * dv
                };
                match quad::adaptive(&integrand, 0.0, 1.0, piece_tol) {
                    Ok(x) => total += x,
                    Err(e) => return Err(inner_err.borrow_mut().take().unwrap_or(e)),
                }
            }
            Ok(total)
        }
    }
}

/// Signed area enclosed by a closed path (shoelace as the loop integral of
/// `S dV`): positive for counter-clockwise traversal.
fn shoelace_area(path: &Path, tol: &Tolerances) -> Result<f64> {
    let mut area = 0.0;
    let piece_tol = tol.quad_abs.max(1e-12) / path.pieces().len() as f64;
    for piece in path.pieces() {
        let f = |t: f64| piece.point(t).0 * piece.velocity(t).1;
        area += quad::adaptive(&f, 0.0, 1.0, piece_tol)?;
    }
    Ok(area)
}
