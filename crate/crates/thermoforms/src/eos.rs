//! Equation-of-state models and coordinate inversion.
//!
//! A model is defined by a single fundamental relation `U(S, V)` on the
//! entropy-volume chart; temperature and pressure are its first derivatives,
//! `T = dU/dS` and `P = -dU/dV`. Every model provides those derivatives three
//! ways so they can check each other:
//!
//! * hand-written closed forms (`temperature`, `pressure`, `*_grad`),
//! * automatic differentiation of the same expressions (`*_jet`),
//! * and, externally, central differences (see [`crate::calculus`]).
//!
//! All other charts (`TV`, `TP`, `SP`) are reached by safeguarded Newton
//! inversion of the state equations, bracketed against the declared domain
//! box. The box is a promise by the caller that the model is single-phase
//! there: `T > 0`, `P > 0`, and the `(S,V) -> (T,P)` change of coordinates
//! stays invertible.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chart::{Chart, StatePoint, Tolerances};
use crate::dual::{Dual2, Scalar};
use crate::error::{Error, Result};

/// Shared handle to a model. Forms, paths and reports capture models by
/// cloning one of these.
pub type EosRef = Arc<dyn Eos>;

/// Fraction of each box span used as search margin by inversion brackets and
/// finite-difference stencils near the box edge.
pub(crate) const BOX_PAD: f64 = 0.05;

/// An axis-aligned working region in the entropy-volume chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainBox {
    /// Inclusive entropy range `[lo, hi]`.
    pub s: [f64; 2],
    /// Inclusive volume range `[lo, hi]`; the lower edge must be positive.
    pub v: [f64; 2],
}

impl DomainBox {
    pub fn new(s_lo: f64, s_hi: f64, v_lo: f64, v_hi: f64) -> Result<Self> {
        let b = DomainBox { s: [s_lo, s_hi], v: [v_lo, v_hi] };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.s.iter().chain(self.v.iter()).all(|x| x.is_finite())
            && self.s[0] < self.s[1]
            && self.v[0] < self.v[1]
            && self.v[0] > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "invalid domain box: S in [{}, {}], V in [{}, {}]",
                self.s[0], self.s[1], self.v[0], self.v[1]
            )))
        }
    }

    pub fn contains(&self, s: f64, v: f64) -> bool {
        s >= self.s[0] && s <= self.s[1] && v >= self.v[0] && v <= self.v[1]
    }

    pub fn s_span(&self) -> f64 {
        self.s[1] - self.s[0]
    }

    pub fn v_span(&self) -> f64 {
        self.v[1] - self.v[0]
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.s[0] + self.s[1]), 0.5 * (self.v[0] + self.v[1]))
    }

    /// The box grown by `frac` of each span, with the volume edge clipped so
    /// it never crosses the model's hard floor `v_floor`.
    pub(crate) fn padded(&self, frac: f64, v_floor: f64) -> DomainBox {
        let ds = frac * self.s_span();
        let dv = frac * self.v_span();
        let guard = v_floor + 0.05 * (self.v[0] - v_floor).max(0.0);
        DomainBox {
            s: [self.s[0] - ds, self.s[1] + ds],
            v: [(self.v[0] - dv).max(guard), self.v[1] + dv],
        }
    }

    /// Uniform grid including the box edges; a single sample sits mid-span.
    pub fn grid(&self, ns: usize, nv: usize) -> Vec<(f64, f64)> {
        let lerp = |range: [f64; 2], i: usize, n: usize| -> f64 {
            if n <= 1 {
                0.5 * (range[0] + range[1])
            } else {
                range[0] + (range[1] - range[0]) * (i as f64) / ((n - 1) as f64)
            }
        };
        let mut pts = Vec::with_capacity(ns * nv);
        for i in 0..ns.max(1) {
            for j in 0..nv.max(1) {
                pts.push((lerp(self.s, i, ns), lerp(self.v, j, nv)));
            }
        }
        pts
    }

    /// Uniform random point in the box.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> (f64, f64) {
        let s = self.s[0] + rng.gen::<f64>() * self.s_span();
        let v = self.v[0] + rng.gen::<f64>() * self.v_span();
        (s, v)
    }
}

/// A thermodynamic model given by its fundamental relation `U(S, V)`.
///
/// `temperature`/`pressure` and their gradients are the model's *claimed*
/// state equations. For a consistent model they coincide with the derivatives
/// of `energy`; the negative-control wrapper [`CorruptedPressure`] breaks that
/// on purpose, which is what the closure and Maxwell checks are built to
/// detect.
pub trait Eos: Send + Sync {
    fn name(&self) -> &str;

    /// Model parameters in a fixed order, for reports.
    fn parameters(&self) -> Vec<(&'static str, f64)>;

    /// Declared working region (single-phase promise).
    fn domain(&self) -> DomainBox;

    /// Volumes at or below this value are outside the model's formulas
    /// (`0` for an ideal gas, the excluded volume `b` for van der Waals).
    fn hard_v_floor(&self) -> f64 {
        0.0
    }

    /// Whether the formulas themselves are defined at `(s, v)`; weaker than
    /// membership in the domain box.
    fn in_hard_domain(&self, s: f64, v: f64) -> bool {
        s.is_finite() && v.is_finite() && v > self.hard_v_floor()
    }

    fn energy(&self, s: f64, v: f64) -> f64;
    fn temperature(&self, s: f64, v: f64) -> f64;
    fn pressure(&self, s: f64, v: f64) -> f64;

    /// `(dT/dS, dT/dV)` at constant other coordinate, closed form.
    fn temperature_grad(&self, s: f64, v: f64) -> (f64, f64);

    /// `(dP/dS, dP/dV)` at constant other coordinate, closed form.
    fn pressure_grad(&self, s: f64, v: f64) -> (f64, f64);

    /// `U` with gradient and Hessian attached, by forward-mode AD.
    fn energy_jet(&self, s: f64, v: f64) -> Dual2;

    /// `T` with its gradient attached, by forward-mode AD.
    fn temperature_jet(&self, s: f64, v: f64) -> Dual2;

    /// `P` (as claimed by the model) with its gradient attached.
    fn pressure_jet(&self, s: f64, v: f64) -> Dual2;

    fn has_analytic_derivatives(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Ideal gas
// ---------------------------------------------------------------------------

/// Monatomic ideal gas in reduced units, normalized so that
/// `U(0, 1) = 1`: `U(S, V) = V^(-2/3) exp(2S/3)`, hence `T = 2U/3`,
/// `P = 2U/(3V)` and `P V = T`.
#[derive(Debug, Clone)]
pub struct IdealGas {
    domain: DomainBox,
}

fn ideal_u<T: Scalar>(s: T, v: T) -> T {
    v.powf(-2.0 / 3.0) * (s * (2.0 / 3.0)).exp()
}

fn ideal_t<T: Scalar>(s: T, v: T) -> T {
    ideal_u(s, v) * (2.0 / 3.0)
}

fn ideal_p<T: Scalar>(s: T, v: T) -> T {
    v.powf(-5.0 / 3.0) * (s * (2.0 / 3.0)).exp() * (2.0 / 3.0)
}

impl IdealGas {
    pub fn new() -> Self {
        IdealGas { domain: DomainBox::new(-2.0, 3.0, 0.25, 8.0).unwrap() }
    }

    pub fn with_domain(domain: DomainBox) -> Result<Self> {
        domain.validate()?;
        Ok(IdealGas { domain })
    }

    /// Closed-form entropy on the temperature-volume chart,
    /// `S = (3/2) ln(3T/2) + ln V`; used as an inversion oracle in tests.
    pub fn entropy_tv(t: f64, v: f64) -> f64 {
        1.5 * (1.5 * t).ln() + v.ln()
    }
}

impl Default for IdealGas {
    fn default() -> Self {
        IdealGas::new()
    }
}

impl Eos for IdealGas {
    fn name(&self) -> &str {
        "ideal_gas"
    }

    fn parameters(&self) -> Vec<(&'static str, f64)> {
        Vec::new()
    }

    fn domain(&self) -> DomainBox {
        self.domain
    }

    fn energy(&self, s: f64, v: f64) -> f64 {
        ideal_u(s, v)
    }

    fn temperature(&self, s: f64, v: f64) -> f64 {
        ideal_t(s, v)
    }

    fn pressure(&self, s: f64, v: f64) -> f64 {
        ideal_p(s, v)
    }

    fn temperature_grad(&self, s: f64, v: f64) -> (f64, f64) {
        let u = ideal_u(s, v);
        let cross = 4.0 / 9.0 * u / v; // d2U/dSdV magnitude
        (4.0 / 9.0 * u, -cross)
    }

    fn pressure_grad(&self, s: f64, v: f64) -> (f64, f64) {
        let u = ideal_u(s, v);
        let cross = 4.0 / 9.0 * u / v;
        (cross, -10.0 / 9.0 * u / (v * v))
    }

    fn energy_jet(&self, s: f64, v: f64) -> Dual2 {
        ideal_u(Dual2::var1(s), Dual2::var2(v))
    }

    fn temperature_jet(&self, s: f64, v: f64) -> Dual2 {
        ideal_t(Dual2::var1(s), Dual2::var2(v))
    }

    fn pressure_jet(&self, s: f64, v: f64) -> Dual2 {
        ideal_p(Dual2::var1(s), Dual2::var2(v))
    }
}

// ---------------------------------------------------------------------------
// Van der Waals
// ---------------------------------------------------------------------------

/// Van der Waals fluid with attraction `a >= 0` and excluded volume `b >= 0`:
/// `T = (2/3) (V-b)^(-2/3) exp(2S/3)`, `U = (3/2) T - a/V`,
/// `P = T/(V-b) - a/V^2`. Setting `a = b = 0` recovers [`IdealGas`] exactly.
///
/// The declared box must stay inside the single-phase region (monotone
/// isotherms); that is the caller's responsibility when overriding the
/// default.
#[derive(Debug, Clone)]
pub struct VanDerWaals {
    a: f64,
    b: f64,
    domain: DomainBox,
}

impl VanDerWaals {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
            return Err(Error::Config(format!(
                "van der Waals parameters must be finite and non-negative: a = {a}, b = {b}"
            )));
        }
        let domain = DomainBox::new(-2.0, 3.0, b + 0.25, b + 8.0)?;
        Ok(VanDerWaals { a, b, domain })
    }

    pub fn with_domain(a: f64, b: f64, domain: DomainBox) -> Result<Self> {
        let mut model = VanDerWaals::new(a, b)?;
        domain.validate()?;
        if domain.v[0] <= b {
            return Err(Error::Config(format!(
                "domain volume floor {} must exceed the excluded volume b = {}",
                domain.v[0], b
            )));
        }
        model.domain = domain;
        Ok(model)
    }

    fn repulsive<T: Scalar>(&self, s: T, v: T) -> T {
        (v - self.b).powf(-2.0 / 3.0) * (s * (2.0 / 3.0)).exp()
    }

    fn u_gen<T: Scalar>(&self, s: T, v: T) -> T {
        self.repulsive(s, v) - v.recip() * self.a
    }

    fn t_gen<T: Scalar>(&self, s: T, v: T) -> T {
        self.repulsive(s, v) * (2.0 / 3.0)
    }

    fn p_gen<T: Scalar>(&self, s: T, v: T) -> T {
        (v - self.b).powf(-5.0 / 3.0) * (s * (2.0 / 3.0)).exp() * (2.0 / 3.0)
            - (v * v).recip() * self.a
    }
}

impl Eos for VanDerWaals {
    fn name(&self) -> &str {
        "van_der_waals"
    }

    fn parameters(&self) -> Vec<(&'static str, f64)> {
        vec![("a", self.a), ("b", self.b)]
    }

    fn domain(&self) -> DomainBox {
        self.domain
    }

    fn hard_v_floor(&self) -> f64 {
        self.b
    }

    fn energy(&self, s: f64, v: f64) -> f64 {
        self.u_gen(s, v)
    }

    fn temperature(&self, s: f64, v: f64) -> f64 {
        self.t_gen(s, v)
    }

    fn pressure(&self, s: f64, v: f64) -> f64 {
        self.p_gen(s, v)
    }

    fn temperature_grad(&self, s: f64, v: f64) -> (f64, f64) {
        let rep = self.repulsive(s, v);
        let cross = 4.0 / 9.0 * rep / (v - self.b); // d2U/dSdV magnitude
        (4.0 / 9.0 * rep, -cross)
    }

    fn pressure_grad(&self, s: f64, v: f64) -> (f64, f64) {
        let rep = self.repulsive(s, v);
        let vb = v - self.b;
        let cross = 4.0 / 9.0 * rep / vb;
        (cross, -10.0 / 9.0 * rep / (vb * vb) + 2.0 * self.a / (v * v * v))
    }

    fn energy_jet(&self, s: f64, v: f64) -> Dual2 {
        self.u_gen(Dual2::var1(s), Dual2::var2(v))
    }

    fn temperature_jet(&self, s: f64, v: f64) -> Dual2 {
        self.t_gen(Dual2::var1(s), Dual2::var2(v))
    }

    fn pressure_jet(&self, s: f64, v: f64) -> Dual2 {
        self.p_gen(Dual2::var1(s), Dual2::var2(v))
    }
}

// ---------------------------------------------------------------------------
// Negative control
// ---------------------------------------------------------------------------

/// Wrapper that reports `P + S` instead of `P` while leaving `U` and `T`
/// untouched. The claimed state equations then do not derive from any
/// potential, so every integrability check (closure, Maxwell, exact
/// variations) must flag it with a residual of order one. Used to prove the
/// verification suite is not vacuous.
pub struct CorruptedPressure {
    inner: EosRef,
    name: String,
}

impl CorruptedPressure {
    pub fn new(inner: EosRef) -> Self {
        let name = format!("{}+pressure_corrupted", inner.name());
        CorruptedPressure { inner, name }
    }
}

impl Eos for CorruptedPressure {
    fn name(&self) -> &str {
        &self.name
    }

    fn parameters(&self) -> Vec<(&'static str, f64)> {
        self.inner.parameters()
    }

    fn domain(&self) -> DomainBox {
        self.inner.domain()
    }

    fn hard_v_floor(&self) -> f64 {
        self.inner.hard_v_floor()
    }

    fn energy(&self, s: f64, v: f64) -> f64 {
        self.inner.energy(s, v)
    }

    fn temperature(&self, s: f64, v: f64) -> f64 {
        self.inner.temperature(s, v)
    }

    fn pressure(&self, s: f64, v: f64) -> f64 {
        self.inner.pressure(s, v) + s
    }

    fn temperature_grad(&self, s: f64, v: f64) -> (f64, f64) {
        self.inner.temperature_grad(s, v)
    }

    fn pressure_grad(&self, s: f64, v: f64) -> (f64, f64) {
        let (ps, pv) = self.inner.pressure_grad(s, v);
        (ps + 1.0, pv)
    }

    fn energy_jet(&self, s: f64, v: f64) -> Dual2 {
        self.inner.energy_jet(s, v)
    }

    fn temperature_jet(&self, s: f64, v: f64) -> Dual2 {
        self.inner.temperature_jet(s, v)
    }

    fn pressure_jet(&self, s: f64, v: f64) -> Dual2 {
        self.inner.pressure_jet(s, v) + Dual2::var1(s)
    }
}

// ---------------------------------------------------------------------------
// Evaluation and inversion
// ---------------------------------------------------------------------------

/// Evaluates `(U, T, P)` at a point on the entropy-volume chart, enforcing
/// the domain box and the single-phase expectations `T > 0`, `P > 0`.
pub fn evaluate(model: &dyn Eos, pt: &StatePoint) -> Result<(f64, f64, f64)> {
    if pt.chart() != Chart::SV {
        return Err(Error::ChartMismatch { expected: "SV", got: pt.chart().name() });
    }
    let (s, v) = pt.coords();
    if !model.in_hard_domain(s, v) {
        return Err(Error::OutOfDomain {
            s,
            v,
            reason: "outside the model's formulas (volume at or below the hard floor)".into(),
        });
    }
    if !model.domain().contains(s, v) {
        return Err(Error::OutOfDomain { s, v, reason: "outside the declared domain box".into() });
    }
    let u = model.energy(s, v);
    let t = model.temperature(s, v);
    let p = model.pressure(s, v);
    if !(u.is_finite() && t.is_finite() && p.is_finite() && t > 0.0 && p > 0.0) {
        return Err(Error::OutOfDomain {
            s,
            v,
            reason: format!("left the single-phase region (U={u}, T={t}, P={p})"),
        });
    }
    Ok((u, t, p))
}

/// Forward coordinate map: the chart coordinates of the state `(s, v)`.
pub fn chart_values(model: &dyn Eos, chart: Chart, s: f64, v: f64) -> (f64, f64) {
    match chart {
        Chart::SV => (s, v),
        Chart::TV => (model.temperature(s, v), v),
        Chart::TP => (model.temperature(s, v), model.pressure(s, v)),
        Chart::SP => (s, model.pressure(s, v)),
    }
}

/// Safeguarded Newton on a bracketing interval: Newton steps that stay inside
/// the current bracket, bisection otherwise. `f` must change sign on
/// `[lo, hi]`.
pub(crate) fn solve_bracketed(
    what: &str,
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NonBracketed { what: what.to_string(), lo, hi });
    }

    let mut x = 0.5 * (a + b);
    for _ in 0..tol.max_newton_iter {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        // Maintain the bracket.
        if fx.is_finite() && fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else if fx.is_finite() {
            b = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        let x_new = if fx.is_finite() && d != 0.0 && newton > a.min(b) && newton < a.max(b) {
            newton
        } else {
            0.5 * (a + b)
        };
        if (x_new - x).abs() <= tol.newton_tol * x_new.abs().max(1.0) {
            // Converged by step size; two plain Newton polish steps push the
            // root to machine precision so downstream finite differences see
            // no solver noise.
            let mut out = x_new;
            for _ in 0..2 {
                let fo = f(out);
                let dfo = df(out);
                if fo.is_finite() && dfo != 0.0 {
                    let next = out - fo / dfo;
                    if next.is_finite() && next >= lo && next <= hi {
                        out = next;
                    }
                }
            }
            return Ok(out);
        }
        x = x_new;
    }
    Err(Error::NoConvergence { what: what.to_string(), iters: tol.max_newton_iter })
}

/// Unbracketed local Newton used when an excellent initial guess exists
/// (warm restarts from finite-difference stencils). Returns `None` on any
/// sign of trouble so the caller can fall back to the bracketed solver.
fn newton_local(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    x0: f64,
    lo: f64,
    hi: f64,
    tol: &Tolerances,
) -> Option<f64> {
    let mut x = x0.clamp(lo, hi);
    for _ in 0..tol.max_newton_iter {
        let fx = f(x);
        let d = df(x);
        if !fx.is_finite() || !d.is_finite() || d == 0.0 {
            return None;
        }
        let next = (x - fx / d).clamp(lo, hi);
        if (next - x).abs() <= tol.newton_tol * next.abs().max(1.0) {
            let mut out = next;
            for _ in 0..2 {
                let fo = f(out);
                let dfo = df(out);
                if fo.is_finite() && dfo != 0.0 {
                    let cand = out - fo / dfo;
                    if cand.is_finite() && cand >= lo && cand <= hi {
                        out = cand;
                    }
                }
            }
            return Some(out);
        }
        x = next;
    }
    None
}

fn solve_s_for_t(model: &dyn Eos, t: f64, v: f64, pad: &DomainBox, tol: &Tolerances) -> Result<f64> {
    solve_bracketed(
        &format!("S from T(S, V={v}) = {t}"),
        &|s| model.temperature(s, v) - t,
        &|s| model.temperature_grad(s, v).0,
        pad.s[0],
        pad.s[1],
        tol,
    )
}

fn solve_v_for_p(model: &dyn Eos, p: f64, s: f64, pad: &DomainBox, tol: &Tolerances) -> Result<f64> {
    solve_bracketed(
        &format!("V from P(S={s}, V) = {p}"),
        &|v| model.pressure(s, v) - p,
        &|v| model.pressure_grad(s, v).1,
        pad.v[0],
        pad.v[1],
        tol,
    )
}

fn solve_v_for_t(model: &dyn Eos, t: f64, s: f64, pad: &DomainBox, tol: &Tolerances) -> Result<f64> {
    solve_bracketed(
        &format!("V from T(S={s}, V) = {t}"),
        &|v| model.temperature(s, v) - t,
        &|v| model.temperature_grad(s, v).1,
        pad.v[0],
        pad.v[1],
        tol,
    )
}

/// Volume on the adiabat `S = s` where the pressure equals `p`.
pub(crate) fn solve_volume_for_pressure(
    model: &dyn Eos,
    p: f64,
    s: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let pad = model.domain().padded(BOX_PAD, model.hard_v_floor());
    solve_v_for_p(model, p, s, &pad, tol)
}

/// Volume on the adiabat `S = s` where the temperature equals `t`.
pub(crate) fn solve_volume_for_temperature(
    model: &dyn Eos,
    t: f64,
    s: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let pad = model.domain().padded(BOX_PAD, model.hard_v_floor());
    solve_v_for_t(model, t, s, &pad, tol)
}

/// Damped 2D Newton for the `(T, P)` chart starting from `guess`; `None`
/// signals the caller to fall back to the scanning solver.
fn invert_tp_from(
    model: &dyn Eos,
    t0: f64,
    p0: f64,
    guess: (f64, f64),
    pad: &DomainBox,
    tol: &Tolerances,
) -> Option<(f64, f64)> {
    let (mut s, mut v) = guess;
    for _ in 0..tol.max_newton_iter {
        let ft = model.temperature(s, v) - t0;
        let fp = model.pressure(s, v) - p0;
        let (ts, tv) = model.temperature_grad(s, v);
        let (ps, pv) = model.pressure_grad(s, v);
        let det = ts * pv - tv * ps;
        if !(ft.is_finite() && fp.is_finite()) || det == 0.0 {
            return None;
        }
        let mut ds = -(ft * pv - tv * fp) / det;
        let mut dv = -(ts * fp - ft * ps) / det;
        // Damp steps that would leave the padded box.
        let mut halvings = 0;
        while !pad.contains(s + ds, v + dv) {
            ds *= 0.5;
            dv *= 0.5;
            halvings += 1;
            if halvings > 24 {
                return None;
            }
        }
        s += ds;
        v += dv;
        if ds.abs() <= tol.newton_tol * s.abs().max(1.0)
            && dv.abs() <= tol.newton_tol * v.abs().max(1.0)
        {
            return Some((s, v));
        }
    }
    None
}

/// Cold-start `(T, P)` inversion: scan volumes across the padded box, solve
/// the isotherm entropy where possible, and bracket the pressure mismatch.
fn invert_tp_cold(
    model: &dyn Eos,
    t0: f64,
    p0: f64,
    pad: &DomainBox,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    const SCAN: usize = 33;
    let mut prev: Option<(f64, f64)> = None; // (v, g(v))
    let mut bracket: Option<((f64, f64), (f64, f64))> = None;
    for i in 0..SCAN {
        let v = pad.v[0] + pad.v_span() * (i as f64) / ((SCAN - 1) as f64);
        let g = match solve_s_for_t(model, t0, v, pad, tol) {
            Ok(s) => model.pressure(s, v) - p0,
            Err(_) => {
                prev = None;
                continue;
            }
        };
        if let Some((_, g_prev)) = prev {
            if g_prev.signum() != g.signum() || g == 0.0 {
                bracket = Some((prev.unwrap(), (v, g)));
                break;
            }
        }
        prev = Some((v, g));
    }
    let ((v_lo, _), (v_hi, _)) = bracket.ok_or_else(|| Error::NonBracketed {
        what: format!("V from (T, P) = ({t0}, {p0})"),
        lo: pad.v[0],
        hi: pad.v[1],
    })?;

    // Within the refined bracket the isotherm solve succeeds at both ends;
    // continuity keeps it solvable in between for monotone models.
    let g = |v: f64| -> f64 {
        match solve_s_for_t(model, t0, v, pad, tol) {
            Ok(s) => model.pressure(s, v) - p0,
            Err(_) => f64::NAN,
        }
    };
    let dg = |v: f64| -> f64 {
        match solve_s_for_t(model, t0, v, pad, tol) {
            Ok(s) => {
                let (ts, tv) = model.temperature_grad(s, v);
                let (ps, pv) = model.pressure_grad(s, v);
                (ts * pv - tv * ps) / ts
            }
            Err(_) => f64::NAN,
        }
    };
    let v = solve_bracketed(
        &format!("V from (T, P) = ({t0}, {p0})"),
        &g,
        &dg,
        v_lo,
        v_hi,
        tol,
    )?;
    let s = solve_s_for_t(model, t0, v, pad, tol)?;
    Ok((s, v))
}

/// Finds the entropy-volume pre-image of chart coordinates `(x1, x2)`.
///
/// The search is bracketed against the declared domain box (with a small
/// margin); targets whose pre-image falls outside come back as
/// [`Error::NonBracketed`] or [`Error::OutOfDomain`].
pub fn invert_to_chart(
    model: &dyn Eos,
    chart: Chart,
    x1: f64,
    x2: f64,
    tol: &Tolerances,
) -> Result<StatePoint> {
    let boxx = model.domain();
    let pad = boxx.padded(BOX_PAD, model.hard_v_floor());
    let (s, v) = match chart {
        Chart::SV => (x1, x2),
        Chart::TV => {
            let s = solve_s_for_t(model, x1, x2, &pad, tol)?;
            (s, x2)
        }
        Chart::SP => {
            let v = solve_v_for_p(model, x2, x1, &pad, tol)?;
            (x1, v)
        }
        Chart::TP => {
            let center = boxx.center();
            match invert_tp_from(model, x1, x2, center, &pad, tol) {
                Some(sv) => sv,
                None => invert_tp_cold(model, x1, x2, &pad, tol)?,
            }
        }
    };
    if !pad.contains(s, v) {
        return Err(Error::OutOfDomain {
            s,
            v,
            reason: "inversion landed outside the domain box".into(),
        });
    }
    StatePoint::sv(s, v)
}

/// Like [`invert_to_chart`] but warm-started from a nearby known pre-image;
/// used by finite-difference stencils that nudge chart coordinates.
pub(crate) fn invert_near(
    model: &dyn Eos,
    chart: Chart,
    x1: f64,
    x2: f64,
    guess: (f64, f64),
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    let pad = model.domain().padded(BOX_PAD, model.hard_v_floor());
    match chart {
        Chart::SV => Ok((x1, x2)),
        Chart::TV => {
            let f = |s: f64| model.temperature(s, x2) - x1;
            let df = |s: f64| model.temperature_grad(s, x2).0;
            if let Some(s) = newton_local(&f, &df, guess.0, pad.s[0], pad.s[1], tol) {
                return Ok((s, x2));
            }
            Ok((solve_s_for_t(model, x1, x2, &pad, tol)?, x2))
        }
        Chart::SP => {
            let f = |v: f64| model.pressure(x1, v) - x2;
            let df = |v: f64| model.pressure_grad(x1, v).1;
            if let Some(v) = newton_local(&f, &df, guess.1, pad.v[0], pad.v[1], tol) {
                return Ok((x1, v));
            }
            Ok((x1, solve_v_for_p(model, x2, x1, &pad, tol)?))
        }
        Chart::TP => match invert_tp_from(model, x1, x2, guess, &pad, tol) {
            Some(sv) => Ok(sv),
            None => invert_tp_cold(model, x1, x2, &pad, tol),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ideal() -> IdealGas {
        IdealGas::new()
    }

    #[test]
    fn ideal_reference_point() {
        let m = ideal();
        let (u, t, p) = evaluate(&m, &StatePoint::sv(0.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(u, 1.0, max_relative = 1e-15);
        assert_relative_eq!(t, 2.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(p, 2.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn ideal_energy_at_unit_entropy_double_volume() {
        let m = ideal();
        let expected = 2.0f64.powf(-2.0 / 3.0) * (2.0f64 / 3.0).exp();
        assert_relative_eq!(m.energy(1.0, 2.0), expected, max_relative = 1e-14);
    }

    #[test]
    fn ideal_gas_law_holds() {
        let m = ideal();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (s, v) = m.domain().sample(&mut rng);
            let t = m.temperature(s, v);
            let p = m.pressure(s, v);
            assert_relative_eq!(p * v, t, max_relative = 1e-12);
        }
    }

    #[test]
    fn vdw_with_zero_parameters_is_ideal() {
        let vdw = VanDerWaals::new(0.0, 0.0).unwrap();
        let id = ideal();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let (s, v) = id.domain().sample(&mut rng);
            assert_relative_eq!(vdw.energy(s, v), id.energy(s, v), max_relative = 1e-12);
            assert_relative_eq!(vdw.temperature(s, v), id.temperature(s, v), max_relative = 1e-12);
            assert_relative_eq!(vdw.pressure(s, v), id.pressure(s, v), max_relative = 1e-12);
        }
    }

    #[test]
    fn vdw_pressure_matches_direct_formula() {
        let a = 0.125;
        let b = 0.04;
        let vdw = VanDerWaals::new(a, b).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let (s, v) = vdw.domain().sample(&mut rng);
            let t = vdw.temperature(s, v);
            let direct = t / (v - b) - a / (v * v);
            assert_relative_eq!(vdw.pressure(s, v), direct, max_relative = 1e-14);
        }
    }

    #[test]
    fn vdw_rejects_negative_parameters() {
        assert!(VanDerWaals::new(-0.1, 0.0).is_err());
        assert!(VanDerWaals::new(0.1, -0.2).is_err());
        assert!(VanDerWaals::new(0.1, 0.05).is_ok());
    }

    #[test]
    fn pressure_is_minus_volume_slope_of_energy() {
        // Central-difference the fundamental relation itself and compare to
        // the claimed closed-form pressure and temperature.
        let models: Vec<EosRef> =
            vec![Arc::new(ideal()), Arc::new(VanDerWaals::new(0.1, 0.05).unwrap())];
        let h = f64::EPSILON.cbrt();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in &models {
            for _ in 0..50 {
                let (s, v) = m.domain().padded(-0.1, m.hard_v_floor()).sample(&mut rng);
                let hv = h * v.abs().max(1.0);
                let hs = h * s.abs().max(1.0);
                let p_fd = -(m.energy(s, v + hv) - m.energy(s, v - hv)) / (2.0 * hv);
                let t_fd = (m.energy(s + hs, v) - m.energy(s - hs, v)) / (2.0 * hs);
                assert_relative_eq!(p_fd, m.pressure(s, v), max_relative = 1e-8);
                assert_relative_eq!(t_fd, m.temperature(s, v), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn jets_match_closed_form_gradients() {
        let models: Vec<EosRef> = vec![
            Arc::new(ideal()),
            Arc::new(VanDerWaals::new(0.1, 0.05).unwrap()),
            Arc::new(CorruptedPressure::new(Arc::new(ideal()))),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in &models {
            for _ in 0..30 {
                let (s, v) = m.domain().sample(&mut rng);
                let tj = m.temperature_jet(s, v);
                let pj = m.pressure_jet(s, v);
                let (ts, tv) = m.temperature_grad(s, v);
                let (ps, pv) = m.pressure_grad(s, v);
                assert_relative_eq!(tj.v, m.temperature(s, v), max_relative = 1e-13);
                assert_relative_eq!(pj.v, m.pressure(s, v), max_relative = 1e-13);
                assert_relative_eq!(tj.d1, ts, max_relative = 1e-12);
                assert_relative_eq!(tj.d2, tv, max_relative = 1e-12);
                assert_relative_eq!(pj.d1, ps, max_relative = 1e-12, epsilon = 1e-12);
                assert_relative_eq!(pj.d2, pv, max_relative = 1e-12);
                // U's jet gradient is (T, -P) only for potential-consistent
                // models; the corrupted wrapper intentionally breaks the P leg.
                let uj = m.energy_jet(s, v);
                assert_relative_eq!(uj.d1, m.temperature(s, v), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn invert_tv_known_points() {
        let m = ideal();
        let tol = Tolerances::default();
        let pt = invert_to_chart(&m, Chart::TV, 2.0 / 3.0, 1.0, &tol).unwrap();
        assert_relative_eq!(pt.c1(), 0.0, epsilon = 1e-10);
        assert_relative_eq!(pt.c2(), 1.0, epsilon = 1e-12);

        // S(T=2/3, V=2) = ln 2 by the closed-form entropy.
        let pt = invert_to_chart(&m, Chart::TV, 2.0 / 3.0, 2.0, &tol).unwrap();
        assert_relative_eq!(pt.c1(), 2.0f64.ln(), epsilon = 1e-10);
        assert_relative_eq!(pt.c1(), IdealGas::entropy_tv(2.0 / 3.0, 2.0), epsilon = 1e-10);
    }

    #[test]
    fn inversion_round_trips_every_chart() {
        let models: Vec<EosRef> =
            vec![Arc::new(ideal()), Arc::new(VanDerWaals::new(0.1, 0.05).unwrap())];
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for m in &models {
            for chart in Chart::all() {
                for _ in 0..100 {
                    let (s, v) = m.domain().sample(&mut rng);
                    let (x1, x2) = chart_values(m.as_ref(), chart, s, v);
                    let pt = invert_to_chart(m.as_ref(), chart, x1, x2, &tol)
                        .unwrap_or_else(|e| panic!("{chart:?} inversion failed: {e}"));
                    assert_relative_eq!(pt.c1(), s, epsilon = 1e-9, max_relative = 1e-9);
                    assert_relative_eq!(pt.c2(), v, epsilon = 1e-9, max_relative = 1e-9);
                }
            }
        }
    }

    #[test]
    fn unreachable_targets_are_rejected() {
        let m = ideal();
        let tol = Tolerances::default();
        match invert_to_chart(&m, Chart::TV, 50.0, 1.0, &tol) {
            Err(Error::NonBracketed { .. }) => {}
            other => panic!("expected NonBracketed, got {other:?}"),
        }
        match invert_to_chart(&m, Chart::SP, 0.0, 1e6, &tol) {
            Err(Error::NonBracketed { .. }) => {}
            other => panic!("expected NonBracketed, got {other:?}"),
        }
        match invert_to_chart(&m, Chart::TP, 40.0, 1e-9, &tol) {
            Err(Error::NonBracketed { .. }) => {}
            other => panic!("expected NonBracketed, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_wrapper_shifts_pressure_only() {
        let base: EosRef = Arc::new(ideal());
        let bad = CorruptedPressure::new(base.clone());
        let (s, v) = (0.4, 1.3);
        assert_relative_eq!(bad.pressure(s, v), base.pressure(s, v) + s, max_relative = 1e-15);
        assert_eq!(bad.temperature(s, v), base.temperature(s, v));
        assert_eq!(bad.energy(s, v), base.energy(s, v));
        let (ps_bad, pv_bad) = bad.pressure_grad(s, v);
        let (ps, pv) = base.pressure_grad(s, v);
        assert_relative_eq!(ps_bad, ps + 1.0, max_relative = 1e-15);
        assert_eq!(pv_bad, pv);
    }

    #[test]
    fn evaluate_rejects_out_of_box_points() {
        let m = ideal();
        let pt = StatePoint::sv(0.0, 100.0).unwrap();
        match evaluate(&m, &pt) {
            Err(Error::OutOfDomain { .. }) => {}
            other => panic!("expected OutOfDomain, got {other:?}"),
        }
    }

    #[test]
    fn solver_reports_missing_bracket() {
        let tol = Tolerances::default();
        let f = |x: f64| x * x + 1.0; // no real root
        let df = |x: f64| 2.0 * x;
        match solve_bracketed("test", &f, &df, -1.0, 1.0, &tol) {
            Err(Error::NonBracketed { .. }) => {}
            other => panic!("expected NonBracketed, got {other:?}"),
        }
    }

    #[test]
    fn solver_finds_cubic_root_to_machine_precision() {
        let tol = Tolerances::default();
        let f = |x: f64| x * x * x - 2.0;
        let df = |x: f64| 3.0 * x * x;
        let root = solve_bracketed("cbrt", &f, &df, 0.0, 2.0, &tol).unwrap();
        assert_relative_eq!(root, 2.0f64.cbrt(), max_relative = 1e-15);
    }

    #[test]
    fn grid_includes_edges_and_center() {
        let b = DomainBox::new(0.0, 1.0, 1.0, 2.0).unwrap();
        let g = b.grid(3, 3);
        assert_eq!(g.len(), 9);
        assert!(g.contains(&(0.0, 1.0)));
        assert!(g.contains(&(1.0, 2.0)));
        assert_eq!(b.grid(1, 1), vec![(0.5, 1.5)]);
    }
}
