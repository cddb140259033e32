//! Closed thermodynamic cycles: construction from named segment types and
//! first-law bookkeeping.
//!
//! A cycle is a chain of segments, each holding one coordinate or one state
//! function constant. Isentropic and isochoric legs are straight lines in
//! the entropy-volume plane; isothermal and isobaric legs follow implicit
//! contours, with the volume recovered by a root solve at every quadrature
//! node and the tangent from implicit differentiation. Running a cycle
//! splits the heat by sign, totals the work, and checks energy conservation
//! around the loop.

use std::sync::Arc;

use crate::chart::Tolerances;
use crate::eos::{self, DomainBox, EosRef};
use crate::error::{Error, Result};
use crate::lagrangian;
use crate::paths::{Path, PathPiece};
use crate::quad;

/// What a segment holds constant (or `General` for a free-form leg).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// Constant entropy; straight line at fixed `S`.
    Isentropic,
    /// Constant volume; straight line at fixed `V`.
    Isochoric,
    /// Constant temperature; follows the isotherm through the start state.
    Isothermal,
    /// Constant pressure; follows the isobar through the start state.
    Isobaric,
    /// Arbitrary caller-supplied path.
    General,
}

impl SegmentKind {
    pub fn label(self) -> &'static str {
        match self {
            SegmentKind::Isentropic => "isentropic",
            SegmentKind::Isochoric => "isochoric",
            SegmentKind::Isothermal => "isothermal",
            SegmentKind::Isobaric => "isobaric",
            SegmentKind::General => "general",
        }
    }
}

impl std::fmt::Display for SegmentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// One leg of a cycle.
#[derive(Clone)]
pub struct Segment {
    kind: SegmentKind,
    path: Path,
}

impl Segment {
    /// Wraps an arbitrary path as a segment (kind is a label only here; no
    /// contour condition is enforced).
    pub fn from_path(kind: SegmentKind, path: Path) -> Segment {
        Segment { kind, path }
    }

    pub fn kind(&self) -> SegmentKind {
        self.kind
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn start(&self) -> (f64, f64) {
        self.path.endpoints().0
    }

    pub fn end(&self) -> (f64, f64) {
        self.path.endpoints().1
    }
}

impl std::fmt::Debug for Segment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Segment")
            .field("kind", &self.kind.label())
            .field("from", &self.start())
            .field("to", &self.end())
            .finish()
    }
}

/// Number of build-time validation samples along an implicit contour.
const CONTOUR_CHECKS: usize = 33;

/// Builds one segment of the given kind from `start`.
///
/// The meaning of `target` depends on the kind: the final volume for
/// isentropic legs, the final entropy for isochoric, isothermal, and isobaric
/// legs. Isothermal and isobaric legs hold the temperature or pressure of
/// the *start* state and solve for the volume along the way; the solve is
/// rehearsed at [`CONTOUR_CHECKS`] parameter values up front so an
/// unreachable contour fails at build time, not mid-quadrature.
pub fn build_segment(
    model: &EosRef,
    kind: SegmentKind,
    start: (f64, f64),
    target: f64,
    tol: &Tolerances,
) -> Result<Segment> {
    let (s0, v0) = start;
    if !model.in_hard_domain(s0, v0) || !target.is_finite() {
        return Err(Error::OutOfDomain {
            s: s0,
            v: v0,
            reason: "segment start (or target) is not a usable state".into(),
        });
    }
    let pad = model.domain().padded(eos::BOX_PAD, model.hard_v_floor());
    let check_inside = |s: f64, v: f64| -> Result<()> {
        if pad.contains(s, v) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { s, v, reason: "segment endpoint leaves the domain box".into() })
        }
    };
    check_inside(s0, v0)?;

    let path = match kind {
        SegmentKind::Isentropic => {
            check_inside(s0, target)?;
            Path::straight(start, (s0, target))
        }
        SegmentKind::Isochoric => {
            check_inside(target, v0)?;
            Path::straight(start, (target, v0))
        }
        SegmentKind::Isothermal => {
            let t0 = model.temperature(s0, v0);
            let v1 = contour_rehearsal(model, start, target, &|s| {
                eos::solve_volume_for_temperature(model.as_ref(), t0, s, tol)
            })?;
            let m = model.clone();
            let tl = *tol;
            let value = move |s: f64| {
                eos::solve_volume_for_temperature(m.as_ref(), t0, s, &tl).unwrap_or(f64::NAN)
            };
            let g = model.clone();
            let slope = move |s: f64, v: f64| {
                let (ts, tv) = g.temperature_grad(s, v);
                -ts / tv
            };
            contour_path(start, target, v1, value, slope)
        }
        SegmentKind::Isobaric => {
            let p0 = model.pressure(s0, v0);
            let v1 = contour_rehearsal(model, start, target, &|s| {
                eos::solve_volume_for_pressure(model.as_ref(), p0, s, tol)
            })?;
            let m = model.clone();
            let tl = *tol;
            let value = move |s: f64| {
                eos::solve_volume_for_pressure(m.as_ref(), p0, s, &tl).unwrap_or(f64::NAN)
            };
            let g = model.clone();
            let slope = move |s: f64, v: f64| {
                let (ps, pv) = g.pressure_grad(s, v);
                -ps / pv
            };
            contour_path(start, target, v1, value, slope)
        }
        SegmentKind::General => {
            return Err(Error::Config(
                "general segments carry their own path; use Segment::from_path".into(),
            ));
        }
    };
    Ok(Segment { kind, path })
}

/// Solves the contour at evenly spaced entropies (including both ends) and
/// returns the final volume. Errors if any solve fails or the solved curve
/// exits the padded box.
fn contour_rehearsal(
    model: &EosRef,
    start: (f64, f64),
    s_target: f64,
    solve: &dyn Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let pad = model.domain().padded(eos::BOX_PAD, model.hard_v_floor());
    let mut v_end = start.1;
    for i in 0..CONTOUR_CHECKS {
        let t = i as f64 / (CONTOUR_CHECKS - 1) as f64;
        let s = start.0 * (1.0 - t) + s_target * t;
        let v = solve(s)?;
        if !pad.contains(s, v) {
            return Err(Error::OutOfDomain {
                s,
                v,
                reason: "contour leaves the domain box".into(),
            });
        }
        v_end = v;
    }
    Ok(v_end)
}

/// Assembles the path for an implicit contour `v = value(s)` from `start` to
/// entropy `s1`, with `v1` the pre-solved final volume so both endpoints are
/// exact, and `slope = dv/ds` from implicit differentiation.
fn contour_path(
    start: (f64, f64),
    s1: f64,
    v1: f64,
    value: impl Fn(f64) -> f64 + Send + Sync + 'static,
    slope: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
) -> Path {
    let (s0, v0) = start;
    let s_at = move |t: f64| s0 * (1.0 - t) + s1 * t;
    let s_for_v = s_at;
    let s_for_dv = s_at;
    let value = Arc::new(value);
    let value_dv = value.clone();
    let piece = PathPiece {
        s: Arc::new(s_at),
        v: Arc::new(move |t| {
            if t == 0.0 {
                v0
            } else if t == 1.0 {
                v1
            } else {
                value(s_for_v(t))
            }
        }),
        ds: Arc::new(move |_| s1 - s0),
        dv: Arc::new(move |t| {
            let s = s_for_dv(t);
            let v = if t == 0.0 {
                v0
            } else if t == 1.0 {
                v1
            } else {
                value_dv(s)
            };
            (s1 - s0) * slope(s, v)
        }),
    };
    Path::from_pieces(vec![piece], false)
}

/// The classic four-stroke reversible cycle between two isotherms
/// (`t_hot > t_cold`) and two adiabats (`s_low < s_high`), starting on the
/// hot isotherm at `s_low` and traversed in the heat-engine direction.
pub fn carnot(
    model: &EosRef,
    t_hot: f64,
    t_cold: f64,
    s_low: f64,
    s_high: f64,
    tol: &Tolerances,
) -> Result<Vec<Segment>> {
    if !(t_hot.is_finite() && t_cold.is_finite() && t_cold > 0.0 && t_hot > t_cold) {
        return Err(Error::Config(format!(
            "need t_hot > t_cold > 0, got t_hot = {t_hot}, t_cold = {t_cold}"
        )));
    }
    if !(s_low.is_finite() && s_high.is_finite() && s_low < s_high) {
        return Err(Error::Config(format!(
            "need s_low < s_high, got s_low = {s_low}, s_high = {s_high}"
        )));
    }
    let v0 = eos::solve_volume_for_temperature(model.as_ref(), t_hot, s_low, tol)?;
    let hot = build_segment(model, SegmentKind::Isothermal, (s_low, v0), s_high, tol)?;
    let v2 = eos::solve_volume_for_temperature(model.as_ref(), t_cold, s_high, tol)?;
    let expand = build_segment(model, SegmentKind::Isentropic, hot.end(), v2, tol)?;
    let cold = build_segment(model, SegmentKind::Isothermal, expand.end(), s_low, tol)?;
    let compress = build_segment(model, SegmentKind::Isentropic, cold.end(), v0, tol)?;
    Ok(vec![hot, expand, cold, compress])
}

/// Counter-clockwise rectangle in the entropy-volume plane as a four-segment
/// cycle: isochoric along the bottom and top, isentropic up and down the
/// sides.
pub fn rectangle_cycle(model: &EosRef, rect: &DomainBox, tol: &Tolerances) -> Result<Vec<Segment>> {
    let (s0, s1) = (rect.s[0], rect.s[1]);
    let (v0, v1) = (rect.v[0], rect.v[1]);
    Ok(vec![
        build_segment(model, SegmentKind::Isochoric, (s0, v0), s1, tol)?,
        build_segment(model, SegmentKind::Isentropic, (s1, v0), v1, tol)?,
        build_segment(model, SegmentKind::Isochoric, (s1, v1), s0, tol)?,
        build_segment(model, SegmentKind::Isentropic, (s0, v1), v0, tol)?,
    ])
}

/// The same cycle traversed backwards: segment order and every segment's
/// orientation are reversed. Running it negates the net work and swaps the
/// roles of absorbed and rejected heat.
pub fn reverse_cycle(segments: &[Segment]) -> Vec<Segment> {
    segments
        .iter()
        .rev()
        .map(|seg| Segment { kind: seg.kind, path: seg.path.reversed() })
        .collect()
}

/// Concatenates the segments into one closed path (errors if the chain has
/// gaps).
pub fn cycle_path(segments: &[Segment]) -> Result<Path> {
    let mut iter = segments.iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::Config("cycle needs at least one segment".into()))?;
    let mut path = first.path.clone();
    for seg in iter {
        path = path.then(&seg.path)?;
    }
    path.close()
}

/// Per-segment contribution to the cycle's books.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SegmentSummary {
    pub index: usize,
    pub kind: &'static str,
    pub start_s: f64,
    pub start_v: f64,
    pub end_s: f64,
    pub end_v: f64,
    /// Net heat `integral of T dS` along the segment.
    pub heat: f64,
    /// Work done by the system, `integral of P dV`.
    pub work: f64,
}

/// First-law bookkeeping for one traversal of a closed cycle.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CycleReport {
    /// Heat absorbed: the positive part of `integral of T dS`.
    pub q_in: f64,
    /// Heat rejected, reported as a positive number.
    pub q_out: f64,
    /// Net work done by the system, `loop integral of P dV`.
    pub w_net: f64,
    /// `w_net / q_in`, or zero when the cycle absorbs no heat.
    pub efficiency: f64,
    /// `(q_in - q_out) - w_net`; zero up to quadrature error.
    pub first_law_residual: f64,
    /// Loop integral of `T dS - P dV`, computed independently; vanishing is
    /// enforced, not assumed.
    pub du_loop: f64,
    pub segments: Vec<SegmentSummary>,
}

/// Runs one traversal of a closed cycle: checks the chain closes, splits the
/// heat by sign, totals the work, and verifies that the energy 1-form
/// integrates to zero around the loop.
pub fn run_cycle(model: &EosRef, segments: &[Segment], tol: &Tolerances) -> Result<CycleReport> {
    if segments.is_empty() {
        return Err(Error::Config("cycle needs at least one segment".into()));
    }
    for (i, seg) in segments.iter().enumerate() {
        let j = (i + 1) % segments.len();
        let (es, ev) = seg.end();
        let (ns, nv) = segments[j].start();
        let scale = es.abs().max(ev.abs()).max(ns.abs()).max(nv.abs()).max(1.0);
        if (es - ns).abs().max((ev - nv).abs()) > 1e-9 * scale {
            return Err(Error::NonClosingChain {
                what: format!(
                    "segment {i} ends at ({es}, {ev}) but segment {j} starts at ({ns}, {nv})"
                ),
            });
        }
    }

    let total_pieces: usize = segments.iter().map(|s| s.path.pieces().len()).sum();
    let piece_tol = tol.quad_abs / total_pieces as f64;

    let mut q_in = 0.0;
    let mut q_out = 0.0;
    let mut w_net = 0.0;
    let mut du_loop = 0.0;
    let mut rows = Vec::with_capacity(segments.len());
    for (index, seg) in segments.iter().enumerate() {
        let mut heat = 0.0;
        let mut work = 0.0;
        for piece in seg.path.pieces() {
            let absorb = |t: f64| {
                let (s, v) = piece.point(t);
                let (ds, _) = piece.velocity(t);
                model.temperature(s, v) * ds.max(0.0)
            };
            let reject = |t: f64| {
                let (s, v) = piece.point(t);
                let (ds, _) = piece.velocity(t);
                -(model.temperature(s, v) * ds.min(0.0))
            };
            let push = |t: f64| {
                let (s, v) = piece.point(t);
                let (_, dv) = piece.velocity(t);
                model.pressure(s, v) * dv
            };
            let qi = quad::adaptive(&absorb, 0.0, 1.0, piece_tol)?;
            let qo = quad::adaptive(&reject, 0.0, 1.0, piece_tol)?;
            let w = quad::adaptive(&push, 0.0, 1.0, piece_tol)?;
            q_in += qi;
            q_out += qo;
            w_net += w;
            heat += qi - qo;
            work += w;
        }
        du_loop += lagrangian::action(model, &seg.path, tol)?;
        let (start_s, start_v) = seg.start();
        let (end_s, end_v) = seg.end();
        rows.push(SegmentSummary {
            index,
            kind: seg.kind.label(),
            start_s,
            start_v,
            end_s,
            end_v,
            heat,
            work,
        });
    }

    let scale = q_in.abs() + q_out.abs() + w_net.abs();
    if du_loop.abs() > 1e-8 * scale + 10.0 * tol.quad_abs {
        return Err(Error::CrossCheck {
            what: "energy change around a closed cycle".into(),
            lhs: du_loop,
            rhs: 0.0,
        });
    }

    let efficiency = if q_in.abs() <= 10.0 * tol.quad_abs { 0.0 } else { w_net / q_in };
    Ok(CycleReport {
        q_in,
        q_out,
        w_net,
        efficiency,
        first_law_residual: (q_in - q_out) - w_net,
        du_loop,
        segments: rows,
    })
}

/// Declarative cycle description, as used in run configurations.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CycleSpec {
    /// Two isotherms and two adiabats.
    Carnot { t_hot: f64, t_cold: f64, s_low: f64, s_high: f64 },
    /// Counter-clockwise entropy-volume rectangle.
    Rectangle { rect: DomainBox },
    /// Explicit chain of segments from a start state.
    Segments { start: [f64; 2], steps: Vec<SegmentStep> },
}

/// One step of a [`CycleSpec::Segments`] chain.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentStep {
    pub kind: SegmentKind,
    pub target: f64,
}

impl CycleSpec {
    /// Builds the concrete segments of this cycle for `model`.
    pub fn build(&self, model: &EosRef, tol: &Tolerances) -> Result<Vec<Segment>> {
        match self {
            CycleSpec::Carnot { t_hot, t_cold, s_low, s_high } => {
                carnot(model, *t_hot, *t_cold, *s_low, *s_high, tol)
            }
            CycleSpec::Rectangle { rect } => {
                rect.validate()?;
                rectangle_cycle(model, rect, tol)
            }
            CycleSpec::Segments { start, steps } => {
                if steps.is_empty() {
                    return Err(Error::Config("segment chain is empty".into()));
                }
                let mut at = (start[0], start[1]);
                let mut segs = Vec::with_capacity(steps.len());
                for step in steps {
                    let seg = build_segment(model, step.kind, at, step.target, tol)?;
                    at = seg.end();
                    segs.push(seg);
                }
                Ok(segs)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{IdealGas, VanDerWaals};
    use crate::paths::{line_integral, loop_integral};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn ideal() -> EosRef {
        Arc::new(IdealGas::new())
    }

    fn vdw() -> EosRef {
        Arc::new(VanDerWaals::new(0.1, 0.05).unwrap())
    }

    #[test]
    fn carnot_reference_numbers() {
        let m = ideal();
        let tol = Tolerances::default();
        let segs = carnot(&m, 2.0 / 3.0, 1.0 / 3.0, 0.0, 1.0, &tol).unwrap();
        assert_eq!(segs.len(), 4);
        let report = run_cycle(&m, &segs, &tol).unwrap();
        assert_relative_eq!(report.q_in, 2.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(report.q_out, 1.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(report.w_net, 1.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(report.efficiency, 0.5, epsilon = 1e-9);
        assert!(report.first_law_residual.abs() <= 1e-9);
        assert!(report.du_loop.abs() <= 1e-9);
        // The adiabats carry no heat at all.
        assert_eq!(report.segments[1].heat, 0.0);
        assert_eq!(report.segments[3].heat, 0.0);
    }

    #[test]
    fn carnot_efficiency_is_model_independent() {
        let m = vdw();
        let tol = Tolerances::default();
        let (t_hot, t_cold) = (0.9, 0.5);
        let segs = carnot(&m, t_hot, t_cold, -0.5, 0.5, &tol).unwrap();
        let report = run_cycle(&m, &segs, &tol).unwrap();
        assert_relative_eq!(report.efficiency, 1.0 - t_cold / t_hot, epsilon = 1e-8);
        assert_relative_eq!(report.q_in, t_hot, epsilon = 1e-8); // delta S = 1
        assert!(report.first_law_residual.abs() <= 1e-8);
    }

    #[test]
    fn rectangle_cycle_matches_the_loop_integrals() {
        let m = ideal();
        let tol = Tolerances::default();
        let rect = DomainBox::new(0.0, 1.0, 1.0, 2.0).unwrap();
        let segs = rectangle_cycle(&m, &rect, &tol).unwrap();
        let report = run_cycle(&m, &segs, &tol).unwrap();
        let closed_form = ((2.0f64 / 3.0).exp() - 1.0) * (1.0 - 2.0f64.powf(-2.0 / 3.0));
        assert_relative_eq!(report.w_net, closed_form, epsilon = 1e-8);
        assert_relative_eq!(report.q_in - report.q_out, closed_form, epsilon = 1e-8);
        assert!(report.first_law_residual.abs() <= 1e-9);

        // Same numbers from the 1-form machinery on the equivalent path.
        let heat = loop_integral(&crate::calculus::OneForm::heat(&m), &cycle_path(&segs).unwrap(), &tol)
            .unwrap();
        assert_relative_eq!(report.q_in - report.q_out, heat, epsilon = 1e-9);
    }

    #[test]
    fn zero_area_cycle_moves_no_net_anything() {
        // Out and back along the same adiabat: not an isothermal pair, and
        // the books must come out empty.
        let m = ideal();
        let tol = Tolerances::default();
        let out = build_segment(&m, SegmentKind::Isentropic, (0.5, 1.0), 2.0, &tol).unwrap();
        let back = build_segment(&m, SegmentKind::Isentropic, (0.5, 2.0), 1.0, &tol).unwrap();
        let report = run_cycle(&m, &[out, back], &tol).unwrap();
        assert_eq!(report.q_in, 0.0);
        assert_eq!(report.q_out, 0.0);
        assert_eq!(report.efficiency, 0.0);
        assert!(report.w_net.abs() <= 1e-10);
        assert!(report.first_law_residual.abs() <= 1e-10);
    }

    #[test]
    fn reversal_negates_work_and_swaps_heat() {
        let m = ideal();
        let tol = Tolerances::default();
        let segs = carnot(&m, 2.0 / 3.0, 1.0 / 3.0, 0.0, 1.0, &tol).unwrap();
        let back = reverse_cycle(&segs);
        let fwd = run_cycle(&m, &segs, &tol).unwrap();
        let rev = run_cycle(&m, &back, &tol).unwrap();
        assert_relative_eq!(rev.w_net, -fwd.w_net, epsilon = 1e-9);
        assert_relative_eq!(rev.q_in, fwd.q_out, epsilon = 1e-9);
        assert_relative_eq!(rev.q_out, fwd.q_in, epsilon = 1e-9);
        assert!(rev.first_law_residual.abs() <= 1e-9);
    }

    #[test]
    fn gaps_in_the_chain_are_rejected() {
        let m = ideal();
        let tol = Tolerances::default();
        let a = build_segment(&m, SegmentKind::Isochoric, (0.0, 1.0), 1.0, &tol).unwrap();
        let b = build_segment(&m, SegmentKind::Isochoric, (1.0, 1.5), 0.0, &tol).unwrap();
        match run_cycle(&m, &[a.clone(), b], &tol) {
            Err(Error::NonClosingChain { .. }) => {}
            other => panic!("expected NonClosingChain, got {other:?}"),
        }
        // A single open segment cannot wrap onto itself either.
        match run_cycle(&m, &[a], &tol) {
            Err(Error::NonClosingChain { .. }) => {}
            other => panic!("expected NonClosingChain, got {other:?}"),
        }
    }

    #[test]
    fn implicit_segments_follow_their_contours() {
        let tol = Tolerances::default();
        for model in [ideal(), vdw()] {
            let floor = model.hard_v_floor();
            let start = (0.0, floor + 1.0);
            let iso_t = build_segment(&model, SegmentKind::Isothermal, start, 0.8, &tol).unwrap();
            let t0 = model.temperature(start.0, start.1);
            let iso_p = build_segment(&model, SegmentKind::Isobaric, start, 0.8, &tol).unwrap();
            let p0 = model.pressure(start.0, start.1);
            for k in 0..=16 {
                let t = k as f64 / 16.0;
                let (s, v) = iso_t.path().point(t);
                assert_relative_eq!(model.temperature(s, v), t0, max_relative = 1e-12);
                let (s, v) = iso_p.path().point(t);
                assert_relative_eq!(model.pressure(s, v), p0, max_relative = 1e-12);
            }
            // Velocity matches a finite difference of the position.
            let h = 1e-6;
            for seg in [&iso_t, &iso_p] {
                let (_, dv) = seg.path().velocity(0.37);
                let (_, vp) = seg.path().point(0.37 + h);
                let (_, vm) = seg.path().point(0.37 - h);
                assert_relative_eq!(dv, (vp - vm) / (2.0 * h), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn unreachable_contours_fail_at_build_time() {
        let m = ideal();
        let tol = Tolerances::default();
        // The isotherm through (0, 1) reaches V = e^S, which leaves the
        // domain box long before S = 3.
        match build_segment(&m, SegmentKind::Isothermal, (0.0, 1.0), 3.0, &tol) {
            Err(Error::NonBracketed { .. }) | Err(Error::OutOfDomain { .. }) => {}
            other => panic!("expected a build-time failure, got {other:?}"),
        }
        // Targets outside the box fail immediately.
        match build_segment(&m, SegmentKind::Isentropic, (0.0, 1.0), 50.0, &tol) {
            Err(Error::OutOfDomain { .. }) => {}
            other => panic!("expected OutOfDomain, got {other:?}"),
        }
    }

    #[test]
    fn cycle_path_concatenates_and_closes() {
        let m = ideal();
        let tol = Tolerances::default();
        let segs = carnot(&m, 2.0 / 3.0, 1.0 / 3.0, 0.0, 1.0, &tol).unwrap();
        let path = cycle_path(&segs).unwrap();
        assert!(path.is_closed());
        assert_eq!(path.piece_count(), 4);
        let du = loop_integral(&crate::calculus::OneForm::du(&m), &path, &tol).unwrap();
        assert_relative_eq!(du, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn cycle_specs_deserialize_build_and_run() {
        let m = ideal();
        let tol = Tolerances::default();
        let carnot_json = r#"{
            "type": "carnot", "t_hot": 0.6666666666666666,
            "t_cold": 0.3333333333333333, "s_low": 0.0, "s_high": 1.0
        }"#;
        let spec: CycleSpec = serde_json::from_str(carnot_json).unwrap();
        let report = run_cycle(&m, &spec.build(&m, &tol).unwrap(), &tol).unwrap();
        assert_relative_eq!(report.efficiency, 0.5, epsilon = 1e-9);

        let rect_json = r#"{"type": "rectangle", "rect": {"s": [0.0, 1.0], "v": [1.0, 2.0]}}"#;
        let spec: CycleSpec = serde_json::from_str(rect_json).unwrap();
        assert_eq!(spec.build(&m, &tol).unwrap().len(), 4);

        let chain_json = r#"{
            "type": "segments", "start": [0.0, 1.0],
            "steps": [
                {"kind": "isochoric", "target": 1.0},
                {"kind": "isentropic", "target": 2.0},
                {"kind": "isochoric", "target": 0.0},
                {"kind": "isentropic", "target": 1.0}
            ]
        }"#;
        let spec: CycleSpec = serde_json::from_str(chain_json).unwrap();
        let report = run_cycle(&m, &spec.build(&m, &tol).unwrap(), &tol).unwrap();
        assert!(report.w_net > 0.3);

        // Round trip.
        let text = serde_json::to_string(&spec).unwrap();
        let again: CycleSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), text);

        // `general` steps cannot be built from a declarative spec.
        let bad_json = r#"{
            "type": "segments", "start": [0.0, 1.0],
            "steps": [{"kind": "general", "target": 1.0}]
        }"#;
        let spec: CycleSpec = serde_json::from_str(bad_json).unwrap();
        match spec.build(&m, &tol) {
            Err(Error::Config(_)) => {}
            other => panic!("expected Config error, got {other:?}"),
        }
    }

    #[test]
    fn isobaric_heat_equals_enthalpy_difference() {
        // Along an isobar, T dS integrates to the enthalpy change.
        let m = vdw();
        let tol = Tolerances::default();
        let start = (0.0, 1.0 + m.hard_v_floor());
        let seg = build_segment(&m, SegmentKind::Isobaric, start, 0.9, &tol).unwrap();
        let heat =
            line_integral(&crate::calculus::OneForm::heat(&m), seg.path(), &tol).unwrap();
        let (s1, v1) = seg.end();
        let h = crate::maxwell::PotentialKind::Enthalpy;
        let dh = h.value(m.as_ref(), s1, v1) - h.value(m.as_ref(), start.0, start.1);
        assert_relative_eq!(heat, dh, epsilon = 1e-9);
    }
}
