//! Partial derivatives with explicit held-constant variables, Jacobian
//! ("wedge") ratios, and differential forms on the state charts.
//!
//! Three derivative engines coexist and are used to cross-check one another:
//!
//! * `Analytic` — the model's hand-written gradients;
//! * `DualNumber` — forward-mode AD through the same closed forms;
//! * `CentralDifference` — finite differences of chart coordinates, with the
//!   pre-image recovered by Newton inversion at every stencil point. This
//!   route shares no derivative formulas with the other two, which is what
//!   makes the agreement checks meaningful.

use std::sync::Arc;

use rand::Rng;

use crate::chart::{Chart, Tolerances};
use crate::eos::{self, EosRef};
use crate::error::{Error, Result};

/// Relative finite-difference step: `h = FD_STEP * max(1, |x|)`, the usual
/// cube-root-of-epsilon compromise between truncation and roundoff for
/// 3-point central differences.
pub(crate) const FD_STEP: f64 = 6.055_454_452_393_343e-6; // eps^(1/3)

/// Step for the 5-point (fourth-order) stencil in [`partial`]; the wider
/// step keeps solver noise from the coordinate re-inversions harmless.
pub(crate) const FD_STEP_WIDE: f64 = 7.4e-4; // ~eps^(1/5)

/// Which engine produces first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivMode {
    Analytic,
    DualNumber,
    CentralDifference,
}

impl DerivMode {
    pub fn all() -> [DerivMode; 3] {
        [DerivMode::Analytic, DerivMode::DualNumber, DerivMode::CentralDifference]
    }

    /// The agreement tolerance appropriate for residuals computed with this
    /// engine.
    pub fn residual_tolerance(self, tol: &Tolerances) -> f64 {
        match self {
            DerivMode::Analytic | DerivMode::DualNumber => tol.deriv_rel,
            DerivMode::CentralDifference => Tolerances::FD_DERIV_REL,
        }
    }
}

impl std::fmt::Display for DerivMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DerivMode::Analytic => "analytic",
            DerivMode::DualNumber => "dual_number",
            DerivMode::CentralDifference => "central_difference",
        };
        f.write_str(s)
    }
}

/// The five scalar state quantities partials can be taken of or against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Entropy,
    Volume,
    Temperature,
    Pressure,
    Energy,
}

impl Quantity {
    pub fn label(self) -> &'static str {
        match self {
            Quantity::Entropy => "S",
            Quantity::Volume => "V",
            Quantity::Temperature => "T",
            Quantity::Pressure => "P",
            Quantity::Energy => "U",
        }
    }

    /// Value at a point of the fundamental chart.
    pub fn value(self, model: &dyn eos::Eos, s: f64, v: f64) -> f64 {
        match self {
            Quantity::Entropy => s,
            Quantity::Volume => v,
            Quantity::Temperature => model.temperature(s, v),
            Quantity::Pressure => model.pressure(s, v),
            Quantity::Energy => model.energy(s, v),
        }
    }

    /// Gradient with respect to `(S, V)` under the chosen engine.
    ///
    /// For `Energy` the analytic engine returns the model's *claimed*
    /// `(T, -P)`; the other two differentiate the fundamental relation
    /// itself. A model whose state equations do not derive from its energy
    /// (the corrupted negative control) therefore shows up as a discrepancy
    /// between engines — by design.
    pub fn grad(self, model: &dyn eos::Eos, s: f64, v: f64, mode: DerivMode) -> (f64, f64) {
        match (self, mode) {
            (Quantity::Entropy, _) => (1.0, 0.0),
            (Quantity::Volume, _) => (0.0, 1.0),
            (Quantity::Temperature, DerivMode::Analytic) => model.temperature_grad(s, v),
            (Quantity::Pressure, DerivMode::Analytic) => model.pressure_grad(s, v),
            (Quantity::Energy, DerivMode::Analytic) => {
                (model.temperature(s, v), -model.pressure(s, v))
            }
            (Quantity::Temperature, DerivMode::DualNumber) => {
                model.temperature_jet(s, v).gradient()
            }
            (Quantity::Pressure, DerivMode::DualNumber) => model.pressure_jet(s, v).gradient(),
            (Quantity::Energy, DerivMode::DualNumber) => model.energy_jet(s, v).gradient(),
            (q, DerivMode::CentralDifference) => {
                let f = |s: f64, v: f64| q.value(model, s, v);
                central_grad(&f, s, v)
            }
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// 3-point central-difference gradient in the fundamental chart.
pub(crate) fn central_grad(f: &dyn Fn(f64, f64) -> f64, s: f64, v: f64) -> (f64, f64) {
    let hs = FD_STEP * s.abs().max(1.0);
    let hv = FD_STEP * v.abs().max(1.0);
    // Evaluate the step actually representable in floating point.
    let (sp, sm) = (s + hs, s - hs);
    let (vp, vm) = (v + hv, v - hv);
    ((f(sp, v) - f(sm, v)) / (sp - sm), (f(s, vp) - f(s, vm)) / (vp - vm))
}

fn det2(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn norm2(a: (f64, f64)) -> f64 {
    (a.0 * a.0 + a.1 * a.1).sqrt()
}

/// Maps an unordered quantity pair to the chart it spans. The flag reports
/// whether `x` is the chart's *first* coordinate.
fn chart_of_pair(x: Quantity, y: Quantity) -> Result<(Chart, bool)> {
    use Quantity::*;
    match (x, y) {
        (Entropy, Volume) => Ok((Chart::SV, true)),
        (Volume, Entropy) => Ok((Chart::SV, false)),
        (Temperature, Volume) => Ok((Chart::TV, true)),
        (Volume, Temperature) => Ok((Chart::TV, false)),
        (Temperature, Pressure) => Ok((Chart::TP, true)),
        (Pressure, Temperature) => Ok((Chart::TP, false)),
        (Entropy, Pressure) => Ok((Chart::SP, true)),
        (Pressure, Entropy) => Ok((Chart::SP, false)),
        _ => Err(Error::UnsupportedChart { x: x.label(), y: y.label() }),
    }
}

/// The quantities spanning a chart, in chart order.
pub(crate) fn chart_quantities(chart: Chart) -> (Quantity, Quantity) {
    match chart {
        Chart::SV => (Quantity::Entropy, Quantity::Volume),
        Chart::TV => (Quantity::Temperature, Quantity::Volume),
        Chart::TP => (Quantity::Temperature, Quantity::Pressure),
        Chart::SP => (Quantity::Entropy, Quantity::Pressure),
    }
}

/// Jacobian determinant ratio `d(A,B) / d(X,Y)` at `(s, v)`: the determinant
/// of the 2x2 matrix of partials of `(A, B)` with respect to the chart
/// spanned by `(X, Y)`. Antisymmetric in both pairs.
pub fn wedge_ratio(
    model: &dyn eos::Eos,
    num: (Quantity, Quantity),
    den: (Quantity, Quantity),
    s: f64,
    v: f64,
    mode: DerivMode,
) -> Result<f64> {
    let ga = num.0.grad(model, s, v, mode);
    let gb = num.1.grad(model, s, v, mode);
    let gx = den.0.grad(model, s, v, mode);
    let gy = den.1.grad(model, s, v, mode);
    let num_det = det2(ga, gb);
    let den_det = det2(gx, gy);
    if !(num_det.is_finite() && den_det.is_finite()) {
        return Err(Error::OutOfDomain {
            s,
            v,
            reason: "derivative evaluation produced a non-finite Jacobian".into(),
        });
    }
    let scale = norm2(gx) * norm2(gy);
    if den_det.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularChart { x: den.0.label(), y: den.1.label(), s, v });
    }
    Ok(num_det / den_det)
}

/// Partial derivative `(d num / d wrt)` holding `holding` constant, at the
/// state `(s, v)`.
///
/// The analytic and dual engines form the Jacobian ratio
/// `d(num, holding) / d(wrt, holding)`. The central-difference engine instead
/// steps the chart coordinate itself and Newton-inverts back to the
/// fundamental chart at each stencil point — an independent route that
/// exercises the coordinate change for real.
#[allow(clippy::too_many_arguments)]
pub fn partial(
    model: &dyn eos::Eos,
    num: Quantity,
    wrt: Quantity,
    holding: Quantity,
    s: f64,
    v: f64,
    mode: DerivMode,
    tol: &Tolerances,
) -> Result<f64> {
    let (chart, wrt_is_c1) = chart_of_pair(wrt, holding)?;
    match mode {
        DerivMode::Analytic | DerivMode::DualNumber => {
            wedge_ratio(model, (num, holding), (wrt, holding), s, v, mode)
        }
        DerivMode::CentralDifference => {
            let (x1, x2) = eos::chart_values(model, chart, s, v);
            let x = if wrt_is_c1 { x1 } else { x2 };
            // T, P and V are positive and scale multiplicatively, so the
            // step tracks the coordinate; S is additive with an O(1) scale.
            let scale = match wrt {
                Quantity::Entropy => x.abs().max(1.0),
                _ => x.abs().max(1e-3),
            };
            let h = FD_STEP_WIDE * scale;
            let at = |xs: f64| -> Result<f64> {
                let (n1, n2) = if wrt_is_c1 { (xs, x2) } else { (x1, xs) };
                let (ns, nv) = eos::invert_near(model, chart, n1, n2, (s, v), tol)?;
                Ok(num.value(model, ns, nv))
            };
            let f = [at(x - 2.0 * h)?, at(x - h)?, at(x + h)?, at(x + 2.0 * h)?];
            Ok((f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h))
        }
    }
}

/// Partial derivative of a caller-supplied scalar field `f(S, V)` along one
/// coordinate of the chart spanned by `(wrt, holding)`. Supply `grad_f` when
/// an analytic gradient exists; otherwise `f` is centrally differenced in the
/// fundamental chart and the chart change is still done analytically.
pub fn partial_of(
    model: &dyn eos::Eos,
    f: &dyn Fn(f64, f64) -> f64,
    grad_f: Option<&dyn Fn(f64, f64) -> (f64, f64)>,
    wrt: Quantity,
    holding: Quantity,
    s: f64,
    v: f64,
) -> Result<f64> {
    chart_of_pair(wrt, holding)?;
    let gf = match grad_f {
        Some(g) => g(s, v),
        None => central_grad(f, s, v),
    };
    let gx = wrt.grad(model, s, v, DerivMode::Analytic);
    let gy = holding.grad(model, s, v, DerivMode::Analytic);
    let den = det2(gx, gy);
    if den.abs() <= 1e-12 * (norm2(gx) * norm2(gy)).max(f64::MIN_POSITIVE) {
        return Err(Error::SingularChart { x: wrt.label(), y: holding.label(), s, v });
    }
    Ok(det2(gf, gy) / den)
}

type CoeffFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// A differential 1-form `f1 dc1 + f2 dc2` on one of the four charts.
///
/// Components are stored as functions of the *fundamental* coordinates
/// `(S, V)` regardless of the chart, which keeps evaluation along
/// entropy-volume paths direct; the chart only fixes which basis covectors
/// the components multiply.
#[derive(Clone)]
pub struct OneForm {
    model: EosRef,
    chart: Chart,
    label: String,
    comp1: CoeffFn,
    comp2: CoeffFn,
    grad1: Option<GradFn>,
    grad2: Option<GradFn>,
}

impl std::fmt::Debug for OneForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OneForm")
            .field("label", &self.label)
            .field("chart", &self.chart)
            .field("model", &self.model.name())
            .finish()
    }
}

impl OneForm {
    /// The differential of the fundamental relation: `T dS - P dV`.
    pub fn du(model: &EosRef) -> OneForm {
        let (m1, m2, g1, g2) = (model.clone(), model.clone(), model.clone(), model.clone());
        OneForm {
            model: model.clone(),
            chart: Chart::SV,
            label: "T dS - P dV".into(),
            comp1: Arc::new(move |s, v| m1.temperature(s, v)),
            comp2: Arc::new(move |s, v| -m2.pressure(s, v)),
            grad1: Some(Arc::new(move |s, v| g1.temperature_grad(s, v))),
            grad2: Some(Arc::new(move |s, v| {
                let (ps, pv) = g2.pressure_grad(s, v);
                (-ps, -pv)
            })),
        }
    }

    /// The heat form `T dS`.
    pub fn heat(model: &EosRef) -> OneForm {
        let (m1, g1) = (model.clone(), model.clone());
        OneForm {
            model: model.clone(),
            chart: Chart::SV,
            label: "T dS".into(),
            comp1: Arc::new(move |s, v| m1.temperature(s, v)),
            comp2: Arc::new(|_, _| 0.0),
            grad1: Some(Arc::new(move |s, v| g1.temperature_grad(s, v))),
            grad2: Some(Arc::new(|_, _| (0.0, 0.0))),
        }
    }

    /// The work form `P dV` (the mechanical half of `dU = T dS - P dV`,
    /// taken with the sign of work done *by* the system; it is not exact,
    /// which the variational contrast checks rely on).
    pub fn work(model: &EosRef) -> OneForm {
        let (m2, g2) = (model.clone(), model.clone());
        OneForm {
            model: model.clone(),
            chart: Chart::SV,
            label: "P dV".into(),
            comp1: Arc::new(|_, _| 0.0),
            comp2: Arc::new(move |s, v| m2.pressure(s, v)),
            grad1: Some(Arc::new(|_, _| (0.0, 0.0))),
            grad2: Some(Arc::new(move |s, v| g2.pressure_grad(s, v))),
        }
    }

    /// A form with arbitrary component functions of `(S, V)`; derivatives of
    /// the components fall back to central differences unless
    /// [`OneForm::with_grads`] supplies them.
    pub fn from_fns(
        model: &EosRef,
        chart: Chart,
        label: impl Into<String>,
        comp1: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        comp2: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> OneForm {
        OneForm {
            model: model.clone(),
            chart,
            label: label.into(),
            comp1: Arc::new(comp1),
            comp2: Arc::new(comp2),
            grad1: None,
            grad2: None,
        }
    }

    /// Attaches analytic component gradients (with respect to `(S, V)`).
    pub fn with_grads(
        mut self,
        grad1: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
        grad2: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    ) -> OneForm {
        self.grad1 = Some(Arc::new(grad1));
        self.grad2 = Some(Arc::new(grad2));
        self
    }

    /// Polynomial 1-form `p1 dS + p2 dV` with exact component gradients.
    pub fn from_polys(model: &EosRef, p1: &Poly2, p2: &Poly2) -> OneForm {
        let (e1, e2) = (*p1, *p2);
        let (d1s, d1v) = (p1.ds(), p1.dv());
        let (d2s, d2v) = (p2.ds(), p2.dv());
        OneForm {
            model: model.clone(),
            chart: Chart::SV,
            label: "polynomial dS + polynomial dV".into(),
            comp1: Arc::new(move |s, v| e1.eval(s, v)),
            comp2: Arc::new(move |s, v| e2.eval(s, v)),
            grad1: Some(Arc::new(move |s, v| (d1s.eval(s, v), d1v.eval(s, v)))),
            grad2: Some(Arc::new(move |s, v| (d2s.eval(s, v), d2v.eval(s, v)))),
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn model(&self) -> &EosRef {
        &self.model
    }

    /// Component values `(f1, f2)` at a fundamental-chart point.
    pub fn components(&self, s: f64, v: f64) -> (f64, f64) {
        ((self.comp1)(s, v), (self.comp2)(s, v))
    }

    /// Component gradients with respect to `(S, V)`: analytic when attached,
    /// central differences otherwise.
    fn component_grads(&self, s: f64, v: f64) -> ((f64, f64), (f64, f64)) {
        let g1 = match &self.grad1 {
            Some(g) => g(s, v),
            None => central_grad(&|a, b| (self.comp1)(a, b), s, v),
        };
        let g2 = match &self.grad2 {
            Some(g) => g(s, v),
            None => central_grad(&|a, b| (self.comp2)(a, b), s, v),
        };
        (g1, g2)
    }
}

/// A 2-form `coeff dc1 ^ dc2`, with the coefficient stored as a function of
/// the fundamental coordinates.
#[derive(Clone)]
pub struct TwoForm {
    model: EosRef,
    chart: Chart,
    label: String,
    coeff: CoeffFn,
}

impl std::fmt::Debug for TwoForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TwoForm")
            .field("label", &self.label)
            .field("chart", &self.chart)
            .field("model", &self.model.name())
            .finish()
    }
}

impl TwoForm {
    pub fn from_fn(
        model: &EosRef,
        chart: Chart,
        label: impl Into<String>,
        coeff: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> TwoForm {
        TwoForm { model: model.clone(), chart, label: label.into(), coeff: Arc::new(coeff) }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn model(&self) -> &EosRef {
        &self.model
    }

    /// Coefficient of `dc1 ^ dc2` at a fundamental-chart point.
    pub fn coeff_at(&self, s: f64, v: f64) -> f64 {
        (self.coeff)(s, v)
    }
}

/// Exterior derivative: `d(f1 dc1 + f2 dc2) = (df2/dc1 - df1/dc2) dc1 ^ dc2`,
/// the partials taken holding the other chart coordinate fixed.
///
/// On the fundamental chart this is literally `df2/dS - df1/dV`; on the other
/// charts the component gradients are pushed through the coordinate change
/// with analytic chart Jacobians.
pub fn exterior_derivative(form: &OneForm) -> TwoForm {
    let form = form.clone();
    let model = form.model.clone();
    let chart = form.chart;
    let label = format!("d({})", form.label);
    let coeff = move |s: f64, v: f64| -> f64 {
        let (g1, g2) = form.component_grads(s, v);
        match chart {
            Chart::SV => g2.0 - g1.1,
            _ => {
                let (q1, q2) = chart_quantities(chart);
                let gc1 = q1.grad(form.model.as_ref(), s, v, DerivMode::Analytic);
                let gc2 = q2.grad(form.model.as_ref(), s, v, DerivMode::Analytic);
                let jac = det2(gc1, gc2);
                // (df2/dc1)|c2 + (-(df1/dc2)|c1), both as Jacobian ratios
                // over the same chart determinant.
                (det2(g2, gc2) + det2(g1, gc1)) / jac
            }
        }
    };
    TwoForm { model, chart, label, coeff: Arc::new(coeff) }
}

/// Dense bivariate polynomial of degree at most 3 in each variable; the
/// random Green's-theorem checks draw these because their exterior
/// derivatives are exact polynomials too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poly2 {
    /// `coeffs[i][j]` multiplies `s^i v^j`.
    pub coeffs: [[f64; 4]; 4],
}

impl Poly2 {
    pub fn zero() -> Poly2 {
        Poly2 { coeffs: [[0.0; 4]; 4] }
    }

    pub fn constant(c: f64) -> Poly2 {
        let mut p = Poly2::zero();
        p.coeffs[0][0] = c;
        p
    }

    pub fn eval(&self, s: f64, v: f64) -> f64 {
        // Horner in s of Horner-in-v rows.
        let mut acc = 0.0;
        for i in (0..4).rev() {
            let row = self.coeffs[i];
            let mut rv = 0.0;
            for j in (0..4).rev() {
                rv = rv * v + row[j];
            }
            acc = acc * s + rv;
        }
        acc
    }

    /// Partial derivative in the first variable.
    pub fn ds(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for i in 1..4 {
            for j in 0..4 {
                p.coeffs[i - 1][j] = self.coeffs[i][j] * i as f64;
            }
        }
        p
    }

    /// Partial derivative in the second variable.
    pub fn dv(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for i in 0..4 {
            for j in 1..4 {
                p.coeffs[i][j - 1] = self.coeffs[i][j] * j as f64;
            }
        }
        p
    }

    /// Random polynomial with total degree at most `max_degree` and
    /// coefficients uniform in `[-scale, scale]`.
    pub fn random<R: Rng>(rng: &mut R, max_degree: usize, scale: f64) -> Poly2 {
        let mut p = Poly2::zero();
        for i in 0..4 {
            for j in 0..4 {
                if i + j <= max_degree.min(3) {
                    p.coeffs[i][j] = rng.gen_range(-scale..=scale);
                }
            }
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{CorruptedPressure, IdealGas, VanDerWaals};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ideal() -> EosRef {
        Arc::new(IdealGas::new())
    }

    fn vdw() -> EosRef {
        Arc::new(VanDerWaals::new(0.1, 0.05).unwrap())
    }

    #[test]
    fn adiabatic_temperature_volume_slope() {
        // (dT/dV) at constant S is -4/9 at the reference point, on every
        // engine.
        let m = ideal();
        let tol = Tolerances::default();
        for mode in DerivMode::all() {
            let d = partial(
                m.as_ref(),
                Quantity::Temperature,
                Quantity::Volume,
                Quantity::Entropy,
                0.0,
                1.0,
                mode,
                &tol,
            )
            .unwrap();
            let budget = if mode == DerivMode::CentralDifference { 1e-8 } else { 1e-12 };
            assert_relative_eq!(d, -4.0 / 9.0, epsilon = budget, max_relative = budget);
        }
    }

    #[test]
    fn isothermal_entropy_volume_slope_is_inverse_volume() {
        // (dS/dV) at constant T equals 1/V for the ideal gas; check at V = 2.
        let m = ideal();
        let tol = Tolerances::default();
        let s = 2.0f64.ln(); // so that T = 2/3 there, any S works
        for mode in DerivMode::all() {
            let d = partial(
                m.as_ref(),
                Quantity::Entropy,
                Quantity::Volume,
                Quantity::Temperature,
                s,
                2.0,
                mode,
                &tol,
            )
            .unwrap();
            let budget = if mode == DerivMode::CentralDifference { 1e-8 } else { 1e-12 };
            assert_relative_eq!(d, 0.5, epsilon = budget, max_relative = budget);
        }
    }

    #[test]
    fn derivative_of_constant_field_vanishes() {
        let m = ideal();
        let f = |_: f64, _: f64| 42.0;
        let d = partial_of(
            m.as_ref(),
            &f,
            None,
            Quantity::Volume,
            Quantity::Temperature,
            0.3,
            1.4,
        )
        .unwrap();
        assert_relative_eq!(d, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn unsupported_pairs_are_rejected() {
        let m = ideal();
        let tol = Tolerances::default();
        match partial(
            m.as_ref(),
            Quantity::Energy,
            Quantity::Temperature,
            Quantity::Entropy,
            0.0,
            1.0,
            DerivMode::Analytic,
            &tol,
        ) {
            Err(Error::UnsupportedChart { .. }) => {}
            other => panic!("expected UnsupportedChart, got {other:?}"),
        }
    }

    #[test]
    fn wedge_identity_and_antisymmetry() {
        let m = ideal();
        let ts = (Quantity::Temperature, Quantity::Entropy);
        let st = (Quantity::Entropy, Quantity::Temperature);
        let r = wedge_ratio(m.as_ref(), ts, ts, 0.4, 1.7, DerivMode::Analytic).unwrap();
        assert_relative_eq!(r, 1.0, max_relative = 1e-14);
        let r = wedge_ratio(m.as_ref(), ts, st, 0.4, 1.7, DerivMode::Analytic).unwrap();
        assert_relative_eq!(r, -1.0, max_relative = 1e-14);
    }

    #[test]
    fn wedge_ratios_at_reference_point() {
        // d(T,S)/d(V,S) = d(P,V)/d(V,S) = -4/9 at (0,1): the first Maxwell
        // case written as Jacobians.
        let m = ideal();
        let vs = (Quantity::Volume, Quantity::Entropy);
        let lhs = wedge_ratio(
            m.as_ref(),
            (Quantity::Temperature, Quantity::Entropy),
            vs,
            0.0,
            1.0,
            DerivMode::Analytic,
        )
        .unwrap();
        let rhs = wedge_ratio(
            m.as_ref(),
            (Quantity::Pressure, Quantity::Volume),
            vs,
            0.0,
            1.0,
            DerivMode::Analytic,
        )
        .unwrap();
        assert_relative_eq!(lhs, -4.0 / 9.0, max_relative = 1e-13);
        assert_relative_eq!(rhs, -4.0 / 9.0, max_relative = 1e-13);
    }

    #[test]
    fn jacobian_chain_rule_inverts() {
        // d(A,B)/d(X,Y) * d(X,Y)/d(A,B) = 1 wherever both are defined.
        let models = [ideal(), vdw()];
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let ab = (Quantity::Temperature, Quantity::Entropy);
        let xy = (Quantity::Pressure, Quantity::Volume);
        for m in &models {
            for _ in 0..50 {
                let (s, v) = m.domain().sample(&mut rng);
                let fwd = wedge_ratio(m.as_ref(), ab, xy, s, v, DerivMode::Analytic).unwrap();
                let bwd = wedge_ratio(m.as_ref(), xy, ab, s, v, DerivMode::Analytic).unwrap();
                assert_relative_eq!(fwd * bwd, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn engines_agree_on_partials() {
        // dual vs analytic to 1e-12 relative; central difference vs dual to
        // 1e-5 relative.
        let models = [ideal(), vdw()];
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cases = [
            (Quantity::Temperature, Quantity::Volume, Quantity::Entropy),
            (Quantity::Entropy, Quantity::Volume, Quantity::Temperature),
            (Quantity::Volume, Quantity::Temperature, Quantity::Pressure),
            (Quantity::Energy, Quantity::Entropy, Quantity::Volume),
        ];
        for m in &models {
            for _ in 0..10 {
                let (s, v) = m.domain().sample(&mut rng);
                for (num, wrt, holding) in cases {
                    let get = |mode| {
                        partial(m.as_ref(), num, wrt, holding, s, v, mode, &tol).unwrap()
                    };
                    let an = get(DerivMode::Analytic);
                    let du = get(DerivMode::DualNumber);
                    let fd = get(DerivMode::CentralDifference);
                    assert_relative_eq!(an, du, max_relative = 1e-12, epsilon = 1e-12);
                    assert_relative_eq!(du, fd, max_relative = 1e-5, epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn du_form_is_closed_and_heat_work_split() {
        let m = ideal();
        let d_du = exterior_derivative(&OneForm::du(&m));
        let d_heat = exterior_derivative(&OneForm::heat(&m));
        let d_work = exterior_derivative(&OneForm::work(&m));
        assert_relative_eq!(d_du.coeff_at(0.0, 1.0), 0.0, epsilon = 1e-13);
        assert_relative_eq!(d_heat.coeff_at(0.0, 1.0), 4.0 / 9.0, max_relative = 1e-13);
        assert_relative_eq!(d_work.coeff_at(0.0, 1.0), 4.0 / 9.0, max_relative = 1e-13);
        // The split is exact pointwise: d(heat) - d(work) = d(dU) = 0.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..25 {
            let (s, v) = m.domain().sample(&mut rng);
            assert_relative_eq!(
                d_heat.coeff_at(s, v) - d_work.coeff_at(s, v),
                0.0,
                epsilon = 1e-12
            );
            assert_relative_eq!(d_du.coeff_at(s, v), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn corrupted_model_has_nonzero_curl() {
        // d(T dS - P' dV) with P' = P + S has coefficient -(dP'/dS - ...) =
        // exactly -1 for the wrapped ideal gas.
        let bad: EosRef = Arc::new(CorruptedPressure::new(ideal()));
        let d = exterior_derivative(&OneForm::du(&bad));
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..25 {
            let (s, v) = bad.domain().sample(&mut rng);
            assert_relative_eq!(d.coeff_at(s, v), -1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn fd_fallback_matches_analytic_grads() {
        // The same form with and without attached gradients: exterior
        // derivatives agree to finite-difference accuracy.
        let m = ideal();
        let with = OneForm::du(&m);
        let m1 = m.clone();
        let m2 = m.clone();
        let without = OneForm::from_fns(
            &m,
            Chart::SV,
            "T dS - P dV (no grads)",
            move |s, v| m1.temperature(s, v),
            move |s, v| -m2.pressure(s, v),
        );
        let dw = exterior_derivative(&with);
        let dwo = exterior_derivative(&without);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..20 {
            let (s, v) = m.domain().sample(&mut rng);
            assert_relative_eq!(dw.coeff_at(s, v), dwo.coeff_at(s, v), epsilon = 1e-6);
        }
    }

    #[test]
    fn polynomial_form_derivatives_are_exact() {
        let m = ideal();
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let p1 = Poly2::random(&mut rng, 3, 1.0);
        let p2 = Poly2::random(&mut rng, 3, 1.0);
        let form = OneForm::from_polys(&m, &p1, &p2);
        let d = exterior_derivative(&form);
        for _ in 0..20 {
            let (s, v) = m.domain().sample(&mut rng);
            let expected = p2.ds().eval(s, v) - p1.dv().eval(s, v);
            assert_relative_eq!(d.coeff_at(s, v), expected, max_relative = 1e-13, epsilon = 1e-13);
        }
    }

    #[test]
    fn poly_eval_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let p = Poly2::random(&mut rng, 3, 2.0);
        let (s, v) = (0.7f64, 1.9f64);
        let mut naive = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                naive += p.coeffs[i][j] * s.powi(i as i32) * v.powi(j as i32);
            }
        }
        assert_relative_eq!(p.eval(s, v), naive, max_relative = 1e-13);
        assert_relative_eq!(Poly2::constant(3.5).eval(s, v), 3.5);
        assert_relative_eq!(Poly2::constant(3.5).ds().eval(s, v), 0.0);
    }

    #[test]
    fn exterior_derivative_on_the_temperature_volume_chart() {
        // On the TV chart the Helmholtz differential is -S dT - P dV; its
        // exterior derivative must vanish for a consistent model. Closed
        // form: coeff = (-dP/dT|_V + dS/dV|_T) = 0 by the second Maxwell
        // case.
        let m = ideal();
        let m2 = m.clone();
        let form = OneForm::from_fns(
            &m,
            Chart::TV,
            "-S dT - P dV",
            |s, _| -s,
            move |s, v| -m2.pressure(s, v),
        );
        let d = exterior_derivative(&form);
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..20 {
            let (s, v) = m.domain().sample(&mut rng);
            assert_relative_eq!(d.coeff_at(s, v), 0.0, epsilon = 2e-5);
        }
    }
}
