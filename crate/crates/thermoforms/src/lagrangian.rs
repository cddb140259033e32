//! The internal energy as an action functional.
//!
//! Along a curve in the entropy-volume plane the energy change is the
//! integral of `T dS - P dV`. Viewing that integrand as a Lagrangian gives
//! two slope-form components,
//!
//! * `L_V(S, V, dS/dV) = T * dS/dV - P` on stretches parametrized by volume,
//! * `L_S(S, V, dV/dS) = T - P * dV/dS` on stretches parametrized by entropy,
//!
//! each of which integrates to the same energy change on a monotone stretch.
//! Their Euler-Lagrange equations both collapse to the mixed-derivative
//! identity `dT/dV + dP/dS = 0` (the closure relation), so "the action is
//! stationary at fixed endpoints" and "the first Maxwell relation holds" are
//! literally the same statement — which is what this module verifies.

use crate::calculus::DerivMode;
use crate::chart::{Chart, StatePoint, Tolerances};
use crate::eos::{Eos, EosRef};
use crate::error::{Error, Result};
use crate::paths::{line_integral, Path};
use crate::quad;

use crate::calculus::OneForm;

/// Volume-parametrized Lagrangian component `T * slope - P` with
/// `slope = dS/dV`.
pub fn lagrangian_v(model: &dyn Eos, s: f64, v: f64, slope: f64) -> f64 {
    model.temperature(s, v) * slope - model.pressure(s, v)
}

/// Entropy-parametrized Lagrangian component `T - P * slope` with
/// `slope = dV/dS`.
pub fn lagrangian_s(model: &dyn Eos, s: f64, v: f64, slope: f64) -> f64 {
    model.temperature(s, v) - model.pressure(s, v) * slope
}

/// Which slope-form component carries the integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlopeRoute {
    /// Integrate `L_V dV`; needs `dV/dt` bounded away from zero.
    VolumeParametrized,
    /// Integrate `L_S dS`; needs `dS/dt` bounded away from zero.
    EntropyParametrized,
}

/// The action `U[path] = integral of T dS - P dV`, via its own quadrature.
///
/// The same number is recomputed through the differential-form route and the
/// two are required to agree to the quadrature tolerance — a permanent
/// internal cross-check, not a test-only one.
pub fn action(model: &EosRef, path: &Path, tol: &Tolerances) -> Result<f64> {
    let n = path.pieces().len();
    let piece_tol = tol.quad_abs / n as f64;
    let mut total = 0.0;
    for piece in path.pieces() {
        let integrand = |t: f64| {
            let (s, v) = piece.point(t);
            let (ds, dv) = piece.velocity(t);
            let temp = model.temperature(s, v);
            let pres = model.pressure(s, v);
            temp * ds + (-pres) * dv
        };
        total += quad::adaptive(&integrand, 0.0, 1.0, piece_tol)?;
    }

    let via_form = line_integral(&OneForm::du(model), path, tol)?;
    if (total - via_form).abs() > 2.0 * tol.quad_abs {
        return Err(Error::CrossCheck {
            what: "action vs line integral of the energy differential".into(),
            lhs: total,
            rhs: via_form,
        });
    }
    Ok(total)
}

/// Verifies the path has a sign-definite, nonvanishing velocity in the
/// chosen coordinate; returns the common sign.
fn check_monotone(path: &Path, route: SlopeRoute) -> Result<f64> {
    let n = path.pieces().len();
    let mut sign = 0.0;
    for (i, piece) in path.pieces().iter().enumerate() {
        for j in 0..=128 {
            let t = j as f64 / 128.0;
            let (ds, dv) = piece.velocity(t);
            let d = match route {
                SlopeRoute::VolumeParametrized => dv,
                SlopeRoute::EntropyParametrized => ds,
            };
            let scale = ds.abs().max(dv.abs()).max(1.0);
            if d.abs() <= 1e-12 * scale || (sign != 0.0 && d.signum() != sign) {
                return Err(Error::NonMonotone { t: (i as f64 + t) / n as f64 });
            }
            sign = d.signum();
        }
    }
    Ok(sign)
}

/// The action computed through one slope-form component: `L_V dV` or
/// `L_S dS`. Agrees with [`action`] on monotone paths; the slope enters and
/// cancels numerically instead of being simplified away, so this is a
/// genuinely different evaluation.
pub fn action_via_component(
    model: &EosRef,
    path: &Path,
    route: SlopeRoute,
    tol: &Tolerances,
) -> Result<f64> {
    check_monotone(path, route)?;
    let n = path.pieces().len();
    let piece_tol = tol.quad_abs / n as f64;
    let mut total = 0.0;
    for piece in path.pieces() {
        let integrand = |t: f64| {
            let (s, v) = piece.point(t);
            let (ds, dv) = piece.velocity(t);
            match route {
                SlopeRoute::VolumeParametrized => {
                    lagrangian_v(model.as_ref(), s, v, ds / dv) * dv
                }
                SlopeRoute::EntropyParametrized => {
                    lagrangian_s(model.as_ref(), s, v, dv / ds) * ds
                }
            }
        };
        total += quad::adaptive(&integrand, 0.0, 1.0, piece_tol)?;
    }
    Ok(total)
}

/// The closure relation residual `dT/dV|_S + dP/dS|_V` at a point — the
/// obstruction to `T dS - P dV` being closed, and exactly the first Maxwell
/// case. Zero (to engine accuracy) iff the model's state equations derive
/// from a potential.
pub fn closure_residual(model: &dyn Eos, s: f64, v: f64, mode: DerivMode) -> f64 {
    use crate::calculus::Quantity;
    let (_, tv) = Quantity::Temperature.grad(model, s, v, mode);
    let (ps, _) = Quantity::Pressure.grad(model, s, v, mode);
    tv + ps
}

/// Euler-Lagrange residuals of the two slope-form components along a path at
/// global parameter `t`:
///
/// * volume equation: `dL_V/dS - d/dV (dL_V/d slope)`,
/// * entropy equation: `dL_S/dV - d/dS (dL_S/d slope)`.
///
/// The slope-dependent terms are computed literally and cancel numerically;
/// what survives is `-(dT/dV + dP/dS)` for the first equation and
/// `+(dT/dV + dP/dS)` for the second — the signed closure residual.
pub fn euler_lagrange_residuals(model: &dyn Eos, path: &Path, t: f64) -> Result<(f64, f64)> {
    let (s, v) = path.point(t);
    let (ds, dv) = path.velocity(t);
    let scale = ds.abs().max(dv.abs()).max(1.0);
    if dv.abs() <= 1e-12 * scale {
        return Err(Error::NonMonotone { t });
    }
    if ds.abs() <= 1e-12 * scale {
        return Err(Error::NonMonotone { t });
    }
    let (ts, tv) = model.temperature_grad(s, v);
    let (ps, pv) = model.pressure_grad(s, v);

    // Volume equation. dL_V/dS at fixed slope is T_S * slope - P_S; the
    // momentum dL_V/d(slope) is T, whose total V-derivative along the path
    // is (T_S ds + T_V dv) / dv.
    let slope_sv = ds / dv;
    let r_v = (ts * slope_sv - ps) - (ts * ds + tv * dv) / dv;

    // Entropy equation. dL_S/dV at fixed slope is T_V - P_V * slope; the
    // momentum is -P, with total S-derivative -(P_S ds + P_V dv) / ds.
    let slope_vs = dv / ds;
    let r_s = (tv - pv * slope_vs) + (ps * ds + pv * dv) / ds;

    Ok((r_v, r_s))
}

/// Residuals of the equilibrium-surface conditions `T = dU/dS` and
/// `-P = dU/dV` for claimed values `(t_claim, p_claim)`: returns
/// `(t_claim - dU/dS, p_claim + dU/dV)`. The energy derivatives come from
/// automatic differentiation of the fundamental relation, independent of the
/// model's claimed state equations, so an inconsistent claim cannot hide.
pub fn equilibrium_surface_residual(
    model: &dyn Eos,
    pt: &StatePoint,
    t_claim: f64,
    p_claim: f64,
) -> Result<(f64, f64)> {
    if pt.chart() != Chart::SV {
        return Err(Error::ChartMismatch { expected: "SV", got: pt.chart().name() });
    }
    let (s, v) = pt.coords();
    if !model.in_hard_domain(s, v) {
        return Err(Error::OutOfDomain { s, v, reason: "equilibrium-surface check".into() });
    }
    let jet = model.energy_jet(s, v);
    let (us, uv) = jet.gradient();
    Ok((t_claim - us, p_claim + uv))
}

/// One fixed-endpoint perturbation outcome.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VariationalResult {
    /// Action (or form integral) along the base path.
    pub action_before: f64,
    /// The same integral along the perturbed path.
    pub action_after: f64,
    /// `action_after - action_before`, computed exactly in that order.
    pub delta: f64,
    /// Largest pointwise distance between perturbed and base paths.
    pub perturbation_amplitude: f64,
}

/// Integrates an arbitrary 1-form along the base path and every family
/// member, reporting the fixed-endpoint variation of each. The family must
/// share the base path's endpoints (to within roundoff); exact forms give
/// `delta` at quadrature-noise level, non-exact forms give `delta` of the
/// order of the perturbation.
pub fn form_variation(
    form: &OneForm,
    base: &Path,
    family: &[Path],
    tol: &Tolerances,
) -> Result<Vec<VariationalResult>> {
    let (a, b) = base.endpoints();
    let scale = a.0.abs().max(a.1.abs()).max(b.0.abs()).max(b.1.abs()).max(1.0);
    for p in family {
        let (pa, pb) = p.endpoints();
        let gap = (pa.0 - a.0)
            .abs()
            .max((pa.1 - a.1).abs())
            .max((pb.0 - b.0).abs())
            .max((pb.1 - b.1).abs());
        if gap > 1e-12 * scale {
            return Err(Error::Config(format!(
                "perturbed path endpoints differ from the base path by {gap:e}"
            )));
        }
    }
    let before = line_integral(form, base, tol)?;
    let mut out = Vec::with_capacity(family.len());
    for p in family {
        let after = line_integral(form, p, tol)?;
        out.push(VariationalResult {
            action_before: before,
            action_after: after,
            delta: after - before,
            perturbation_amplitude: p.max_deflection(base, 201),
        });
    }
    Ok(out)
}

/// Fixed-endpoint variation of the *action* (the energy differential):
/// the least-action statement `delta U = 0` checked against an explicit
/// perturbation family.
pub fn variational_check(
    model: &EosRef,
    base: &Path,
    family: &[Path],
    tol: &Tolerances,
) -> Result<Vec<VariationalResult>> {
    form_variation(&OneForm::du(model), base, family, tol)
}
