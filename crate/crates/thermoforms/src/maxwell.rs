//! The four Maxwell relations, each checked by two independent routes, and
//! the Legendre-transformed potentials they descend from.
//!
//! Every relation is one coordinate expression of the single statement
//! `dT ^ dS = dP ^ dV`. The *wedge route* evaluates both sides as Jacobian
//! determinant ratios against the relation's own chart. The *partials route*
//! evaluates the two stated partial derivatives separately and subtracts.
//! With the central-difference engine the partials route steps the chart
//! coordinates and Newton-inverts back, so the two routes share no
//! derivative code.

use crate::calculus::{exterior_derivative, partial, wedge_ratio, DerivMode, OneForm, Quantity};
use crate::chart::{Chart, Tolerances};
use crate::eos::{Eos, EosRef};
use crate::error::Result;
use crate::lagrangian;

/// One of the four Maxwell relations, named for the thermodynamic potential
/// whose second derivatives it equates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxwellCase {
    /// `(dT/dV)_S = -(dP/dS)_V`, from the internal energy `U(S, V)`.
    InternalEnergy,
    /// `(dS/dV)_T = (dP/dT)_V`, from the Helmholtz energy `F(T, V)`.
    Helmholtz,
    /// `-(dS/dP)_T = (dV/dT)_P`, from the Gibbs energy `G(T, P)`.
    Gibbs,
    /// `(dT/dP)_S = (dV/dS)_P`, from the enthalpy `H(S, P)`.
    Enthalpy,
}

impl MaxwellCase {
    pub fn all() -> [MaxwellCase; 4] {
        [
            MaxwellCase::InternalEnergy,
            MaxwellCase::Helmholtz,
            MaxwellCase::Gibbs,
            MaxwellCase::Enthalpy,
        ]
    }

    /// Conventional 1-based index in the order `U, F, G, H`.
    pub fn index(self) -> usize {
        match self {
            MaxwellCase::InternalEnergy => 1,
            MaxwellCase::Helmholtz => 2,
            MaxwellCase::Gibbs => 3,
            MaxwellCase::Enthalpy => 4,
        }
    }

    pub fn from_index(i: usize) -> Option<MaxwellCase> {
        MaxwellCase::all().into_iter().find(|c| c.index() == i)
    }

    /// The relation in the form `lhs = rhs`.
    pub fn statement(self) -> &'static str {
        match self {
            MaxwellCase::InternalEnergy => "(dT/dV)_S = -(dP/dS)_V",
            MaxwellCase::Helmholtz => "(dS/dV)_T = (dP/dT)_V",
            MaxwellCase::Gibbs => "-(dS/dP)_T = (dV/dT)_P",
            MaxwellCase::Enthalpy => "(dT/dP)_S = (dV/dS)_P",
        }
    }

    /// The coordinate pair both sides are differentiated against.
    pub fn denominator(self) -> (Quantity, Quantity) {
        match self {
            MaxwellCase::InternalEnergy => (Quantity::Volume, Quantity::Entropy),
            MaxwellCase::Helmholtz => (Quantity::Temperature, Quantity::Volume),
            MaxwellCase::Gibbs => (Quantity::Pressure, Quantity::Temperature),
            MaxwellCase::Enthalpy => (Quantity::Pressure, Quantity::Entropy),
        }
    }

    pub fn potential(self) -> PotentialKind {
        match self {
            MaxwellCase::InternalEnergy => PotentialKind::InternalEnergy,
            MaxwellCase::Helmholtz => PotentialKind::Helmholtz,
            MaxwellCase::Gibbs => PotentialKind::Gibbs,
            MaxwellCase::Enthalpy => PotentialKind::Enthalpy,
        }
    }
}

impl std::fmt::Display for MaxwellCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.index(), self.statement())
    }
}

/// The relation's residual by the wedge route:
/// `d(T,S)/d(X,Y) - d(P,V)/d(X,Y)` with `(X, Y)` the case's denominator
/// pair. Algebraically equal to `lhs - rhs` of the stated relation.
pub fn maxwell_residual(
    model: &dyn Eos,
    case: MaxwellCase,
    s: f64,
    v: f64,
    mode: DerivMode,
) -> Result<f64> {
    let den = case.denominator();
    let ts = wedge_ratio(model, (Quantity::Temperature, Quantity::Entropy), den, s, v, mode)?;
    let pv = wedge_ratio(model, (Quantity::Pressure, Quantity::Volume), den, s, v, mode)?;
    Ok(ts - pv)
}

/// The two sides of the stated relation, evaluated as separate partial
/// derivatives.
pub fn maxwell_sides(
    model: &dyn Eos,
    case: MaxwellCase,
    s: f64,
    v: f64,
    mode: DerivMode,
    tol: &Tolerances,
) -> Result<(f64, f64)> {
    use Quantity::{Entropy, Pressure, Temperature, Volume};
    let (lhs, rhs) = match case {
        MaxwellCase::InternalEnergy => (
            partial(model, Temperature, Volume, Entropy, s, v, mode, tol)?,
            -partial(model, Pressure, Entropy, Volume, s, v, mode, tol)?,
        ),
        MaxwellCase::Helmholtz => (
            partial(model, Entropy, Volume, Temperature, s, v, mode, tol)?,
            partial(model, Pressure, Temperature, Volume, s, v, mode, tol)?,
        ),
        MaxwellCase::Gibbs => (
            -partial(model, Entropy, Pressure, Temperature, s, v, mode, tol)?,
            partial(model, Volume, Temperature, Pressure, s, v, mode, tol)?,
        ),
        MaxwellCase::Enthalpy => (
            partial(model, Temperature, Pressure, Entropy, s, v, mode, tol)?,
            partial(model, Volume, Entropy, Pressure, s, v, mode, tol)?,
        ),
    };
    Ok((lhs, rhs))
}

/// One point's worth of evidence for one relation: both routes, both sides,
/// and the gap between the routes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MaxwellSample {
    pub case_index: usize,
    pub s: f64,
    pub v: f64,
    /// Left side of the stated relation (partials route).
    pub lhs: f64,
    /// Right side of the stated relation (partials route).
    pub rhs: f64,
    /// `lhs - rhs`.
    pub residual: f64,
    /// The same residual by the wedge route.
    pub residual_wedge: f64,
    /// `|residual - residual_wedge|`.
    pub route_gap: f64,
}

/// Evaluates one relation at one state by both routes.
pub fn maxwell_sample(
    model: &dyn Eos,
    case: MaxwellCase,
    s: f64,
    v: f64,
    mode: DerivMode,
    tol: &Tolerances,
) -> Result<MaxwellSample> {
    let (lhs, rhs) = maxwell_sides(model, case, s, v, mode, tol)?;
    let residual = lhs - rhs;
    let residual_wedge = maxwell_residual(model, case, s, v, mode)?;
    Ok(MaxwellSample {
        case_index: case.index(),
        s,
        v,
        lhs,
        rhs,
        residual,
        residual_wedge,
        route_gap: (residual - residual_wedge).abs(),
    })
}

/// A thermodynamic potential obtained from the internal energy by Legendre
/// transformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `U(S, V)`.
    InternalEnergy,
    /// `F(T, V) = U - T S`.
    Helmholtz,
    /// `H(S, P) = U + P V`.
    Enthalpy,
    /// `G(T, P) = U - T S + P V`.
    Gibbs,
}

impl PotentialKind {
    pub fn all() -> [PotentialKind; 4] {
        [
            PotentialKind::InternalEnergy,
            PotentialKind::Helmholtz,
            PotentialKind::Enthalpy,
            PotentialKind::Gibbs,
        ]
    }

    /// Single-letter symbol.
    pub fn label(self) -> &'static str {
        match self {
            PotentialKind::InternalEnergy => "U",
            PotentialKind::Helmholtz => "F",
            PotentialKind::Enthalpy => "H",
            PotentialKind::Gibbs => "G",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::InternalEnergy => "internal energy",
            PotentialKind::Helmholtz => "Helmholtz energy",
            PotentialKind::Enthalpy => "enthalpy",
            PotentialKind::Gibbs => "Gibbs energy",
        }
    }

    /// The chart of the potential's natural variables.
    pub fn natural_chart(self) -> Chart {
        match self {
            PotentialKind::InternalEnergy => Chart::SV,
            PotentialKind::Helmholtz => Chart::TV,
            PotentialKind::Enthalpy => Chart::SP,
            PotentialKind::Gibbs => Chart::TP,
        }
    }

    /// The Maxwell relation this potential generates.
    pub fn maxwell_case(self) -> MaxwellCase {
        match self {
            PotentialKind::InternalEnergy => MaxwellCase::InternalEnergy,
            PotentialKind::Helmholtz => MaxwellCase::Helmholtz,
            PotentialKind::Enthalpy => MaxwellCase::Enthalpy,
            PotentialKind::Gibbs => MaxwellCase::Gibbs,
        }
    }

    /// The potential's value at the fundamental state `(s, v)`, built from
    /// the model's state equations.
    pub fn value(self, model: &dyn Eos, s: f64, v: f64) -> f64 {
        let u = model.energy(s, v);
        match self {
            PotentialKind::InternalEnergy => u,
            PotentialKind::Helmholtz => u - model.temperature(s, v) * s,
            PotentialKind::Enthalpy => u + model.pressure(s, v) * v,
            PotentialKind::Gibbs => {
                u - model.temperature(s, v) * s + model.pressure(s, v) * v
            }
        }
    }

    /// The textbook first derivatives with respect to the natural variables:
    /// `(dU/dS, dU/dV) = (T, -P)`, `(dF/dT, dF/dV) = (-S, -P)`,
    /// `(dH/dS, dH/dP) = (T, V)`, `(dG/dT, dG/dP) = (-S, V)`.
    pub fn claimed_partials(self, model: &dyn Eos, s: f64, v: f64) -> (f64, f64) {
        match self {
            PotentialKind::InternalEnergy => (model.temperature(s, v), -model.pressure(s, v)),
            PotentialKind::Helmholtz => (-s, -model.pressure(s, v)),
            PotentialKind::Enthalpy => (model.temperature(s, v), v),
            PotentialKind::Gibbs => (-s, v),
        }
    }

    /// Numerical natural-variable partials of the potential's *value*
    /// minus [`PotentialKind::claimed_partials`]. The value is centrally
    /// differenced in the fundamental chart, so the claims are checked
    /// against the definition rather than against themselves.
    pub fn partial_residuals(self, model: &dyn Eos, s: f64, v: f64) -> Result<(f64, f64)> {
        use crate::calculus::{chart_quantities, partial_of};
        let (c1, c2) = chart_quantities(self.natural_chart());
        let f = |ss: f64, vv: f64| self.value(model, ss, vv);
        let d1 = partial_of(model, &f, None, c1, c2, s, v)?;
        let d2 = partial_of(model, &f, None, c2, c1, s, v)?;
        let (claim1, claim2) = self.claimed_partials(model, s, v);
        Ok((d1 - claim1, d2 - claim2))
    }

    /// The potential's natural differential as a 1-form on its natural
    /// chart, with analytic component gradients.
    pub fn one_form(self, model: &EosRef) -> OneForm {
        match self {
            PotentialKind::InternalEnergy => OneForm::du(model),
            PotentialKind::Helmholtz => {
                let m = model.clone();
                let g = model.clone();
                OneForm::from_fns(
                    model,
                    Chart::TV,
                    "-S dT - P dV",
                    |s, _| -s,
                    move |s, v| -m.pressure(s, v),
                )
                .with_grads(
                    |_, _| (-1.0, 0.0),
                    move |s, v| {
                        let (ps, pv) = g.pressure_grad(s, v);
                        (-ps, -pv)
                    },
                )
            }
            PotentialKind::Enthalpy => {
                let m = model.clone();
                let g = model.clone();
                OneForm::from_fns(
                    model,
                    Chart::SP,
                    "T dS + V dP",
                    move |s, v| m.temperature(s, v),
                    |_, v| v,
                )
                .with_grads(move |s, v| g.temperature_grad(s, v), |_, _| (0.0, 1.0))
            }
            PotentialKind::Gibbs => OneForm::from_fns(
                model,
                Chart::TP,
                "-S dT + V dP",
                |s, _| -s,
                |_, v| v,
            )
            .with_grads(|_, _| (-1.0, 0.0), |_, _| (0.0, 1.0)),
        }
    }
}

impl std::fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.label(), self.name())
    }
}

/// The Maxwell residual obtained by differentiating the potential's natural
/// 1-form: the exterior-derivative coefficient of `d(dPhi)`, signed to match
/// the stated relation of [`PotentialKind::maxwell_case`].
///
/// The internal-energy case delegates to the Lagrangian closure residual —
/// the same expression, underlining that the least-action closure condition
/// *is* the first Maxwell relation. The Gibbs and enthalpy statements use
/// the orientation opposite to their natural chart's `dc1 ^ dc2`, hence the
/// sign flips.
pub fn maxwell_from_potential(model: &EosRef, kind: PotentialKind, s: f64, v: f64) -> f64 {
    match kind {
        PotentialKind::InternalEnergy => {
            lagrangian::closure_residual(model.as_ref(), s, v, DerivMode::Analytic)
        }
        PotentialKind::Helmholtz => {
            exterior_derivative(&kind.one_form(model)).coeff_at(s, v)
        }
        PotentialKind::Gibbs | PotentialKind::Enthalpy => {
            -exterior_derivative(&kind.one_form(model)).coeff_at(s, v)
        }
    }
}
