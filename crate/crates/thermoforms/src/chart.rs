//! Coordinate charts on the two-dimensional equilibrium state space, plus the
//! tolerance policy shared by every solver and integrator in the crate.
//!
//! Everything is expressed in reduced units: `N*kB = 1`, so the ideal-gas law
//! reads `P V = T` and entropy, volume, temperature, pressure and energy are
//! all dimensionless. Entropy carries a free additive offset and may be
//! negative; volume and temperature must stay strictly positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The unit convention, kept as a string so reports can embed it verbatim.
pub const REDUCED_UNITS: &str = "NkB=1; S,V,T,P,U dimensionless";

/// Returns the reduced-unit convention used by every model in the crate.
pub fn reduced_units_doc() -> &'static str {
    REDUCED_UNITS
}

/// The four coordinate charts in which state points are expressed.
///
/// `SV` is the fundamental chart (models are defined by `U(S, V)`); the other
/// three are reached by Newton inversion of the state equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    /// Entropy-volume, the natural chart of the internal energy.
    SV,
    /// Temperature-volume, the natural chart of the Helmholtz energy.
    TV,
    /// Temperature-pressure, the natural chart of the Gibbs energy.
    TP,
    /// Entropy-pressure, the natural chart of the enthalpy.
    SP,
}

impl Chart {
    pub fn all() -> [Chart; 4] {
        [Chart::SV, Chart::TV, Chart::TP, Chart::SP]
    }

    /// Static chart name, e.g. `"TV"`.
    pub fn name(self) -> &'static str {
        match self {
            Chart::SV => "SV",
            Chart::TV => "TV",
            Chart::TP => "TP",
            Chart::SP => "SP",
        }
    }

    /// Axis labels in chart order, e.g. `("T", "V")` for [`Chart::TV`].
    pub fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            Chart::SV => ("S", "V"),
            Chart::TV => ("T", "V"),
            Chart::TP => ("T", "P"),
            Chart::SP => ("S", "P"),
        }
    }
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = self.axis_labels();
        write!(f, "{a}{b}")
    }
}

/// A point in one chart. Coordinates are stored in chart axis order and the
/// order is never silently reinterpreted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    chart: Chart,
    c1: f64,
    c2: f64,
}

impl StatePoint {
    /// Builds a point, rejecting non-finite coordinates and non-positive
    /// values for the volume-like and temperature-like axes of the chart.
    pub fn new(chart: Chart, c1: f64, c2: f64) -> Result<Self> {
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::Config(format!(
                "non-finite coordinates ({c1}, {c2}) on chart {chart}"
            )));
        }
        let positive = |label: &str, x: f64| -> Result<()> {
            if x <= 0.0 {
                return Err(Error::Config(format!(
                    "coordinate {label} = {x} must be strictly positive on chart {chart}"
                )));
            }
            Ok(())
        };
        match chart {
            Chart::SV => positive("V", c2)?,
            Chart::TV => {
                positive("T", c1)?;
                positive("V", c2)?;
            }
            Chart::TP => positive("T", c1)?,
            Chart::SP => {}
        }
        Ok(StatePoint { chart, c1, c2 })
    }

    /// Shorthand for a point on the fundamental entropy-volume chart.
    pub fn sv(s: f64, v: f64) -> Result<Self> {
        StatePoint::new(Chart::SV, s, v)
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// First coordinate, in chart axis order.
    pub fn c1(&self) -> f64 {
        self.c1
    }

    /// Second coordinate, in chart axis order.
    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn coords(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }
}

/// Numerical tolerance policy. One instance is configured per run and passed
/// (immutably) to every routine that integrates, differentiates or inverts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance for derivative-based residuals (analytic engines).
    pub deriv_rel: f64,
    /// Absolute tolerance handed to the adaptive quadrature.
    pub quad_abs: f64,
    /// Relative step tolerance for Newton coordinate inversion.
    pub newton_tol: f64,
    /// Iteration budget for a single Newton/bisection solve.
    pub max_newton_iter: usize,
}

impl Tolerances {
    /// Relative tolerance to use when a residual was produced by the
    /// finite-difference engine instead of an analytic one.
    pub const FD_DERIV_REL: f64 = 1e-5;

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("deriv_rel", self.deriv_rel),
            ("quad_abs", self.quad_abs),
            ("newton_tol", self.newton_tol),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance {name} = {value} must be finite and positive"
                )));
            }
        }
        if self.max_newton_iter == 0 {
            return Err(Error::Config(
                "max_newton_iter must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            deriv_rel: 1e-8,
            quad_abs: 1e-10,
            newton_tol: 1e-12,
            max_newton_iter: 64,
        }
    }
}
