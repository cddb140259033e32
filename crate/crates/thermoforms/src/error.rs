//! One error type for the whole crate. Numerical routines report *why* they
//! gave up (lost bracket, iteration budget, tolerance miss) so callers can
//! distinguish a bad configuration from a genuinely failing identity.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A state point left the region where the model's formulas are defined.
    #[error("point (S={s}, V={v}) outside model domain: {reason}")]
    OutOfDomain { s: f64, v: f64, reason: String },

    /// A 1D root solve found no sign change over the search interval.
    #[error("no root of {what} bracketed in [{lo}, {hi}]")]
    NonBracketed { what: String, lo: f64, hi: f64 },

    /// Newton/bisection ran out of iterations.
    #[error("no convergence after {iters} iterations solving {what}")]
    NoConvergence { what: String, iters: usize },

    /// Adaptive quadrature hit its depth limit before the error target.
    #[error("quadrature stalled at estimated error {err:.3e} (target {tol:.3e})")]
    QuadratureNonConvergence { tol: f64, err: f64 },

    /// An integrand stopped being finite along the path.
    #[error("integrand left the model domain near parameter t = {t}")]
    DomainExit { t: f64 },

    /// A loop operation was asked for on a path whose ends do not meet.
    #[error("path is not closed: endpoint gap ({gap_s:.3e}, {gap_v:.3e})")]
    NotClosed { gap_s: f64, gap_v: f64 },

    /// Cycle segments do not chain head-to-tail (or fail to close).
    #[error("cycle segments do not chain: {what}")]
    NonClosingChain { what: String },

    /// A coordinate change has a (numerically) vanishing Jacobian.
    #[error("singular coordinate change to ({x}, {y}) at (S={s}, V={v})")]
    SingularChart { x: &'static str, y: &'static str, s: f64, v: f64 },

    /// The requested pair of variables does not form a supported chart.
    #[error("({x}, {y}) is not a supported coordinate chart")]
    UnsupportedChart { x: &'static str, y: &'static str },

    /// A form was evaluated against a path or region on a different chart.
    #[error("chart mismatch: expected {expected}, got {got}")]
    ChartMismatch { expected: &'static str, got: &'static str },

    /// A region boundary must be traversed counter-clockwise.
    #[error("region boundary is not counter-clockwise (signed area {area})")]
    NotCounterClockwise { area: f64 },

    /// A segment-wise operation needs a locally monotone parametrization.
    #[error("path is not monotone in the required coordinate near t = {t}")]
    NonMonotone { t: f64 },

    /// Random path generation kept leaving the domain box.
    #[error("could not generate an in-domain path after {attempts} attempts")]
    PathGeneration { attempts: usize },

    /// A constructive target (isotherm, isobar, ...) cannot be met in the box.
    #[error("constraint unreachable in the domain box: {what}")]
    Unreachable { what: String },

    /// Two redundant computations of the same quantity disagreed.
    #[error("internal cross-check failed for {what}: {lhs} vs {rhs}")]
    CrossCheck { what: String, lhs: f64, rhs: f64 },

    /// Anything wrong with a run configuration (parse errors included).
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
