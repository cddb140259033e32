//! Verification toolkit for the differential-geometric structure of
//! equilibrium thermodynamics on analytic equations of state.
//!
//! The internal energy of a simple system is a state function, so its
//! differential `dU = T dS - P dV` is exact: line integrals depend only on
//! endpoints, loop integrals vanish, the heat absorbed around a closed
//! cycle equals the work done, and the mixed-partial (Maxwell) relations
//! hold in every coordinate chart. None of that is true of heat `T dS` or
//! work `P dV` taken alone. This crate makes each of those statements an
//! executable check with explicit tolerances:
//!
//! - [`eos`] — analytic models (ideal gas, van der Waals) in reduced
//!   units, with exact gradients, second-order jets, and coordinate-chart
//!   inversions; plus a deliberately inconsistent control model for
//!   negative tests.
//! - [`calculus`] — differential 1-forms and 2-forms on the state surface,
//!   three interchangeable derivative engines (closed-form, dual-number,
//!   finite-difference), chart partials, and exterior derivatives.
//! - [`paths`] — paths and regions in the entropy-volume plane with line,
//!   loop, and area integrals (Green's theorem both ways).
//! - [`lagrangian`] — the action along a path, the closure relation, the
//!   Euler-Lagrange residuals, and fixed-endpoint variations.
//! - [`maxwell`] — the four Maxwell relations by two independent routes,
//!   and the Legendre potentials F, G, H that generate them.
//! - [`cycles`] — implicit-contour cycle segments (isotherms, adiabats,
//!   isochores, isobars), Carnot cycles, efficiency, and the first law.
//! - [`config`] / [`runner`] / [`report`] — a JSON-configured task runner
//!   that writes self-describing JSON reports and CSV tables, used by the
//!   `thermoforms` command-line binary.
//!
//! ```
//! use thermoforms::{closure_residual, DerivMode, IdealGas};
//!
//! let gas = IdealGas::new();
//! // dU = T dS - P dV is exact: (dT/dV)_S + (dP/dS)_V = 0.
//! let residual = closure_residual(&gas, 0.3, 1.7, DerivMode::Analytic);
//! assert!(residual.abs() < 1e-12);
//! ```

pub mod calculus;
pub mod chart;
pub mod config;
pub mod cycles;
pub mod dual;
pub mod eos;
pub mod error;
pub mod lagrangian;
pub mod maxwell;
pub mod paths;
pub mod quad;
pub mod report;
pub mod runner;

pub use calculus::{
    exterior_derivative, partial, wedge_ratio, DerivMode, OneForm, Poly2, Quantity, TwoForm,
};
pub use chart::{reduced_units_doc, Chart, StatePoint, Tolerances, REDUCED_UNITS};
pub use config::{catalog, FormName, ModelSpec, RunConfig, TaskSpec, OUTPUT_DIR_ENV};
pub use cycles::{
    carnot, cycle_path, rectangle_cycle, reverse_cycle, run_cycle, CycleReport, CycleSpec,
    Segment, SegmentKind,
};
pub use eos::{
    chart_values, evaluate, invert_to_chart, CorruptedPressure, DomainBox, Eos, EosRef, IdealGas,
    VanDerWaals,
};
pub use error::{Error, Result};
pub use lagrangian::{
    action, closure_residual, equilibrium_surface_residual, euler_lagrange_residuals,
    form_variation, variational_check, VariationalResult,
};
pub use maxwell::{
    maxwell_from_potential, maxwell_residual, maxwell_sides, MaxwellCase, PotentialKind,
};
pub use paths::{
    generate_paths, line_integral, loop_integral, region_integral, Path, Region,
};
pub use report::{sha256_hex, Table, VerificationReport};
pub use runner::{resolve_output_dir, run_config, write_outcomes, TaskOutcome};
