//! Run configurations: the JSON schema the batch driver consumes, with full
//! validation up front so a bad config never produces partial output.

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::sync::Arc;

use crate::chart::Tolerances;
use crate::cycles::CycleSpec;
use crate::eos::{DomainBox, EosRef, IdealGas, VanDerWaals};
use crate::error::{Error, Result};

/// Which fundamental relation to instantiate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    IdealGas,
    VanDerWaals,
}

/// Interaction parameters for the van der Waals model.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VdwParams {
    pub a: f64,
    pub b: f64,
}

/// Model section of a run configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: ModelName,
    /// Required for `van-der-waals`, rejected for `ideal-gas`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<VdwParams>,
    /// Replace the pressure with `P + S`, breaking exactness on purpose.
    #[serde(default)]
    pub corrupted: bool,
    /// Domain box override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainBox>,
}

impl ModelSpec {
    /// Instantiates the model, applying the corruption wrapper last.
    pub fn build(&self) -> Result<EosRef> {
        let base: EosRef = match (self.name, self.params) {
            (ModelName::IdealGas, None) => match self.domain {
                Some(d) => Arc::new(IdealGas::with_domain(d)?),
                None => Arc::new(IdealGas::new()),
            },
            (ModelName::IdealGas, Some(_)) => {
                return Err(Error::Config(
                    "the ideal gas takes no params; remove the params block".into(),
                ));
            }
            (ModelName::VanDerWaals, Some(VdwParams { a, b })) => match self.domain {
                Some(d) => Arc::new(VanDerWaals::with_domain(a, b, d)?),
                None => Arc::new(VanDerWaals::new(a, b)?),
            },
            (ModelName::VanDerWaals, None) => {
                return Err(Error::Config(
                    "van-der-waals needs params: {\"a\": ..., \"b\": ...}".into(),
                ));
            }
        };
        Ok(if self.corrupted {
            Arc::new(crate::eos::CorruptedPressure::new(base))
        } else {
            base
        })
    }

    /// Flat description for report provenance.
    pub fn describe(&self) -> Result<ModelDescription> {
        let model = self.build()?;
        Ok(ModelDescription {
            name: model.name().to_string(),
            parameters: model
                .parameters()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            corrupted: self.corrupted,
            domain: model.domain(),
        })
    }
}

/// Resolved model identity as recorded in reports.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ModelDescription {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    pub corrupted: bool,
    pub domain: DomainBox,
}

/// Differential 1-forms addressable by name in configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormName {
    /// `T dS - P dV`, the energy differential.
    Du,
    /// `T dS`.
    Heat,
    /// `P dV`.
    Work,
}

impl FormName {
    pub fn label(self) -> &'static str {
        match self {
            FormName::Du => "du",
            FormName::Heat => "heat",
            FormName::Work => "work",
        }
    }

    pub fn build(self, model: &EosRef) -> crate::calculus::OneForm {
        use crate::calculus::OneForm;
        match self {
            FormName::Du => OneForm::du(model),
            FormName::Heat => OneForm::heat(model),
            FormName::Work => OneForm::work(model),
        }
    }
}

fn default_grid() -> [usize; 2] {
    [10, 10]
}

fn default_cases() -> Vec<usize> {
    vec![1, 2, 3, 4]
}

fn default_route_tol() -> f64 {
    1e-9
}

fn default_tol_tight() -> f64 {
    1e-8
}

fn default_tol_variation() -> f64 {
    1e-9
}

fn default_agreement_tol() -> f64 {
    1e-12
}

fn default_points() -> usize {
    100
}

fn default_paths() -> usize {
    10
}

fn default_el_samples() -> usize {
    7
}

fn default_amplitude() -> f64 {
    0.1
}

fn default_contrast_min() -> f64 {
    1e-3
}

fn default_efficiency_tol() -> f64 {
    1e-6
}

fn default_forms() -> Vec<FormName> {
    vec![FormName::Du, FormName::Heat, FormName::Work]
}

/// One verification task. The `task` tag selects the kind; every randomized
/// task requires an explicit seed.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    /// All four Maxwell relations on a grid, by the wedge route (analytic
    /// derivatives) and the partials route (chart stepping with numeric
    /// inversion).
    CheckMaxwell {
        id: String,
        #[serde(default = "default_grid")]
        grid: [usize; 2],
        #[serde(default = "default_cases")]
        cases: Vec<usize>,
        /// Allowed disagreement between the two routes.
        #[serde(default = "default_route_tol")]
        route_tol: f64,
        #[serde(default = "default_tol_tight")]
        tolerance: f64,
    },
    /// Closure relation at random states plus Euler-Lagrange residuals along
    /// random monotone paths.
    VerifyClosure {
        id: String,
        #[serde(default = "default_points")]
        points: usize,
        seed: u64,
        #[serde(default = "default_paths")]
        el_paths: usize,
        #[serde(default = "default_el_samples")]
        el_samples: usize,
        #[serde(default = "default_tol_tight")]
        tolerance: f64,
        /// Allowed gap between the closure residual and the first Maxwell
        /// relation's residual (the theorem says they coincide).
        #[serde(default = "default_agreement_tol")]
        agreement_tol: f64,
    },
    /// Path independence: the action along a family of random paths between
    /// fixed endpoints, against the energy difference.
    IntegratePath {
        id: String,
        from: [f64; 2],
        to: [f64; 2],
        #[serde(default = "default_paths")]
        paths: usize,
        seed: u64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_tol_tight")]
        tolerance: f64,
    },
    /// Fixed-endpoint variation: the action must be stationary while the
    /// work form moves at first order on the same geometry.
    VariationalSweep {
        id: String,
        from: [f64; 2],
        to: [f64; 2],
        #[serde(default = "default_paths")]
        count: usize,
        seed: u64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        /// The work-form variation must exceed this for every member.
        #[serde(default = "default_contrast_min")]
        contrast_min: f64,
        #[serde(default = "default_tol_variation")]
        tolerance: f64,
    },
    /// Builds and runs a closed cycle, checking the first law (and, for
    /// Carnot cycles, the reversible efficiency).
    RunCycle {
        id: String,
        cycle: CycleSpec,
        #[serde(default)]
        reversed: bool,
        #[serde(default = "default_tol_tight")]
        tolerance: f64,
        #[serde(default = "default_efficiency_tol")]
        efficiency_tol: f64,
    },
    /// Loop integral vs region integral of the exterior derivative on a
    /// rectangle, for named and random polynomial forms.
    GreenCheck {
        id: String,
        rect: DomainBox,
        #[serde(default = "default_forms")]
        forms: Vec<FormName>,
        #[serde(default)]
        random_forms: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default = "default_tol_tight")]
        tolerance: f64,
    },
}

impl TaskSpec {
    pub fn id(&self) -> &str {
        match self {
            TaskSpec::CheckMaxwell { id, .. }
            | TaskSpec::VerifyClosure { id, .. }
            | TaskSpec::IntegratePath { id, .. }
            | TaskSpec::VariationalSweep { id, .. }
            | TaskSpec::RunCycle { id, .. }
            | TaskSpec::GreenCheck { id, .. } => id,
        }
    }

    /// Kebab-case task name (the `task` tag value).
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::CheckMaxwell { .. } => "check-maxwell",
            TaskSpec::VerifyClosure { .. } => "verify-closure",
            TaskSpec::IntegratePath { .. } => "integrate-path",
            TaskSpec::VariationalSweep { .. } => "variational-sweep",
            TaskSpec::RunCycle { .. } => "run-cycle",
            TaskSpec::GreenCheck { .. } => "green-check",
        }
    }

    /// Library module the task exercises.
    pub fn origin_module(&self) -> &'static str {
        match self {
            TaskSpec::CheckMaxwell { .. } => "maxwell",
            TaskSpec::VerifyClosure { .. } => "lagrangian",
            TaskSpec::IntegratePath { .. } => "paths",
            TaskSpec::VariationalSweep { .. } => "lagrangian",
            TaskSpec::RunCycle { .. } => "cycles",
            TaskSpec::GreenCheck { .. } => "paths",
        }
    }

    /// The seed the task consumes, if it is randomized.
    pub fn seed(&self) -> Option<u64> {
        match self {
            TaskSpec::CheckMaxwell { .. } => None,
            TaskSpec::VerifyClosure { seed, .. }
            | TaskSpec::IntegratePath { seed, .. }
            | TaskSpec::VariationalSweep { seed, .. } => Some(*seed),
            TaskSpec::RunCycle { .. } => None,
            TaskSpec::GreenCheck { seed, .. } => *seed,
        }
    }

    /// The residual bound the task's pass flag is judged against.
    pub fn tolerance(&self) -> f64 {
        match self {
            TaskSpec::CheckMaxwell { tolerance, .. }
            | TaskSpec::VerifyClosure { tolerance, .. }
            | TaskSpec::IntegratePath { tolerance, .. }
            | TaskSpec::VariationalSweep { tolerance, .. }
            | TaskSpec::RunCycle { tolerance, .. }
            | TaskSpec::GreenCheck { tolerance, .. } => *tolerance,
        }
    }
}

fn positive_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} must be positive and finite, got {x}")))
    }
}

/// A complete run: model, tolerances, output location, and tasks.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Where reports and tables go; overridden by `THERMOFORMS_OUTPUT_DIR`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub tasks: Vec<TaskSpec>,
}

/// Environment variable that overrides [`RunConfig::output_dir`].
pub const OUTPUT_DIR_ENV: &str = "THERMOFORMS_OUTPUT_DIR";

impl RunConfig {
    /// Parses and fully validates a JSON document.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let config: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("config does not parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks everything checkable without running: the model builds, ids
    /// are unique and usable as file names, every parameter is in range, and
    /// referenced states lie inside the model's domain.
    pub fn validate(&self) -> Result<()> {
        let model = self.model.build()?;
        self.tolerances.validate()?;
        if self.tasks.is_empty() {
            return Err(Error::Config("no tasks; nothing to run".into()));
        }
        let mut seen = HashSet::new();
        for task in &self.tasks {
            let id = task.id();
            if id.is_empty()
                || !id
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
            {
                return Err(Error::Config(format!(
                    "task id {id:?} must be non-empty and use only [A-Za-z0-9._-]"
                )));
            }
            if !seen.insert(id.to_string()) {
                return Err(Error::Config(format!("duplicate task id {id:?}")));
            }
            positive_finite(task.tolerance(), &format!("task {id}: tolerance"))?;
            self.validate_task(task, &model)?;
        }
        Ok(())
    }

    fn validate_point(&self, model: &EosRef, id: &str, label: &str, p: [f64; 2]) -> Result<()> {
        if !model.in_hard_domain(p[0], p[1]) || !model.domain().contains(p[0], p[1]) {
            return Err(Error::Config(format!(
                "task {id}: {label} ({}, {}) is outside the model domain",
                p[0], p[1]
            )));
        }
        Ok(())
    }

    fn validate_task(&self, task: &TaskSpec, model: &EosRef) -> Result<()> {
        match task {
            TaskSpec::CheckMaxwell { id, grid, cases, route_tol, .. } => {
                if grid[0] == 0 || grid[1] == 0 {
                    return Err(Error::Config(format!("task {id}: grid sides must be >= 1")));
                }
                if cases.is_empty() {
                    return Err(Error::Config(format!("task {id}: empty case list")));
                }
                for &c in cases {
                    if crate::maxwell::MaxwellCase::from_index(c).is_none() {
                        return Err(Error::Config(format!(
                            "task {id}: no Maxwell relation has index {c} (valid: 1-4)"
                        )));
                    }
                }
                positive_finite(*route_tol, &format!("task {id}: route_tol"))?;
            }
            TaskSpec::VerifyClosure { id, points, el_paths, el_samples, agreement_tol, .. } => {
                if *points == 0 && *el_paths == 0 {
                    return Err(Error::Config(format!(
                        "task {id}: points and el_paths cannot both be zero"
                    )));
                }
                if *el_paths > 0 && *el_samples == 0 {
                    return Err(Error::Config(format!("task {id}: el_samples must be >= 1")));
                }
                positive_finite(*agreement_tol, &format!("task {id}: agreement_tol"))?;
            }
            TaskSpec::IntegratePath { id, from, to, paths, amplitude, .. } => {
                self.validate_point(model, id, "from", *from)?;
                self.validate_point(model, id, "to", *to)?;
                if *paths == 0 {
                    return Err(Error::Config(format!("task {id}: paths must be >= 1")));
                }
                positive_finite(*amplitude, &format!("task {id}: amplitude"))?;
            }
            TaskSpec::VariationalSweep { id, from, to, count, amplitude, contrast_min, .. } => {
                self.validate_point(model, id, "from", *from)?;
                self.validate_point(model, id, "to", *to)?;
                if *count == 0 {
                    return Err(Error::Config(format!("task {id}: count must be >= 1")));
                }
                positive_finite(*amplitude, &format!("task {id}: amplitude"))?;
                positive_finite(*contrast_min, &format!("task {id}: contrast_min"))?;
            }
            TaskSpec::RunCycle { id, cycle, efficiency_tol, .. } => {
                positive_finite(*efficiency_tol, &format!("task {id}: efficiency_tol"))?;
                match cycle {
                    CycleSpec::Carnot { t_hot, t_cold, s_low, s_high } => {
                        if !(t_cold.is_finite() && *t_cold > 0.0 && t_hot > t_cold) {
                            return Err(Error::Config(format!(
                                "task {id}: need t_hot > t_cold > 0"
                            )));
                        }
                        if !(s_low.is_finite() && s_high.is_finite() && s_low < s_high) {
                            return Err(Error::Config(format!(
                                "task {id}: need s_low < s_high"
                            )));
                        }
                    }
                    CycleSpec::Rectangle { rect } => {
                        rect.validate().map_err(|e| {
                            Error::Config(format!("task {id}: bad rectangle: {e}"))
                        })?;
                    }
                    CycleSpec::Segments { start, steps } => {
                        self.validate_point(model, id, "start", *start)?;
                        if steps.is_empty() {
                            return Err(Error::Config(format!("task {id}: empty segment chain")));
                        }
                        for (i, step) in steps.iter().enumerate() {
                            if step.kind == crate::cycles::SegmentKind::General {
                                return Err(Error::Config(format!(
                                    "task {id}: step {i}: general segments cannot be \
                                     built from a config"
                                )));
                            }
                            if !step.target.is_finite() {
                                return Err(Error::Config(format!(
                                    "task {id}: step {i}: target must be finite"
                                )));
                            }
                        }
                    }
                }
            }
            TaskSpec::GreenCheck { id, rect, forms, random_forms, seed, .. } => {
                rect.validate()
                    .map_err(|e| Error::Config(format!("task {id}: bad rectangle: {e}")))?;
                let boxx = model.domain();
                for (s, v) in
                    [(rect.s[0], rect.v[0]), (rect.s[1], rect.v[1])]
                {
                    if !boxx.contains(s, v) {
                        return Err(Error::Config(format!(
                            "task {id}: rectangle leaves the model domain at ({s}, {v})"
                        )));
                    }
                }
                if forms.is_empty() && *random_forms == 0 {
                    return Err(Error::Config(format!("task {id}: no forms to check")));
                }
                if *random_forms > 0 && seed.is_none() {
                    return Err(Error::Config(format!(
                        "task {id}: random_forms > 0 requires a seed"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One catalog entry describing a task kind for `list-tasks`.
pub struct TaskInfo {
    pub name: &'static str,
    pub origin_module: &'static str,
    pub required: &'static [&'static str],
    pub optional: &'static [&'static str],
    /// A complete example task object that validates as-is (against the
    /// default ideal-gas model).
    pub example: &'static str,
}

/// The task catalog, one entry per task kind.
pub fn catalog() -> Vec<TaskInfo> {
    vec![
        TaskInfo {
            name: "check-maxwell",
            origin_module: "maxwell",
            required: &["id"],
            optional: &["grid=[10,10]", "cases=[1,2,3,4]", "route_tol=1e-9", "tolerance=1e-8"],
            example: r#"{"task": "check-maxwell", "id": "maxwell-grid", "grid": [10, 10]}"#,
        },
        TaskInfo {
            name: "verify-closure",
            origin_module: "lagrangian",
            required: &["id", "seed"],
            optional: &[
                "points=100",
                "el_paths=10",
                "el_samples=7",
                "tolerance=1e-8",
                "agreement_tol=1e-12",
            ],
            example: r#"{"task": "verify-closure", "id": "closure", "seed": 11, "points": 100}"#,
        },
        TaskInfo {
            name: "integrate-path",
            origin_module: "paths",
            required: &["id", "from", "to", "seed"],
            optional: &["paths=10", "amplitude=0.1", "tolerance=1e-8"],
            example: r#"{"task": "integrate-path", "id": "state-function",
                "from": [0.0, 1.0], "to": [1.0, 2.0], "seed": 7}"#,
        },
        TaskInfo {
            name: "variational-sweep",
            origin_module: "lagrangian",
            required: &["id", "from", "to", "seed"],
            optional: &["count=10", "amplitude=0.1", "contrast_min=1e-3", "tolerance=1e-9"],
            example: r#"{"task": "variational-sweep", "id": "least-action",
                "from": [0.0, 1.0], "to": [1.0, 2.0], "seed": 3}"#,
        },
        TaskInfo {
            name: "run-cycle",
            origin_module: "cycles",
            required: &["id", "cycle"],
            optional: &["reversed=false", "tolerance=1e-8", "efficiency_tol=1e-6"],
            example: r#"{"task": "run-cycle", "id": "carnot",
                "cycle": {"type": "carnot", "t_hot": 0.6666666666666666,
                          "t_cold": 0.3333333333333333, "s_low": 0.0, "s_high": 1.0}}"#,
        },
        TaskInfo {
            name: "green-check",
            origin_module: "paths",
            required: &["id", "rect"],
            optional: &[
                "forms=[\"du\",\"heat\",\"work\"]",
                "random_forms=0",
                "seed (required when random_forms > 0)",
                "tolerance=1e-8",
            ],
            example: r#"{"task": "green-check", "id": "green",
                "rect": {"s": [0.0, 1.0], "v": [1.0, 2.0]},
                "random_forms": 5, "seed": 19}"#,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(tasks_json: &str) -> String {
        format!(
            r#"{{"model": {{"name": "ideal-gas"}}, "tasks": [{tasks_json}]}}"#
        )
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = RunConfig::from_json(&minimal(
            r#"{"task": "check-maxwell", "id": "mx"}"#,
        ))
        .unwrap();
        assert_eq!(cfg.tasks.len(), 1);
        match &cfg.tasks[0] {
            TaskSpec::CheckMaxwell { grid, cases, route_tol, tolerance, .. } => {
                assert_eq!(*grid, [10, 10]);
                assert_eq!(cases, &[1, 2, 3, 4]);
                assert_eq!(*route_tol, 1e-9);
                assert_eq!(*tolerance, 1e-8);
            }
            other => panic!("wrong task: {other:?}"),
        }
        assert_eq!(cfg.tolerances, Tolerances::default());
    }

    #[test]
    fn unknown_task_names_and_fields_are_rejected() {
        let err = RunConfig::from_json(&minimal(
            r#"{"task": "paint-plots", "id": "x"}"#,
        ))
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
        let err = RunConfig::from_json(&minimal(
            r#"{"task": "check-maxwell", "id": "x", "grdi": [3, 3]}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("grdi"), "{err}");
    }

    #[test]
    fn randomized_tasks_demand_seeds() {
        let err = RunConfig::from_json(&minimal(
            r#"{"task": "verify-closure", "id": "c"}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
        let err = RunConfig::from_json(&minimal(
            r#"{"task": "green-check", "id": "g",
                "rect": {"s": [0.0, 1.0], "v": [1.0, 2.0]}, "random_forms": 3}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn model_section_is_strict() {
        // vdw without params.
        let err = RunConfig::from_json(
            r#"{"model": {"name": "van-der-waals"},
                "tasks": [{"task": "check-maxwell", "id": "m"}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("params"), "{err}");
        // ideal gas with stray params.
        let err = RunConfig::from_json(
            r#"{"model": {"name": "ideal-gas", "params": {"a": 0.1, "b": 0.05}},
                "tasks": [{"task": "check-maxwell", "id": "m"}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("params"), "{err}");
        // corrupted wrapper reflected in the description.
        let spec: ModelSpec = serde_json::from_str(
            r#"{"name": "ideal-gas", "corrupted": true}"#,
        )
        .unwrap();
        let desc = spec.describe().unwrap();
        assert!(desc.corrupted);
        assert!(desc.name.contains("corrupted"));
    }

    #[test]
    fn ids_must_be_unique_and_file_safe() {
        let err = RunConfig::from_json(&minimal(
            r#"{"task": "check-maxwell", "id": "a"},
               {"task": "check-maxwell", "id": "a"}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
        let err = RunConfig::from_json(&minimal(
            r#"{"task": "check-maxwell", "id": "bad/id"}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("A-Za-z0-9"), "{err}");
    }

    #[test]
    fn out_of_domain_endpoints_are_caught_before_running() {
        let err = RunConfig::from_json(&minimal(
            r#"{"task": "integrate-path", "id": "p", "seed": 1,
                "from": [0.0, 1.0], "to": [9.0, 2.0]}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("outside"), "{err}");
        let err = RunConfig::from_json(&minimal(
            r#"{"task": "check-maxwell", "id": "m", "cases": [5]}"#,
        ))
        .unwrap_err();
        assert!(err.to_string().contains("index 5"), "{err}");
    }

    #[test]
    fn catalog_examples_validate_as_a_config() {
        let tasks: Vec<String> = catalog().iter().map(|t| t.example.to_string()).collect();
        let cfg_json = format!(
            r#"{{"model": {{"name": "ideal-gas"}}, "tasks": [{}]}}"#,
            tasks.join(",")
        );
        let cfg = RunConfig::from_json(&cfg_json).unwrap();
        assert_eq!(cfg.tasks.len(), 6);
        let kinds: Vec<&str> = cfg.tasks.iter().map(|t| t.kind()).collect();
        let names: Vec<&str> = catalog().iter().map(|t| t.name).collect();
        assert_eq!(kinds, names);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = RunConfig::from_json(
            r#"{"model": {"name": "van-der-waals", "params": {"a": 0.1, "b": 0.05},
                          "domain": {"s": [0.0, 1.0], "v": [1.0, 2.0]}},
                "output_dir": "out",
                "tasks": [{"task": "verify-closure", "id": "c", "seed": 42}]}"#,
        )
        .unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let again = RunConfig::from_json(&text).unwrap();
        assert_eq!(cfg, again);
    }
}
