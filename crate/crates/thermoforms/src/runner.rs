//! Executes validated run configurations task by task.
//!
//! A task that runs to completion yields a [`VerificationReport`] with a
//! pass flag and tables; residuals over tolerance make it *fail*, not error.
//! Hard faults — a solver that cannot bracket, a path leaving the domain —
//! surface as errors and abort the run.

use std::path::{Path as FsPath, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{exterior_derivative, DerivMode, OneForm, Poly2};
use crate::chart::Tolerances;
use crate::config::{FormName, RunConfig, TaskSpec, OUTPUT_DIR_ENV};
use crate::cycles::{self, CycleSpec};
use crate::eos::EosRef;
use crate::error::{Error, Result};
use crate::lagrangian;
use crate::maxwell::{self, MaxwellCase};
use crate::paths::{generate_paths, loop_integral, region_integral, Path, Region};
use crate::report::{Cell, Provenance, ResidualStats, Table, VerificationReport};

/// A completed task: the report and the tables backing it.
#[derive(Debug, Clone)]
pub struct TaskOutcome {
    pub report: VerificationReport,
    pub tables: Vec<Table>,
}

/// Runs every task in order. The config is re-validated first, so callers
/// cannot bypass the no-partial-output guarantee by skipping validation.
pub fn run_config(config: &RunConfig, config_sha256: &str) -> Result<Vec<TaskOutcome>> {
    config.validate()?;
    let model = config.model.build()?;
    let tol = config.tolerances;
    config
        .tasks
        .iter()
        .map(|task| run_task(config, &model, task, config_sha256, &tol))
        .collect()
}

/// The directory reports go to: the `THERMOFORMS_OUTPUT_DIR` environment
/// variable if set, else the config's `output_dir`, else the working
/// directory.
pub fn resolve_output_dir(config: &RunConfig) -> PathBuf {
    std::env::var(OUTPUT_DIR_ENV)
        .ok()
        .filter(|s| !s.is_empty())
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| ".".into())
        .into()
}

/// Writes every outcome's report and tables into `dir`.
pub fn write_outcomes(dir: &FsPath, outcomes: &[TaskOutcome]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for outcome in outcomes {
        written.extend(crate::report::write_outputs(dir, &outcome.report, &outcome.tables)?);
    }
    Ok(written)
}

fn run_task(
    config: &RunConfig,
    model: &EosRef,
    task: &TaskSpec,
    config_sha256: &str,
    tol: &Tolerances,
) -> Result<TaskOutcome> {
    let (stats, pass, summary, tables) = match task {
        TaskSpec::CheckMaxwell { grid, cases, route_tol, tolerance, .. } => {
            check_maxwell(model, tol, *grid, cases, *route_tol, *tolerance)?
        }
        TaskSpec::VerifyClosure {
            seed, points, el_paths, el_samples, tolerance, agreement_tol, ..
        } => verify_closure(model, *seed, *points, *el_paths, *el_samples, *tolerance,
            *agreement_tol)?,
        TaskSpec::IntegratePath { from, to, paths, seed, amplitude, tolerance, .. } => {
            integrate_path(model, tol, *from, *to, *paths, *seed, *amplitude, *tolerance)?
        }
        TaskSpec::VariationalSweep {
            from, to, count, seed, amplitude, contrast_min, tolerance, ..
        } => variational_sweep(model, tol, *from, *to, *count, *seed, *amplitude,
            *contrast_min, *tolerance)?,
        TaskSpec::RunCycle { cycle, reversed, tolerance, efficiency_tol, .. } => {
            run_cycle_task(model, tol, cycle, *reversed, *tolerance, *efficiency_tol)?
        }
        TaskSpec::GreenCheck { rect, forms, random_forms, seed, tolerance, .. } => {
            green_check(model, tol, rect, forms, *random_forms, *seed, *tolerance)?
        }
    };

    let report = VerificationReport {
        task_id: task.id().to_string(),
        task: task.kind().to_string(),
        origin_module: task.origin_module().to_string(),
        model: config.model.describe()?,
        tolerance: task.tolerance(),
        seed: task.seed(),
        max_abs_residual: stats.max_abs(),
        mean_abs_residual: stats.mean_abs(),
        pass,
        summary,
        table_files: tables
            .iter()
            .map(|t| format!("{}.{}.csv", task.id(), t.name()))
            .collect(),
        provenance: Provenance {
            config_sha256: config_sha256.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        config: serde_json::to_value(config)
            .map_err(|e| Error::Config(format!("config does not re-serialize: {e}")))?,
    };
    Ok(TaskOutcome { report, tables })
}

type TaskBody = (ResidualStats, bool, String, Vec<Table>);

fn check_maxwell(
    model: &EosRef,
    tol: &Tolerances,
    grid: [usize; 2],
    cases: &[usize],
    route_tol: f64,
    tolerance: f64,
) -> Result<TaskBody> {
    let mut table = Table::new(
        "residuals",
        &["case", "s", "v", "lhs", "rhs", "residual_partials", "residual_wedge", "route_gap"],
    )?;
    let mut stats = ResidualStats::new();
    let mut max_gap = 0.0f64;
    let points = model.domain().grid(grid[0], grid[1]);
    for &index in cases {
        let case = MaxwellCase::from_index(index).expect("validated");
        for &(s, v) in &points {
            let (lhs, rhs) =
                maxwell::maxwell_sides(model.as_ref(), case, s, v, DerivMode::CentralDifference,
                    tol)?;
            let partials = lhs - rhs;
            let wedge = maxwell::maxwell_residual(model.as_ref(), case, s, v,
                DerivMode::Analytic)?;
            let gap = (partials - wedge).abs();
            stats.record(partials);
            stats.record(wedge);
            max_gap = max_gap.max(gap);
            table.push(vec![
                index.into(),
                s.into(),
                v.into(),
                lhs.into(),
                rhs.into(),
                partials.into(),
                wedge.into(),
                gap.into(),
            ])?;
        }
    }
    let pass = stats.max_abs() <= tolerance && max_gap <= route_tol;
    let summary = format!(
        "{} relation(s) x {} grid points: max |residual| = {:.3e} (tolerance {:.1e}), \
         max route gap = {:.3e} (allowed {:.1e})",
        cases.len(),
        points.len(),
        stats.max_abs(),
        tolerance,
        max_gap,
        route_tol,
    );
    Ok((stats, pass, summary, vec![table]))
}

/// Random path between random endpoints that is strictly monotone in both
/// coordinates: the deflection amplitudes are capped so the velocity can
/// never change sign, rather than sampled and filtered.
fn monotone_path<R: rand::Rng>(model: &EosRef, rng: &mut R) -> Path {
    let boxx = model.domain();
    let inner = boxx.padded(-0.1, model.hard_v_floor());
    let (s_lo, s_hi) = (inner.s[0], inner.s[1]);
    let (v_lo, v_hi) = (inner.v[0], inner.v[1]);
    // Endpoints at least 35% of the (shrunken) box apart in each coordinate.
    let sa = rng.gen_range(s_lo..=s_hi - 0.35 * (s_hi - s_lo));
    let sb = rng.gen_range(sa + 0.35 * (s_hi - s_lo)..=s_hi);
    let va = rng.gen_range(v_lo..=v_hi - 0.35 * (v_hi - v_lo));
    let vb = rng.gen_range(va + 0.35 * (v_hi - v_lo)..=v_hi);
    let (ds, dv) = (sb - sa, vb - va);
    // Mode k of amplitude a contributes a*k*pi to the velocity; with
    // |a_k| <= 0.04 d / k the total stays below 0.26 d, so the velocity
    // keeps the sign of d.
    let amps_s: Vec<f64> =
        (1..=2).map(|k| rng.gen_range(-0.04 * ds / k as f64..=0.04 * ds / k as f64)).collect();
    let amps_v: Vec<f64> =
        (1..=2).map(|k| rng.gen_range(-0.04 * dv / k as f64..=0.04 * dv / k as f64)).collect();
    Path::curved((sa, va), (sb, vb), &amps_s, &amps_v)
}

fn verify_closure(
    model: &EosRef,
    seed: u64,
    points: usize,
    el_paths: usize,
    el_samples: usize,
    tolerance: f64,
    agreement_tol: f64,
) -> Result<TaskBody> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = ResidualStats::new();
    let mut max_agreement = 0.0f64;

    let mut point_table = Table::new(
        "closure",
        &["point", "s", "v", "closure_analytic", "closure_dual", "maxwell_case1", "agreement_gap"],
    )?;
    for i in 0..points {
        let (s, v) = model.domain().sample(&mut rng);
        let analytic = lagrangian::closure_residual(model.as_ref(), s, v, DerivMode::Analytic);
        let dual = lagrangian::closure_residual(model.as_ref(), s, v, DerivMode::DualNumber);
        let case1 = maxwell::maxwell_residual(
            model.as_ref(),
            MaxwellCase::InternalEnergy,
            s,
            v,
            DerivMode::Analytic,
        )?;
        let agreement = (analytic - case1).abs().max((analytic - dual).abs());
        stats.record(analytic);
        max_agreement = max_agreement.max(agreement);
        point_table.push(vec![
            i.into(),
            s.into(),
            v.into(),
            analytic.into(),
            dual.into(),
            case1.into(),
            agreement.into(),
        ])?;
    }

    let mut el_table = Table::new(
        "euler-lagrange",
        &["path", "t", "s", "v", "volume_eq_residual", "entropy_eq_residual"],
    )?;
    for p in 0..el_paths {
        let path = monotone_path(model, &mut rng);
        for j in 0..el_samples {
            let t = (j + 1) as f64 / (el_samples + 1) as f64;
            let (r_v, r_s) = lagrangian::euler_lagrange_residuals(model.as_ref(), &path, t)?;
            let (s, v) = path.point(t);
            stats.record(r_v);
            stats.record(r_s);
            el_table.push(vec![
                p.into(),
                t.into(),
                s.into(),
                v.into(),
                r_v.into(),
                r_s.into(),
            ])?;
        }
    }

    let pass = stats.max_abs() <= tolerance && max_agreement <= agreement_tol;
    let summary = format!(
        "closure at {points} random states and Euler-Lagrange along {el_paths} monotone \
         paths: max |residual| = {:.3e} (tolerance {:.1e}), closure-vs-Maxwell gap = {:.3e} \
         (allowed {:.1e})",
        stats.max_abs(),
        tolerance,
        max_agreement,
        agreement_tol,
    );
    Ok((stats, pass, summary, vec![point_table, el_table]))
}

#[allow(clippy::too_many_arguments)]
fn integrate_path(
    model: &EosRef,
    tol: &Tolerances,
    from: [f64; 2],
    to: [f64; 2],
    paths: usize,
    seed: u64,
    amplitude: f64,
    tolerance: f64,
) -> Result<TaskBody> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (from[0], from[1]);
    let b = (to[0], to[1]);
    let delta_u = model.energy(b.0, b.1) - model.energy(a.0, a.1);
    let scale = delta_u.abs().max(1.0);

    let mut family = vec![Path::straight(a, b)];
    family.extend(generate_paths(&mut rng, &model.domain(), a, b, paths, amplitude)?);

    let mut table = Table::new("actions", &["path", "action", "delta_u", "residual"])?;
    let mut stats = ResidualStats::new();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, path) in family.iter().enumerate() {
        let action = lagrangian::action(model, path, tol)?;
        let residual = action - delta_u;
        stats.record(residual);
        lo = lo.min(action);
        hi = hi.max(action);
        table.push(vec![i.into(), action.into(), delta_u.into(), residual.into()])?;
    }
    let spread = hi - lo;
    let pass = stats.max_abs() <= tolerance * scale && spread <= tolerance * scale;
    let summary = format!(
        "{} paths ({} random + the chord) from ({}, {}) to ({}, {}): max |action - deltaU| \
         = {:.3e}, spread = {:.3e} (tolerance {:.1e}, scale {:.3})",
        family.len(),
        paths,
        a.0,
        a.1,
        b.0,
        b.1,
        stats.max_abs(),
        spread,
        tolerance,
        scale,
    );
    Ok((stats, pass, summary, vec![table]))
}

#[allow(clippy::too_many_arguments)]
fn variational_sweep(
    model: &EosRef,
    tol: &Tolerances,
    from: [f64; 2],
    to: [f64; 2],
    count: usize,
    seed: u64,
    amplitude: f64,
    contrast_min: f64,
    tolerance: f64,
) -> Result<TaskBody> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (from[0], from[1]);
    let b = (to[0], to[1]);
    let base = Path::straight(a, b);
    let family = generate_paths(&mut rng, &model.domain(), a, b, count, amplitude)?;
    let du = lagrangian::variational_check(model, &base, &family, tol)?;
    let work = lagrangian::form_variation(&OneForm::work(model), &base, &family, tol)?;

    let mut table =
        Table::new("variations", &["member", "amplitude", "delta_action", "delta_work"])?;
    let mut stats = ResidualStats::new();
    let mut min_work = f64::INFINITY;
    for (i, (d, w)) in du.iter().zip(&work).enumerate() {
        stats.record(d.delta);
        min_work = min_work.min(w.delta.abs());
        table.push(vec![
            i.into(),
            d.perturbation_amplitude.into(),
            d.delta.into(),
            w.delta.into(),
        ])?;
    }
    let pass = stats.max_abs() <= tolerance && min_work >= contrast_min;
    let summary = format!(
        "{count} fixed-endpoint perturbations of amplitude {amplitude}: max |delta action| = \
         {:.3e} (tolerance {:.1e}); min |delta work| = {:.3e} (needs >= {:.1e})",
        stats.max_abs(),
        tolerance,
        min_work,
        contrast_min,
    );
    Ok((stats, pass, summary, vec![table]))
}

fn run_cycle_task(
    model: &EosRef,
    tol: &Tolerances,
    cycle: &CycleSpec,
    reversed: bool,
    tolerance: f64,
    efficiency_tol: f64,
) -> Result<TaskBody> {
    let mut segments = cycle.build(model, tol)?;
    if reversed {
        segments = cycles::reverse_cycle(&segments);
    }
    let report = cycles::run_cycle(model, &segments, tol)?;

    let mut seg_table = Table::new(
        "segments",
        &["index", "kind", "start_s", "start_v", "end_s", "end_v", "heat", "work"],
    )?;
    for row in &report.segments {
        seg_table.push(vec![
            row.index.into(),
            Cell::text(row.kind),
            row.start_s.into(),
            row.start_v.into(),
            row.end_s.into(),
            row.end_v.into(),
            row.heat.into(),
            row.work.into(),
        ])?;
    }
    let mut totals = Table::new(
        "totals",
        &["q_in", "q_out", "w_net", "efficiency", "first_law_residual", "du_loop"],
    )?;
    totals.push(vec![
        report.q_in.into(),
        report.q_out.into(),
        report.w_net.into(),
        report.efficiency.into(),
        report.first_law_residual.into(),
        report.du_loop.into(),
    ])?;

    let mut stats = ResidualStats::new();
    stats.record(report.first_law_residual);
    stats.record(report.du_loop);
    let mut pass = stats.max_abs() <= tolerance;
    let mut eff_note = String::new();
    if let (CycleSpec::Carnot { t_hot, t_cold, .. }, false) = (cycle, reversed) {
        let gap = (report.efficiency - (1.0 - t_cold / t_hot)).abs();
        pass = pass && gap <= efficiency_tol;
        eff_note = format!(
            "; efficiency gap to 1 - Tc/Th = {:.3e} (allowed {:.1e})",
            gap, efficiency_tol
        );
    }
    let summary = format!(
        "{} segment(s){}: q_in = {:.6}, q_out = {:.6}, w_net = {:.6}, first-law residual = \
         {:.3e} (tolerance {:.1e}){}",
        segments.len(),
        if reversed { " reversed" } else { "" },
        report.q_in,
        report.q_out,
        report.w_net,
        report.first_law_residual,
        tolerance,
        eff_note,
    );
    Ok((stats, pass, summary, vec![seg_table, totals]))
}

fn green_check(
    model: &EosRef,
    tol: &Tolerances,
    rect: &crate::eos::DomainBox,
    forms: &[FormName],
    random_forms: usize,
    seed: Option<u64>,
    tolerance: f64,
) -> Result<TaskBody> {
    let boundary = Path::rectangle(rect);
    let region = Region::Rectangle(*rect);

    let mut labelled: Vec<(String, OneForm)> = forms
        .iter()
        .map(|f| (f.label().to_string(), f.build(model)))
        .collect();
    if random_forms > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.expect("validated"));
        for i in 0..random_forms {
            let p1 = Poly2::random(&mut rng, 3, 1.0);
            let p2 = Poly2::random(&mut rng, 3, 1.0);
            labelled.push((format!("poly-{i}"), OneForm::from_polys(model, &p1, &p2)));
        }
    }

    let mut table = Table::new("green", &["form", "loop_integral", "region_integral", "gap"])?;
    let mut stats = ResidualStats::new();
    for (label, form) in &labelled {
        let around = loop_integral(form, &boundary, tol)?;
        let inside = region_integral(&exterior_derivative(form), &region, tol)?;
        let gap = around - inside;
        stats.record(gap);
        table.push(vec![
            Cell::text(label.clone()),
            around.into(),
            inside.into(),
            gap.into(),
        ])?;
    }
    let pass = stats.max_abs() <= tolerance;
    let summary = format!(
        "{} form(s) on [{}, {}] x [{}, {}]: max |loop - region| = {:.3e} (tolerance {:.1e})",
        labelled.len(),
        rect.s[0],
        rect.s[1],
        rect.v[0],
        rect.v[1],
        stats.max_abs(),
        tolerance,
    );
    Ok((stats, pass, summary, vec![table]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(json: &str) -> Vec<TaskOutcome> {
        let config = RunConfig::from_json(json).unwrap();
        run_config(&config, "test-sha").unwrap()
    }

    fn ideal_config(tasks: &str) -> String {
        format!(r#"{{"model": {{"name": "ideal-gas"}}, "tasks": [{tasks}]}}"#)
    }

    #[test]
    fn maxwell_task_passes_on_the_ideal_gas() {
        let outcomes = run_json(&ideal_config(
            r#"{"task": "check-maxwell", "id": "mx", "grid": [5, 5]}"#,
        ));
        let r = &outcomes[0].report;
        assert!(r.pass, "{}", r.summary);
        assert!(r.max_abs_residual <= 1e-8);
        assert_eq!(r.origin_module, "maxwell");
        assert_eq!(outcomes[0].tables[0].rows().len(), 4 * 25);
        assert_eq!(r.table_files, vec!["mx.residuals.csv"]);
    }

    #[test]
    fn closure_task_fails_on_the_corrupted_model() {
        let config = RunConfig::from_json(
            r#"{"model": {"name": "ideal-gas", "corrupted": true},
                "tasks": [{"task": "verify-closure", "id": "c", "seed": 5,
                           "points": 20, "el_paths": 2}]}"#,
        )
        .unwrap();
        let outcomes = run_config(&config, "sha").unwrap();
        let r = &outcomes[0].report;
        assert!(!r.pass);
        assert!(r.max_abs_residual >= 0.5, "detection margin: {}", r.max_abs_residual);
        assert!(r.config.get("model").is_some()); // re-runnable echo
    }

    #[test]
    fn closure_task_passes_on_consistent_models() {
        let config = RunConfig::from_json(
            r#"{"model": {"name": "van-der-waals", "params": {"a": 0.1, "b": 0.05}},
                "tasks": [{"task": "verify-closure", "id": "c", "seed": 5,
                           "points": 30, "el_paths": 3}]}"#,
        )
        .unwrap();
        let outcomes = run_config(&config, "sha").unwrap();
        assert!(outcomes[0].report.pass, "{}", outcomes[0].report.summary);
    }

    #[test]
    fn path_and_variation_tasks_pass_and_record_tables() {
        let outcomes = run_json(&ideal_config(
            r#"{"task": "integrate-path", "id": "pi", "seed": 7,
                "from": [0.0, 1.0], "to": [1.0, 2.0], "paths": 5},
               {"task": "variational-sweep", "id": "vs", "seed": 9,
                "from": [0.0, 1.0], "to": [1.0, 2.0], "count": 5}"#,
        ));
        assert!(outcomes[0].report.pass, "{}", outcomes[0].report.summary);
        assert_eq!(outcomes[0].tables[0].rows().len(), 6); // chord + 5
        assert!(outcomes[1].report.pass, "{}", outcomes[1].report.summary);
        // The work-form contrast shows up in the table's last column.
        let any_large = outcomes[1].tables[0]
            .rows()
            .iter()
            .all(|row| matches!(row[3], Cell::Num(w) if w.abs() > 1e-3));
        assert!(any_large);
    }

    #[test]
    fn cycle_task_checks_carnot_efficiency() {
        let outcomes = run_json(&ideal_config(
            r#"{"task": "run-cycle", "id": "heat-engine",
                "cycle": {"type": "carnot", "t_hot": 0.6666666666666666,
                          "t_cold": 0.3333333333333333, "s_low": 0.0, "s_high": 1.0}}"#,
        ));
        let r = &outcomes[0].report;
        assert!(r.pass, "{}", r.summary);
        assert!(r.summary.contains("efficiency gap"));
        assert_eq!(outcomes[0].tables.len(), 2);
        assert_eq!(outcomes[0].tables[0].rows().len(), 4);
    }

    #[test]
    fn green_task_covers_named_and_random_forms() {
        let outcomes = run_json(&ideal_config(
            r#"{"task": "green-check", "id": "gr",
                "rect": {"s": [0.0, 1.0], "v": [1.0, 2.0]},
                "random_forms": 4, "seed": 21}"#,
        ));
        let r = &outcomes[0].report;
        assert!(r.pass, "{}", r.summary);
        assert_eq!(outcomes[0].tables[0].rows().len(), 3 + 4);
    }

    #[test]
    fn identical_configs_produce_identical_tables() {
        let json = ideal_config(
            r#"{"task": "verify-closure", "id": "c", "seed": 31, "points": 15,
                "el_paths": 2},
               {"task": "green-check", "id": "g",
                "rect": {"s": [0.2, 0.8], "v": [1.2, 1.9]},
                "random_forms": 3, "seed": 77}"#,
        );
        let a = run_json(&json);
        let b = run_json(&json);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.tables.len(), y.tables.len());
            for (tx, ty) in x.tables.iter().zip(&y.tables) {
                assert_eq!(tx.to_csv(), ty.to_csv());
            }
            assert_eq!(x.report.to_json(), y.report.to_json());
        }
    }

    #[test]
    fn output_dir_resolution_prefers_the_environment() {
        let config = RunConfig::from_json(&ideal_config(
            r#"{"task": "check-maxwell", "id": "m", "grid": [2, 2]}"#,
        ))
        .unwrap();
        // No env, no config field: current directory.
        assert_eq!(resolve_output_dir(&config), PathBuf::from("."));
        let mut with_dir = config.clone();
        with_dir.output_dir = Some("reports".into());
        assert_eq!(resolve_output_dir(&with_dir), PathBuf::from("reports"));
    }
}

