//! Randomized invariants over the state plane: model algebra, chart
//! round-trips, and integral identities that must hold for any inputs.

use std::sync::Arc;

use proptest::prelude::*;

use thermoforms::paths::Path;
use thermoforms::{
    action, carnot, chart_values, closure_residual, exterior_derivative, invert_to_chart,
    line_integral, loop_integral, region_integral, run_cycle, Chart, DerivMode, DomainBox,
    Eos, EosRef, IdealGas, OneForm, Poly2, Region, Tolerances, VanDerWaals,
};

fn ideal() -> EosRef {
    Arc::new(IdealGas::new())
}

fn state() -> impl Strategy<Value = (f64, f64)> {
    (-2.0..3.0f64, 0.3..7.9f64)
}

fn sub_rectangle() -> impl Strategy<Value = DomainBox> {
    (-1.9..1.5f64, 0.1..1.4f64, 0.4..5.5f64, 0.1..2.0f64)
        .prop_map(|(s0, ds, v0, dv)| DomainBox::new(s0, s0 + ds, v0, v0 + dv).unwrap())
}

proptest! {
    #[test]
    fn ideal_gas_equation_of_state_holds((s, v) in state()) {
        let m = ideal();
        let t = m.temperature(s, v);
        let p = m.pressure(s, v);
        prop_assert!((p * v - t).abs() <= 1e-12 * t.abs());
    }

    #[test]
    fn vdw_with_zero_parameters_degenerates_to_the_ideal_gas((s, v) in state()) {
        let vdw = VanDerWaals::new(0.0, 0.0).unwrap();
        let gas = IdealGas::new();
        prop_assert!((vdw.energy(s, v) - gas.energy(s, v)).abs() <= 1e-13 * gas.energy(s, v));
        prop_assert!((vdw.pressure(s, v) - gas.pressure(s, v)).abs()
            <= 1e-12 * gas.pressure(s, v).abs());
        prop_assert!((vdw.temperature(s, v) - gas.temperature(s, v)).abs()
            <= 1e-12 * gas.temperature(s, v));
    }

    #[test]
    fn chart_inversions_round_trip((s, v) in state()) {
        let m = ideal();
        let tol = Tolerances::default();
        for chart in Chart::all() {
            let (c1, c2) = chart_values(m.as_ref(), chart, s, v);
            let (rs, rv) =
                invert_to_chart(m.as_ref(), chart, c1, c2, &tol).unwrap().coords();
            prop_assert!((rs - s).abs() <= 1e-9 && (rv - v).abs() <= 1e-9,
                "chart {chart}: ({rs}, {rv}) vs ({s}, {v})");
        }
    }

    #[test]
    fn closure_residual_engines_agree((s, v) in state()) {
        let m = ideal();
        let a = closure_residual(m.as_ref(), s, v, DerivMode::Analytic);
        let d = closure_residual(m.as_ref(), s, v, DerivMode::DualNumber);
        prop_assert!((a - d).abs() <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_differential_closes_every_rectangle(rect in sub_rectangle()) {
        let m = ideal();
        let tol = Tolerances::default();
        let du = loop_integral(&OneForm::du(&m), &Path::rectangle(&rect), &tol).unwrap();
        prop_assert!(du.abs() <= 1e-9);
    }

    #[test]
    fn reversing_a_path_negates_the_heat_integral(
        (s, v) in (-1.0..1.0f64, 1.0..3.0f64),
        (ds, dv) in (0.3..1.2f64, 0.3..1.2f64),
        bend in -0.2..0.2f64,
    ) {
        let m = ideal();
        let tol = Tolerances::default();
        let path = Path::curved((s, v), (s + ds, v + dv), &[bend], &[-bend / 2.0]);
        let heat = OneForm::heat(&m);
        let forward = line_integral(&heat, &path, &tol).unwrap();
        let backward = line_integral(&heat, &path.reversed(), &tol).unwrap();
        prop_assert!((forward + backward).abs() <= 1e-10 * forward.abs().max(1.0));
    }

    #[test]
    fn greens_theorem_for_random_polynomial_forms(
        rect in sub_rectangle(),
        seed in 0u64..1_000_000,
    ) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = ideal();
        let tol = Tolerances::default();
        let p = Poly2::random(&mut rng, 3, 1.0);
        let q = Poly2::random(&mut rng, 3, 1.0);
        let form = OneForm::from_polys(&m, &p, &q);
        let around = loop_integral(&form, &Path::rectangle(&rect), &tol).unwrap();
        let inside =
            region_integral(&exterior_derivative(&form), &Region::Rectangle(rect), &tol)
                .unwrap();
        prop_assert!((around - inside).abs() <= 1e-8 * around.abs().max(1.0),
            "loop {around} vs region {inside}");
    }

    #[test]
    fn action_depends_only_on_endpoints(
        (s, v) in (-1.2..0.8f64, 0.8..3.0f64),
        (ds, dv) in (0.2..1.5f64, 0.2..1.5f64),
        bend_s in -0.15..0.15f64,
        bend_v in -0.15..0.15f64,
    ) {
        let m = ideal();
        let tol = Tolerances::default();
        let a = (s, v);
        let b = (s + ds, v + dv);
        let straight = action(&m, &Path::straight(a, b), &tol).unwrap();
        let curved = action(&m, &Path::curved(a, b, &[bend_s], &[bend_v]), &tol).unwrap();
        let delta_u = m.energy(b.0, b.1) - m.energy(a.0, a.1);
        prop_assert!((straight - delta_u).abs() <= 1e-9 * delta_u.abs().max(1.0));
        prop_assert!((curved - straight).abs() <= 1e-9 * delta_u.abs().max(1.0));
    }

    #[test]
    fn carnot_efficiency_matches_the_temperature_ratio(
        t_cold in 0.4..0.8f64,
        gap in 0.05..0.3f64,
        s_low in -0.5..0.0f64,
        span in 0.1..0.8f64,
    ) {
        let m = ideal();
        let tol = Tolerances::default();
        let t_hot = t_cold + gap;
        let segments = carnot(&m, t_hot, t_cold, s_low, s_low + span, &tol).unwrap();
        let report = run_cycle(&m, &segments, &tol).unwrap();
        prop_assert!((report.efficiency - (1.0 - t_cold / t_hot)).abs() <= 1e-6);
        prop_assert!(report.first_law_residual.abs() <= 1e-8);
        prop_assert!(report.q_in >= 0.0 && report.w_net >= 0.0);
    }
}
