//! The closure relation (dT/dV)_S + (dP/dS)_V = 0 is the condition for
//! T dS - P dV to be an exact differential. It holds identically for any
//! consistent equation of state and is broken, by exactly 1, when the
//! pressure is corrupted to P + S.

use std::sync::Arc;

use thermoforms::{closure_residual, CorruptedPressure, DerivMode, EosRef, IdealGas};

fn main() {
    let gas: EosRef = Arc::new(IdealGas::new());
    let corrupted = CorruptedPressure::new(gas.clone());

    let mut worst = 0.0f64;
    for (s, v) in gas.domain().grid(12, 12) {
        for mode in [DerivMode::Analytic, DerivMode::DualNumber] {
            worst = worst.max(closure_residual(gas.as_ref(), s, v, mode).abs());
        }
    }
    println!("ideal gas: max |(dT/dV)_S + (dP/dS)_V| over a 12x12 grid = {worst:.2e}");

    // The corrupted model leaves T alone and shifts P by S, so the
    // residual picks up exactly d(S)/dS = 1 at every state.
    let r = closure_residual(&corrupted, 0.4, 1.3, DerivMode::Analytic);
    println!("corrupted (P -> P + S) at (0.4, 1.3): residual = {r}");
    assert!((r - 1.0).abs() < 1e-12);
}
