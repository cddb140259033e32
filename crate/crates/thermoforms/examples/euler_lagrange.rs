//! Treats L = T(S,V) dS/dV - P(S,V) as a Lagrangian with V as the
//! independent variable (and the transposed form with S independent).
//! Because the action is the line integral of the exact form dU, *every*
//! monotone path is a stationary point: the Euler-Lagrange equations
//! reduce to the closure relation and are satisfied identically, not just
//! on special trajectories.

use std::sync::Arc;

use thermoforms::paths::Path;
use thermoforms::{euler_lagrange_residuals, CorruptedPressure, EosRef, IdealGas};

fn main() -> thermoforms::Result<()> {
    let gas: EosRef = Arc::new(IdealGas::new());

    // A bent but monotone path from (0, 1) to (1, 2).
    let path = Path::curved((0.0, 1.0), (1.0, 2.0), &[0.03, -0.02], &[0.04]);

    println!("ideal gas, Euler-Lagrange residuals along a curved path:");
    println!("{:>6} {:>14} {:>14}", "t", "V-equation", "S-equation");
    let mut worst = 0.0f64;
    for i in 1..10 {
        let t = i as f64 / 10.0;
        let (r_v, r_s) = euler_lagrange_residuals(gas.as_ref(), &path, t)?;
        worst = worst.max(r_v.abs()).max(r_s.abs());
        println!("{t:>6.2} {r_v:>14.2e} {r_s:>14.2e}");
    }
    assert!(worst < 1e-8);

    // Break exactness and the same residuals lock onto the size of the
    // corruption: -1 and +1 for P -> P + S.
    let corrupted = CorruptedPressure::new(gas);
    let (r_v, r_s) = euler_lagrange_residuals(&corrupted, &path, 0.5)?;
    println!();
    println!("corrupted model at t = 0.5: V-equation {r_v:.6}, S-equation {r_s:.6}");
    Ok(())
}
