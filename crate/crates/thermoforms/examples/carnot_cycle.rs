//! Builds a Carnot cycle — two isotherms joined by two adiabats — as
//! implicit contours of the equation of state, runs it, and compares the
//! measured efficiency with 1 - Tc/Th. Reversing the cycle turns the
//! engine into a heat pump with the signs of every energy flow flipped.

use std::sync::Arc;

use thermoforms::{carnot, reverse_cycle, run_cycle, EosRef, IdealGas, Tolerances};

fn main() -> thermoforms::Result<()> {
    let gas: EosRef = Arc::new(IdealGas::new());
    let tol = Tolerances::default();
    let (t_hot, t_cold) = (2.0 / 3.0, 1.0 / 3.0);

    let segments = carnot(&gas, t_hot, t_cold, 0.0, 1.0, &tol)?;
    let report = run_cycle(&gas, &segments, &tol)?;

    println!("Carnot engine between T = {t_hot:.4} and T = {t_cold:.4}:");
    for seg in &report.segments {
        println!(
            "  {:<11} ({:+.3}, {:.3}) -> ({:+.3}, {:.3})   heat {:+.6}  work {:+.6}",
            seg.kind, seg.start_s, seg.start_v, seg.end_s, seg.end_v, seg.heat, seg.work
        );
    }
    println!("  q_in = {:.9}, q_out = {:.9}, w_net = {:.9}", report.q_in, report.q_out,
        report.w_net);
    println!("  first-law residual (q_in - q_out) - w_net = {:.2e}", report.first_law_residual);
    println!("  efficiency = {:.9}   (1 - Tc/Th = {:.9})", report.efficiency,
        1.0 - t_cold / t_hot);
    assert!((report.efficiency - 0.5).abs() < 1e-9);

    let pump = run_cycle(&gas, &reverse_cycle(&segments), &tol)?;
    println!();
    println!("reversed (heat pump): q_in = {:.6}, w_net = {:.6}", pump.q_in, pump.w_net);
    assert!((pump.w_net + report.w_net).abs() < 1e-9);
    Ok(())
}
