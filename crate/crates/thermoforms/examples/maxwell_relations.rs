//! Checks all four Maxwell relations on the ideal gas and a van der Waals
//! model, by two independent routes: held-constant chart partials
//! (finite differences against re-inverted coordinates) and ratios of
//! wedge products built from exact gradients.

use std::sync::Arc;

use thermoforms::{
    maxwell_residual, maxwell_sides, DerivMode, DomainBox, EosRef, IdealGas, MaxwellCase,
    Tolerances, VanDerWaals,
};

fn main() -> thermoforms::Result<()> {
    let tol = Tolerances::default();
    let models: Vec<EosRef> = vec![
        Arc::new(IdealGas::new()),
        // Keep the box clear of the fold where the attractive term makes
        // the (T,P) chart non-invertible.
        Arc::new(VanDerWaals::with_domain(
            0.1,
            0.05,
            DomainBox::new(-0.5, 3.0, 0.5, 4.0)?,
        )?),
    ];

    for model in &models {
        println!("model: {}", model.name());
        for case in MaxwellCase::all() {
            let mut worst_partials = 0.0f64;
            let mut worst_gap = 0.0f64;
            for (s, v) in model.domain().grid(8, 8) {
                let (lhs, rhs) =
                    maxwell_sides(model.as_ref(), case, s, v, DerivMode::CentralDifference, &tol)?;
                let wedge = maxwell_residual(model.as_ref(), case, s, v, DerivMode::Analytic)?;
                worst_partials = worst_partials.max((lhs - rhs).abs());
                worst_gap = worst_gap.max((lhs - rhs - wedge).abs());
            }
            println!(
                "  case {case}: max |lhs - rhs| = {worst_partials:.2e}, \
                 routes agree to {worst_gap:.2e}"
            );
        }
    }

    println!();
    println!("Both routes vanish on both models: the four relations are");
    println!("coordinate shadows of one fact, d(T dS - P dV) = 0.");
    Ok(())
}
