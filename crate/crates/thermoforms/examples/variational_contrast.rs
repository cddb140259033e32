//! Perturbs a path with fixed endpoints and watches two functionals react.
//! The integral of dU is stationary — in fact constant — under every such
//! perturbation, because it only sees the endpoints. The work integral has
//! no such protection and shifts at first order.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thermoforms::paths::{generate_paths, Path};
use thermoforms::{form_variation, variational_check, EosRef, IdealGas, OneForm, Tolerances};

fn main() -> thermoforms::Result<()> {
    let gas: EosRef = Arc::new(IdealGas::new());
    let tol = Tolerances::default();
    let base = Path::straight((0.0, 1.0), (1.0, 2.0));

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let family = generate_paths(&mut rng, &gas.domain(), (0.0, 1.0), (1.0, 2.0), 8, 0.1)?;

    let du = variational_check(&gas, &base, &family, &tol)?;
    let work = form_variation(&OneForm::work(&gas), &base, &family, &tol)?;

    println!("{:>8} {:>12} {:>16} {:>16}", "member", "deflection", "delta(int dU)", "delta(int PdV)");
    for (i, (d, w)) in du.iter().zip(&work).enumerate() {
        println!(
            "{i:>8} {:>12.4} {:>16.2e} {:>16.2e}",
            d.perturbation_amplitude, d.delta, w.delta
        );
        assert!(d.delta.abs() < 1e-9);
        assert!(w.delta.abs() > 1e-3);
    }
    println!();
    println!("Exactness shows up as a variational statement: delta(int dU) = 0");
    println!("for every fixed-endpoint perturbation, at finite amplitude.");
    Ok(())
}
