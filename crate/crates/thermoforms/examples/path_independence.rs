//! Integrates T dS - P dV along many different paths between the same two
//! states. The integral is the same every time — it is the energy
//! difference U(end) - U(start), a state function — even though the heat
//! and work integrals along those paths differ wildly.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thermoforms::paths::{generate_paths, line_integral, Path};
use thermoforms::{action, EosRef, IdealGas, OneForm, Tolerances};

fn main() -> thermoforms::Result<()> {
    let gas: EosRef = Arc::new(IdealGas::new());
    let tol = Tolerances::default();
    let (a, b) = ((0.0, 1.0), (1.0, 2.0));
    let delta_u = gas.energy(b.0, b.1) - gas.energy(a.0, a.1);

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut family = vec![Path::straight(a, b)];
    family.extend(generate_paths(&mut rng, &gas.domain(), a, b, 6, 0.15)?);

    let heat = OneForm::heat(&gas);
    println!("U(1,2) - U(0,1) = {delta_u:.12}");
    println!("{:>6} {:>18} {:>18} {:>14}", "path", "action", "heat absorbed", "act - dU");
    for (i, path) in family.iter().enumerate() {
        let act = action(&gas, path, &tol)?;
        let q = line_integral(&heat, path, &tol)?;
        println!("{i:>6} {act:>18.12} {q:>18.12} {:>14.2e}", act - delta_u);
    }
    println!();
    println!("The action column never moves; the heat column does.");
    Ok(())
}
