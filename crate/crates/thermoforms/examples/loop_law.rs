//! Around any closed curve in the state plane, the net change in internal
//! energy is zero, so the heat taken in equals the work done:
//! the loop integrals of T dS and P dV agree even though neither form is
//! exact. This is the first law for cyclic processes.

use std::sync::Arc;

use thermoforms::paths::{loop_integral, Path};
use thermoforms::{DomainBox, EosRef, IdealGas, OneForm, Tolerances};

fn main() -> thermoforms::Result<()> {
    let gas: EosRef = Arc::new(IdealGas::new());
    let tol = Tolerances::default();
    let rect = DomainBox::new(0.0, 1.0, 1.0, 2.0)?;
    let boundary = Path::rectangle(&rect);

    let du = loop_integral(&OneForm::du(&gas), &boundary, &tol)?;
    let q = loop_integral(&OneForm::heat(&gas), &boundary, &tol)?;
    let w = loop_integral(&OneForm::work(&gas), &boundary, &tol)?;

    println!("counter-clockwise around S in [0,1], V in [1,2]:");
    println!("  loop integral of dU    = {du:.3e}");
    println!("  loop integral of T dS  = {q:.12}");
    println!("  loop integral of P dV  = {w:.12}");
    println!("  heat - work            = {:.3e}", q - w);

    assert!(du.abs() < 1e-9);
    assert!((q - w).abs() < 1e-9);

    // The common value has a closed form for this model; the loop done
    // numerically lands on it.
    let expected = (2f64.powf(-2.0 / 3.0) - 1.0) * (1.0 - (2.0 / 3.0f64).exp());
    println!("  closed-form value      = {expected:.12}");
    assert!((q - expected).abs() < 1e-9);
    Ok(())
}
