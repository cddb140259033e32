//! Each Legendre transform of the internal energy — Helmholtz F = U - TS,
//! enthalpy H = U + PV, Gibbs G = U - TS + PV — has a natural coordinate
//! chart and an exact differential there. Closing each potential's 1-form
//! yields exactly one of the four Maxwell relations, so the relations are
//! exhausted by the potentials: U -> case 1, F -> case 2, G -> case 3,
//! H -> case 4.

use std::sync::Arc;

use thermoforms::{maxwell_from_potential, maxwell_residual, DerivMode, EosRef, IdealGas,
    PotentialKind};

fn main() -> thermoforms::Result<()> {
    let gas: EosRef = Arc::new(IdealGas::new());
    let (s, v) = (0.0, 1.0);

    println!("potentials at the reference state (S, V) = ({s}, {v}):");
    for kind in PotentialKind::all() {
        let value = kind.value(gas.as_ref(), s, v);
        let case = kind.maxwell_case();
        let via_potential = maxwell_from_potential(&gas, kind, s, v);
        let direct = maxwell_residual(gas.as_ref(), case, s, v, DerivMode::Analytic)?;
        println!(
            "  {} = {value:>8.5} on the {} chart -> case {}: closure {:+.1e} \
             (direct route {:+.1e})",
            kind.label(),
            kind.natural_chart(),
            case.index(),
            via_potential,
            direct,
        );
        assert!(via_potential.abs() < 1e-8);
    }

    // The claimed first derivatives of each potential (e.g. dF = -S dT - P dV)
    // check out against finite differences of its value.
    println!();
    println!("first-derivative checks (claimed vs measured):");
    for kind in PotentialKind::all() {
        let (r1, r2) = kind.partial_residuals(gas.as_ref(), 0.3, 1.4)?;
        println!("  d{}: residuals {:+.1e}, {:+.1e}", kind.label(), r1, r2);
        assert!(r1.abs() < 1e-6 && r2.abs() < 1e-6);
    }
    Ok(())
}
