//! Green's theorem on the state plane: the loop integral of a 1-form
//! around a rectangle equals the area integral of its exterior derivative
//! inside. For dU the exterior derivative is zero; for the work form it is
//! -dP/dS dS^dV, whose area integral reproduces the net work; and the same
//! identity holds for arbitrary polynomial forms with no thermodynamic
//! meaning at all.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thermoforms::paths::{loop_integral, region_integral, Path, Region};
use thermoforms::{exterior_derivative, DomainBox, EosRef, IdealGas, OneForm, Poly2, Tolerances};

fn main() -> thermoforms::Result<()> {
    let gas: EosRef = Arc::new(IdealGas::new());
    let tol = Tolerances::default();
    let rect = DomainBox::new(0.2, 0.9, 1.1, 1.8)?;
    let boundary = Path::rectangle(&rect);
    let region = Region::Rectangle(rect);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut forms = vec![
        ("dU", OneForm::du(&gas)),
        ("T dS", OneForm::heat(&gas)),
        ("P dV", OneForm::work(&gas)),
    ];
    for _ in 0..3 {
        let p = Poly2::random(&mut rng, 3, 1.0);
        let q = Poly2::random(&mut rng, 3, 1.0);
        forms.push(("random polynomial", OneForm::from_polys(&gas, &p, &q)));
    }

    println!("{:>20} {:>16} {:>16} {:>10}", "form", "around loop", "over region", "gap");
    for (name, form) in &forms {
        let around = loop_integral(form, &boundary, &tol)?;
        let inside = region_integral(&exterior_derivative(form), &region, &tol)?;
        println!("{name:>20} {around:>16.10} {inside:>16.10} {:>10.1e}", around - inside);
        assert!((around - inside).abs() < 1e-8);
    }
    Ok(())
}
