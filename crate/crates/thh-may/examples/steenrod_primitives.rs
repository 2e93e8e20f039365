//! The dual Steenrod algebra: conjugate coproducts, the antipode recursion,
//! and comodule primitives of the mod-p Moore factor.

use thh_may::fp::Prime;
use thh_may::scenarios::build_inputs;
use thh_may::steenrod::DualSteenrod;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Prime::new(3)?;
    let a = DualSteenrod::new(p, 20);
    let pres = a.presentation();

    let tau1 = a.tau(1).unwrap();
    println!("generators of A_* up to degree 20:");
    for g in pres.generators() {
        println!("  |{}| = {}", g.name, g.degree);
    }
    print!("Δ(τ̄_1) =");
    for ((left, right), c) in a.coproduct_gen(tau1).terms() {
        print!(
            " + {}·({} ⊗ {})",
            c,
            pres.display_monomial(left),
            pres.display_monomial(right)
        );
    }
    println!();
    println!(
        "the un-conjugated τ_1, through the antipode recursion: {}",
        pres.display_element(&a.literal_tau(1))
    );
    a.check_hopf_axioms(20)?;
    println!("Hopf axioms verified to degree 20");

    // every coaction table in the pipeline satisfies the comodule axiom
    let inputs = build_inputs(3, 20)?;
    inputs.homology_of_graded.check_comodule_axiom()?;
    inputs.homology_of_j.check_comodule_axiom()?;
    inputs.v1_factor.check_comodule_axiom()?;
    println!("comodule axioms verified for every input coaction table");
    Ok(())
}
