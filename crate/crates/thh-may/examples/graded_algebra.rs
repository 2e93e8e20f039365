//! Graded-commutative algebra arithmetic: presentations, Koszul signs,
//! divided powers and their repacked truncated form, and Poincaré series.

use thh_may::algebra::{gamma_repack, repacked_presentation, GeneratorSpec, Monomial, Presentation};
use thh_may::fp::Prime;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Prime::new(3)?;

    // E(α_1) ⊗ P(v_1) at p = 3
    let pres = Presentation::new(
        p,
        vec![
            GeneratorSpec::exterior("α_1", 3, 1),
            GeneratorSpec::polynomial("v_1", 4, 1),
        ],
    )?;
    let a = pres.gen_element("α_1")?;
    let v = pres.gen_element("v_1")?;
    println!("α_1 · α_1 = {}", pres.display_element(&pres.multiply(&a, &a)?));
    println!("α_1 · v_1 = {}", pres.display_element(&pres.multiply(&a, &v)?));
    println!(
        "dims of E(α_1) ⊗ P(v_1) in degrees 0..=8: {:?}",
        pres.poincare_series(8)?.dims
    );

    // a divided power tower: γ_i γ_j = (i+j choose j) γ_{i+j}
    let gamma = Presentation::new(p, vec![GeneratorSpec::divided("σb", 12, 3)])?;
    let g1 = gamma.monomial_element(Monomial::gen(0, 1), 1);
    let g2 = gamma.monomial_element(Monomial::gen(0, 2), 1);
    println!(
        "γ_1(σb) · γ_2(σb) = {} (the binomial (3 choose 1) vanishes mod 3)",
        gamma.display_element(&gamma.multiply(&g1, &g2)?)
    );

    // Γ(z) ≅ P_3(z, γ_3(z), γ_9(z), …): γ_5 repacks as 2·γ_3·z²
    let z = Presentation::new(p, vec![GeneratorSpec::divided("z", 4, 0)])?;
    let (rep, towers) = repacked_presentation(&z, 40)?;
    let g5 = gamma_repack(&rep, &towers[0], 5)?;
    println!("γ_5(z) in the repacked form: {}", rep.display_element(&g5));
    Ok(())
}
