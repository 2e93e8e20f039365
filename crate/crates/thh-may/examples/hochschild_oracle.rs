//! Hochschild homology two ways: the closed form for free algebras against
//! the normalized bar-complex oracle.

use thh_may::algebra::{GeneratorSpec, Presentation};
use thh_may::fp::Prime;
use thh_may::hochschild::{hh_bar_oracle, hh_free, SuspensionWeight};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = Prime::new(3)?;
    let n = 16;

    for (label, gens) in [
        ("E(x), |x| = 3", vec![GeneratorSpec::exterior("x", 3, 0)]),
        ("P(y), |y| = 4", vec![GeneratorSpec::polynomial("y", 4, 0)]),
        (
            "E(x) ⊗ P(y)",
            vec![
                GeneratorSpec::exterior("x", 3, 0),
                GeneratorSpec::polynomial("y", 4, 0),
            ],
        ),
    ] {
        let pres = Presentation::new(p, gens)?;
        let closed = hh_free(&pres, n, SuspensionWeight::Inherit)?;
        let closed_dims = closed.poincare_series(n)?;
        let oracle_dims = hh_bar_oracle(&pres, n)?;
        println!("{label}");
        println!("  closed form: {:?}", closed_dims.dims);
        println!("  bar oracle:  {:?}", oracle_dims.dims);
        assert_eq!(closed_dims.dims, oracle_dims.dims);
    }
    println!("closed forms and the bar oracle agree");
    Ok(())
}
