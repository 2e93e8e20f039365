//! Comodule primitives of the mod-(p, v_1) homology of THH of the graded
//! ring: the seven named generators and the degreewise dimension match.

use thh_may::scenarios::run_primitives;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p, n) = parse_args(3, 24);
    let result = run_primitives(p, n)?;
    println!(
        "primitives p={p} N={n}: {} in every degree <= {}",
        if result.ok { "match" } else { "MISMATCH" },
        result.resolved_max
    );
    println!("named primitive generators:");
    for (formula, name) in &result.renamings {
        println!("  {name} = {formula}");
    }
    std::process::exit(if result.ok { 0 } else { 1 });
}

fn parse_args(p: u32, n: u32) -> (u32, u32) {
    let mut args = std::env::args().skip(1);
    let p = args.next().and_then(|s| s.parse().ok()).unwrap_or(p);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(n);
    (p, n)
}
