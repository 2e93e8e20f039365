//! The coefficient variant: primitives of A_* ⊗ E(σξ̃_1^p, σξ̃_2) ⊗ P(στ̃_2)
//! ⊗ Γ(σb), with the corrected primitive representatives.

use thh_may::scenarios::run_thh_j_ell;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p, n) = parse_args(3, 24);
    let result = run_thh_j_ell(p, n)?;
    println!(
        "thh-j-ell p={p} N={n}: {} in every degree <= {}",
        if result.ok { "match" } else { "MISMATCH" },
        result.resolved_max
    );
    for (formula, name) in &result.renamings {
        println!("  {name} = {formula}");
    }
    for note in &result.notes {
        println!("  {note}");
    }
    std::process::exit(if result.ok { 0 } else { 1 });
}

fn parse_args(p: u32, n: u32) -> (u32, u32) {
    let mut args = std::env::args().skip(1);
    let p = args.next().and_then(|s| s.parse().ok()).unwrap_or(p);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(n);
    (p, n)
}
