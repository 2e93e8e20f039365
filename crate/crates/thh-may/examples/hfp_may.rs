//! The filtration spectral sequence whose output is known: the d_1 family
//! collapses the page onto the homology of THH(j), with the survivor
//! renaming table.

use thh_may::scenarios::run_hfp_may;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p, n) = parse_args(3, 30);
    let result = run_hfp_may(p, n)?;
    println!(
        "hfp-may p={p} N={n}: {} in every resolved degree <= {}",
        if result.ok { "match" } else { "MISMATCH" },
        result.resolved_max
    );
    println!("survivor renaming:");
    for (from, to) in &result.renamings {
        println!("  {from}  ->  {to}");
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
