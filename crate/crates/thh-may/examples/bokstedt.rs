//! The Bökstedt-convention run for the graded ring: Hochschild input, the
//! d_{p−1} family on the divided towers, collapse, and hidden extensions.

use thh_may::scenarios::run_bokstedt;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p, n) = parse_args(3, 30);
    let result = run_bokstedt(p, n)?;
    println!(
        "bokstedt p={p} N={n}: {} in every resolved degree <= {}",
        if result.ok { "match" } else { "MISMATCH" },
        result.resolved_max
    );
    for (from, to) in &result.renamings {
        println!("  extension: {from} = {to}");
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
