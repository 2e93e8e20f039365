//! Every scenario in dependency order, at one prime and cutoff.

use thh_may::scenarios::full_run;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p, n) = parse_args(3, 40);
    let t0 = std::time::Instant::now();
    let results = full_run(p, n)?;
    let mut all_ok = true;
    for r in &results {
        all_ok &= r.ok;
        println!(
            "{:>10}  p={p} N={n}: {} (resolved <= {})",
            r.scenario.as_str(),
            if r.ok { "match" } else { "MISMATCH" },
            r.resolved_max
        );
    }
    println!(
        "verdict: {} in {:?}",
        if all_ok { "all match" } else { "MISMATCH" },
        t0.elapsed()
    );
    std::process::exit(if all_ok { 0 } else { 1 });
}

fn parse_args(p: u32, n: u32) -> (u32, u32) {
    let mut args = std::env::args().skip(1);
    let p = args.next().and_then(|s| s.parse().ok()).unwrap_or(p);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(n);
    (p, n)
}
