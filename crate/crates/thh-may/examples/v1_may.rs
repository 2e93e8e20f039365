//! The V(1) filtration spectral sequence in full: d_1, the E_2 algebra, the
//! forced d_{p−1}, the structure table of the final answer — and the chart
//! of the E_{p−1} page with its differential strokes.

use thh_may::chart::render_ascii;
use thh_may::scenarios::run_v1_may;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (p, n) = parse_args(3, 36);
    let result = run_v1_may(p, n)?;
    println!(
        "v1-may p={p} N={n}: {} in every resolved degree <= {}",
        if result.ok { "match" } else { "MISMATCH" },
        result.resolved_max
    );
    for (from, to) in &result.renamings {
        println!("  {from}  ->  {to}");
    }
    for note in &result.notes {
        println!("  {note}");
    }
    if let Some(chart) = &result.chart {
        println!("\nthe E_{{p-1}} page:\n");
        println!("{}", render_ascii(chart));
    }
    std::process::exit(if result.ok { 0 } else { 1 });
}

fn parse_args(p: u32, n: u32) -> (u32, u32) {
    let mut args = std::env::args().skip(1);
    let p = args.next().and_then(|s| s.parse().ok()).unwrap_or(p);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(n);
    (p, n)
}
