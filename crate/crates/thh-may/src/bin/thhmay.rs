//! Command-line driver: run scenarios and emit charts and reports.
//!
//! ```text
//! thhmay --prime 3 --max-degree 40 --scenario all --emit json,svg --out out/
//! ```
//!
//! Exit status: 0 when every selected verdict matches, 1 on a mismatch or a
//! runtime failure, 2 on invalid flags or an invalid config file. Artifacts
//! are written under --out with deterministic names
//! ⟨scenario⟩-p⟨P⟩-N⟨N⟩.⟨ext⟩.

use clap::parser::ValueSource;
use clap::{CommandFactory, Parser, ValueEnum};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use thh_may::chart::{render_ascii, render_svg};
use thh_may::report::ReportDocument;
use thh_may::scenarios::{full_run, run_scenario, ScenarioId, ScenarioResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Bokstedt,
    #[value(name = "hfp-may")]
    HfpMay,
    Primitives,
    #[value(name = "v1-may")]
    V1May,
    #[value(name = "thh-j-ell")]
    ThhJEll,
    Les,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EmitArg {
    Ascii,
    Svg,
    Json,
    Csv,
}

impl EmitArg {
    fn ext(self) -> &'static str {
        match self {
            EmitArg::Ascii => "txt",
            EmitArg::Svg => "svg",
            EmitArg::Json => "json",
            EmitArg::Csv => "csv",
        }
    }
}

fn parse_prime(s: &str) -> Result<u32, String> {
    let n: u32 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    thh_may::fp::Prime::new(n)
        .map(|p| p.get())
        .map_err(|_| format!("`{n}`: an odd prime >= 3 is required"))
}

#[derive(Parser, Debug)]
#[command(
    name = "thhmay",
    version,
    about = "Bigraded spectral-sequence runs over F_p, with charts and reports"
)]
struct Cli {
    /// The odd prime p
    #[arg(long, default_value_t = 3, value_parser = parse_prime)]
    prime: u32,

    /// Total-degree cutoff N
    #[arg(long, default_value_t = 40)]
    max_degree: u32,

    /// Which scenario to run
    #[arg(long, value_enum, default_value_t = ScenarioArg::All)]
    scenario: ScenarioArg,

    /// Output formats (repeatable, comma-separable)
    #[arg(long, value_enum, value_delimiter = ',')]
    emit: Vec<EmitArg>,

    /// Output directory for artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Plain-text key=value file overriding the defaults
    #[arg(long)]
    config: Option<PathBuf>,
}

fn apply_config(cli: &mut Cli, path: &PathBuf) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut values: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!(
                "config line {} is not key=value: `{line}`",
                lineno + 1
            ));
        };
        values.insert(k.trim().to_string(), v.trim().to_string());
    }
    // explicit command-line flags win over the config file
    let matches = Cli::command().get_matches();
    let defaulted = |id: &str| matches.value_source(id) != Some(ValueSource::CommandLine);
    for (k, v) in values {
        match k.as_str() {
            "prime" if defaulted("prime") => {
                cli.prime = parse_prime(&v)?;
            }
            "max-degree" | "max_degree" if defaulted("max_degree") => {
                cli.max_degree = v
                    .parse()
                    .map_err(|_| format!("bad max-degree `{v}` in config"))?;
            }
            "scenario" if defaulted("scenario") => {
                cli.scenario = ScenarioArg::from_str(&v, true)
                    .map_err(|_| format!("bad scenario `{v}` in config"))?;
            }
            "emit" if defaulted("emit") => {
                cli.emit = v
                    .split(',')
                    .map(|x| EmitArg::from_str(x.trim(), true))
                    .collect::<Result<_, _>>()
                    .map_err(|_| format!("bad emit list `{v}` in config"))?;
            }
            "out" if defaulted("out") => {
                cli.out = PathBuf::from(v);
            }
            "prime" | "max-degree" | "max_degree" | "scenario" | "emit" | "out" => {}
            other => {
                return Err(format!("unknown config key `{other}`"));
            }
        }
    }
    Ok(())
}

fn emit_artifacts(cli: &Cli, result: &ScenarioResult) -> Result<(), Box<dyn std::error::Error>> {
    let report = ReportDocument::from_result(result);
    for kind in &cli.emit {
        let name = format!(
            "{}-p{}-N{}.{}",
            result.scenario.as_str(),
            cli.prime,
            cli.max_degree,
            kind.ext()
        );
        let path = cli.out.join(&name);
        let body = match kind {
            EmitArg::Json => report.to_json(),
            EmitArg::Csv => report.to_csv(),
            EmitArg::Ascii | EmitArg::Svg => {
                let Some(chart) = &result.chart else {
                    eprintln!(
                        "note: {} has no bigraded chart; skipping {}",
                        result.scenario.as_str(),
                        name
                    );
                    continue;
                };
                match kind {
                    EmitArg::Ascii => render_ascii(chart),
                    _ => render_svg(chart),
                }
            }
        };
        std::fs::write(&path, body)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    if let Some(path) = cli.config.clone() {
        if let Err(e) = apply_config(&mut cli, &path) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if !cli.emit.is_empty() {
        if let Err(e) = std::fs::create_dir_all(&cli.out) {
            eprintln!("error: cannot create {}: {e}", cli.out.display());
            return ExitCode::from(1);
        }
    }

    let results: Result<Vec<ScenarioResult>, _> = match cli.scenario {
        ScenarioArg::All => full_run(cli.prime, cli.max_degree),
        other => {
            let id = match other {
                ScenarioArg::Bokstedt => ScenarioId::Bokstedt,
                ScenarioArg::HfpMay => ScenarioId::HfpMay,
                ScenarioArg::Primitives => ScenarioId::Primitives,
                ScenarioArg::V1May => ScenarioId::V1May,
                ScenarioArg::ThhJEll => ScenarioId::ThhJEll,
                ScenarioArg::Les => ScenarioId::Les,
                ScenarioArg::All => unreachable!(),
            };
            run_scenario(id, cli.prime, cli.max_degree).map(|r| vec![r])
        }
    };
    let results = match results {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    let mut all_ok = true;
    for result in &results {
        all_ok &= result.ok;
        println!(
            "{} p={} N={}: {} (resolved degrees <= {})",
            result.scenario.as_str(),
            cli.prime,
            cli.max_degree,
            if result.ok { "match" } else { "MISMATCH" },
            result.resolved_max
        );
        if let Err(e) = emit_artifacts(&cli, result) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
