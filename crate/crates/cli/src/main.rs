use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geolen_cli::config::{load_config, RunConfig, SuiteConfig};
use geolen_cli::outputs::{emit_outputs, summary};
use geolen_cli::run_suite;
use geolen_core::hyperbolic::NormConvention;

#[derive(Parser)]
#[command(
    name = "geolen",
    version,
    about = "Geodesic length variations on punctured tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for report.json, checks.csv and plots.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = parse_convention)]
    convention: Option<NormConvention>,
    #[arg(long, global = true, value_name = "N")]
    max_word_len: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    cells: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Geodesic lengths and hyperbolic geometry checks.
    Length,
    /// First variations, with the Fenchel–Nielsen finite-difference oracle.
    FirstVariation,
    SecondVariation,
    /// Plurisubharmonicity bounds per geodesic and for sums.
    PshCheck,
    /// Spectral operators along geodesics.
    OperatorTest,
    /// Everything enabled in the config.
    Suite,
}

fn parse_convention(s: &str) -> Result<NormConvention, String> {
    s.parse()
        .map_err(|_| format!("expected hermitian or riemannian, got {s:?}"))
}

fn selection(c: Command) -> SuiteConfig {
    let mut s = SuiteConfig::all(false);
    match c {
        Command::Length => s.geometry = true,
        Command::FirstVariation => {
            s.first_variation = true;
            s.family = true;
        }
        Command::SecondVariation => s.second_variation = true,
        Command::PshCheck => s.psh = true,
        Command::OperatorTest => s.operators = true,
        Command::Suite => s = SuiteConfig::all(true),
    }
    s
}

fn run(cli: Cli) -> Result<bool, String> {
    let mut config = match &cli.config {
        Some(p) => load_config(p).map_err(|e| e.to_string())?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    if let Some(c) = cli.convention {
        config.convention = c;
    }
    if let Some(n) = cli.max_word_len {
        config.truncation.max_word_len = n;
    }
    if let Some(n) = cli.cells {
        config.mesh.cells = n;
    }
    if cli.out.is_some() {
        config.out = cli.out.clone();
    }
    config.validate().map_err(|e| e.to_string())?;
    let report = run_suite(&config, &selection(cli.command)).map_err(|e| e.to_string())?;
    print!("{}", summary(&report));
    if let Some(dir) = &config.out {
        let files = emit_outputs(&report, dir).map_err(|e| e.to_string())?;
        println!("wrote {} files to {}", files.len(), dir.display());
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
