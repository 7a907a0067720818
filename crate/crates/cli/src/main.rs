use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ontolab::lab::SearchMode;
use ontolab::Backend;
use ontolab_cli::doc::GalleryName;
use ontolab_cli::{parse_scenario, run_command, CliError, RunFlags, Verb};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutFormat {
    Csv,
    Md,
}

/// Check free-choice, no-signalling and static-information assumptions on
/// finite models.
#[derive(Debug, Parser)]
#[command(name = "ontolab", version)]
struct Cli {
    verb: Verb,
    /// Scenario document (JSON).
    scenario: Option<PathBuf>,
    /// exact | float
    #[arg(long, value_parser = parse_backend)]
    backend: Option<Backend>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with status 1 when any check fails.
    #[arg(long)]
    assert: bool,
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
    /// Search evaluations.
    #[arg(long)]
    budget: Option<u64>,
    /// no_st | full_premises | fr_implies_ns
    #[arg(long, value_parser = parse_mode)]
    mode: Option<SearchMode>,
    /// Number of sweep models.
    #[arg(long)]
    n: Option<usize>,
    /// Alphabet size of every variable in a sweep.
    #[arg(long)]
    size: Option<usize>,
    /// Initial search penalty weight.
    #[arg(long)]
    penalty: Option<f64>,
    /// Gallery model, for `gallery` without a document.
    #[arg(long, value_enum)]
    name: Option<GalleryName>,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<SearchMode, String> {
    s.parse()
}

/// The rendered report and whether every check passed.
fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let doc = match &cli.scenario {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            Some(parse_scenario(&bytes)?)
        }
        None => None,
    };
    let flags = RunFlags {
        backend: cli.backend,
        tolerance: cli.tolerance,
        seed: cli.seed,
        budget: cli.budget,
        mode: cli.mode,
        n: cli.n,
        size: cli.size,
        penalty: cli.penalty,
        name: cli.name,
    };
    let report = run_command(cli.verb, doc.as_ref(), &flags)?;
    let text = match cli.out {
        OutFormat::Csv => report.to_csv(),
        OutFormat::Md => report.to_markdown(),
    };
    Ok((text, report.passed()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, passed)) => {
            print!("{text}");
            if cli.assert && !passed {
                eprintln!("ontolab: a check exceeded the tolerance");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("ontolab: {err}");
            ExitCode::from(2)
        }
    }
}
