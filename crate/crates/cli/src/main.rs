use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use robsens::experiments::{
    run_converge, run_model_select, run_report, run_sensitivity, ExperimentConfig, ExperimentKind,
};
use robsens::Error;

/// Local sensitivity of Bayesian posteriors to likelihood and prior distortions.
#[derive(Debug, Parser)]
#[command(name = "robsens", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sensitivity against sample size for simulated exponential data.
    Converge(Common),
    /// Sensitivity tables for fitted models across data-generating processes.
    ModelSelect(Common),
    /// Per-model reports and plot data for a dataset.
    Report(Common),
    /// A single sensitivity estimate.
    Sensitivity(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment configuration. Built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Command {
    fn parts(&self) -> (ExperimentKind, &Common) {
        match self {
            Command::Converge(c) => (ExperimentKind::Converge, c),
            Command::ModelSelect(c) => (ExperimentKind::ModelSelect, c),
            Command::Report(c) => (ExperimentKind::Report, c),
            Command::Sensitivity(c) => (ExperimentKind::Sensitivity, c),
        }
    }
}

fn load(common: &Common, kind: ExperimentKind) -> robsens::Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(declared) = config.experiment {
        if declared != kind {
            return Err(Error::Config(format!(
                "config declares experiment {declared:?}, command is {kind:?}"
            )));
        }
    }
    if let Some(seed) = common.seed {
        config = config.with_seed(seed);
    }
    Ok(config)
}

fn run(kind: ExperimentKind, config: &ExperimentConfig, out: &Path) -> robsens::Result<String> {
    Ok(match kind {
        ExperimentKind::Converge => {
            let r = run_converge(config)?;
            r.write(out)?;
            let last = r.rows.last().expect("grid is non-empty");
            format!(
                "n = {}: delta = {:.4}, 95% interval [{:.4}, {:.4}], reference {}",
                last.n, last.delta, last.ci_lo, last.ci_hi, r.reference
            )
        }
        ExperimentKind::ModelSelect => {
            let r = run_model_select(config)?;
            r.write(out)?;
            r.format_tables()
        }
        ExperimentKind::Report => {
            let r = run_report(config)?;
            r.write(out)?;
            r.format_table()
        }
        ExperimentKind::Sensitivity => {
            let r = run_sensitivity(config)?;
            r.write(out)?;
            r.report.to_json()?
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = cli.command.parts();
    let result = load(common, kind).and_then(|config| run(kind, &config, &common.out));
    match result {
        Ok(summary) => {
            // A closed pipe on stdout is not a failure; the files are written.
            let _ = writeln!(std::io::stdout(), "{}", summary.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({
                "error": { "kind": e.kind(), "message": e.to_string() }
            });
            eprintln!("{body}");
            ExitCode::FAILURE
        }
    }
}
