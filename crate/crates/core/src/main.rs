use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use qtcc::floquet::Mode;
use qtcc::harness::{emit_report, reaggregate, run_case, ExperimentConfig, SummaryRow};

#[derive(Parser)]
#[command(
    name = "qtcc",
    version,
    about = "Floquet time-crystal learning experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its report.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Resolve and check a configuration, printing it.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Recompute summary.csv from an existing attempts.csv.
    Report {
        /// Report directory.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides master_seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides mode (noiseless or qtcc).
    #[arg(long)]
    mode: Option<Mode>,
    /// Overrides attempts.
    #[arg(long)]
    attempts: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?,
            None => String::new(),
        };
        let mut config = ExperimentConfig::parse(&text).with_context(|| match &self.config {
            Some(path) => format!("in {}", path.display()),
            None => "in default configuration".to_string(),
        })?;
        if let Some(seed) = self.seed {
            config.master_seed = seed;
        }
        if let Some(mode) = self.mode {
            config.mode = mode;
        }
        if let Some(attempts) = self.attempts {
            config.attempts = attempts;
        }
        config.validate()?;
        Ok(config)
    }
}

fn print_summary(rows: &[SummaryRow]) {
    println!(
        "{:<22} {:<10} {:>5} {:>12} {:>12} {:>12} {:>12}",
        "group", "mode", "count", "average", "maximum", "minimum", "median"
    );
    for r in rows {
        println!(
            "{:<22} {:<10} {:>5} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            r.group, r.mode, r.count, r.average, r.maximum, r.minimum, r.median
        );
    }
}

fn run(config: &ExperimentConfig, out: &Path) -> Result<()> {
    let report = run_case(config)?;
    emit_report(&report, out)?;
    print_summary(&report.summary());
    eprintln!(
        "wrote {} in {:.1} s",
        out.display(),
        report.wall_clock.as_secs_f64()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => config.resolve().and_then(|c| run(&c, &out)),
        Command::Validate { config } => config.resolve().and_then(|c| {
            print!("{}", c.to_toml()?);
            Ok(())
        }),
        Command::Report { out } => reaggregate(&out)
            .map(|rows| print_summary(&rows))
            .map_err(Into::into),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
