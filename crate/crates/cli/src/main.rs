use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use gemination_cli::{commands, CliError, RunConfig, Status};

/// Measure stop-consonant gemination in annotated VCV recordings.
#[derive(Debug, Parser)]
#[command(name = "gemination", version, about)]
struct Cli {
    /// Flat key = value config file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for corpus synthesis.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Cd/Vd at or above this counts as geminate.
    #[arg(long, global = true)]
    ratio_threshold: Option<f64>,
    /// p below this is marked significant.
    #[arg(long, global = true)]
    significance: Option<f64>,
    /// Also print N - 1 total degrees of freedom in ANOVA tables.
    #[arg(long, global = true)]
    total_df: bool,
    /// Reject gem_type on phones that are not stops.
    #[arg(long, global = true)]
    stop_only: bool,
    /// Energy window length (s).
    #[arg(long, global = true)]
    window_s: Option<f64>,
    /// Energy frame hop (s).
    #[arg(long, global = true)]
    hop_s: Option<f64>,
    /// Burst threshold as a multiple of the closure floor.
    #[arg(long, global = true)]
    rise_factor: Option<f64>,
    /// Burst threshold as a fraction of the vowel peak energy.
    #[arg(long, global = true)]
    rel_floor: Option<f64>,
    /// Shortest sub-threshold gap that separates two bursts (s).
    #[arg(long, global = true)]
    min_gap_s: Option<f64>,
    /// Shortest dip that ends a burst (s).
    #[arg(long, global = true)]
    min_offset_s: Option<f64>,
    /// Span used to estimate the closure floor (s).
    #[arg(long, global = true)]
    floor_run_s: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check annotations against their recordings.
    Validate {
        #[arg(long)]
        audio: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        /// Directory for per-file reports.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure every annotated stop and write the token table.
    Analyze {
        #[arg(long)]
        audio: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        /// Token CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus with ground truth.
    Synth {
        /// TOML corpus spec; the built-in reference corpus when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Override the number of tokens.
        #[arg(long)]
        tokens: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build tables and ANOVA results from a token table.
    Report {
        /// Token CSV produced by `analyze`.
        #[arg(long)]
        tokens: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        config.apply_file(path)?;
    }
    let flags = [
        ("seed", cli.seed.map(|v| v.to_string())),
        ("jobs", cli.jobs.map(|v| v.to_string())),
        ("ratio_threshold", cli.ratio_threshold.map(|v| v.to_string())),
        ("significance", cli.significance.map(|v| v.to_string())),
        ("total_df", cli.total_df.then(|| "true".to_string())),
        ("stop_only", cli.stop_only.then(|| "true".to_string())),
        ("window_s", cli.window_s.map(|v| v.to_string())),
        ("hop_s", cli.hop_s.map(|v| v.to_string())),
        ("rise_factor", cli.rise_factor.map(|v| v.to_string())),
        ("rel_floor", cli.rel_floor.map(|v| v.to_string())),
        ("min_gap_s", cli.min_gap_s.map(|v| v.to_string())),
        ("min_offset_s", cli.min_offset_s.map(|v| v.to_string())),
        ("floor_run_s", cli.floor_run_s.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(value) = value {
            config.set(key, &value).map_err(|m| CliError::Data(format!("--{}: {m}", key.replace('_', "-"))))?;
        }
    }
    config.check()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<Status> {
    let config = run_config(&cli)?;
    let status = match &cli.command {
        Command::Validate { audio, annotations, out } => {
            commands::validate(audio, annotations, out.as_deref(), &config).context("validate")?
        }
        Command::Analyze { audio, annotations, out } => {
            commands::analyze(audio, annotations, out, &config).context("analyze")?
        }
        Command::Synth { spec, tokens, out } => commands::synth(spec.as_deref(), *tokens, out, &config).context("synth")?,
        Command::Report { tokens, out } => commands::report(tokens, out, &config).context("report")?,
    };
    Ok(status)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<CliError>().map_or(2, CliError::exit_code))
        }
    }
}
