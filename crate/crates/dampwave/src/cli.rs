//! Command-line parsing.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ModelKind, Overrides};
use crate::run::{run_check_decay, run_constants, run_simulate, run_sweep};

#[derive(Debug, Parser)]
#[command(name = "dampwave", version, about = "Certified energy decay for damped wave systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate with backward Euler and check the certified decay bound.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Run several configs concurrently, each with its own outputs.
        #[arg(long, num_args = 1.., conflicts_with = "config")]
        sweep: Vec<PathBuf>,
    },
    /// Compute the spectral constants and the decay certificate.
    Constants {
        #[command(flatten)]
        common: Common,
        /// Also write the assembled segment as JSON.
        #[arg(long, value_name = "JSON")]
        segment_out: Option<PathBuf>,
    },
    /// Re-verify a stored trajectory CSV against the certificate in a stored
    /// report.
    CheckDecay {
        /// Trajectory CSV.
        #[arg(long, value_name = "CSV")]
        out: PathBuf,
        /// Report JSON carrying `constants.C_prime` and `constants.c_prime`.
        #[arg(long, value_name = "JSON")]
        report: PathBuf,
        /// Where to write the verdict (stdout if absent).
        #[arg(long, value_name = "JSON")]
        verdict: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Seed for random initial data.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Project u*₀ onto the compatible subspace before running.
    #[arg(long, value_name = "BOOL", num_args = 0..=1, default_missing_value = "true")]
    pub project_initial: Option<bool>,
    /// Trajectory CSV path.
    #[arg(long, value_name = "CSV")]
    pub out: Option<PathBuf>,
    /// Report JSON path (stdout if absent).
    #[arg(long, value_name = "JSON")]
    pub report: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            model: self.model,
            tau: self.tau,
            steps: self.steps,
            seed: self.seed,
            delta: self.delta,
            project_initial: self.project_initial,
            csv: self.out.clone(),
            report: self.report.clone(),
        }
    }
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Simulate { common, sweep } if !sweep.is_empty() => run_sweep(sweep, &common.overrides()),
        Command::Simulate { common, .. } => run_simulate(common.config.as_deref(), &common.overrides()),
        Command::Constants { common, segment_out } => {
            run_constants(common.config.as_deref(), &common.overrides(), segment_out.as_deref())
        }
        Command::CheckDecay { out, report, verdict } => run_check_decay(out, report, verdict.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
