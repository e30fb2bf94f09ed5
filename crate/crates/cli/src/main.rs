//! `mixcone` command-line tool.
//!
//! Every verb prints one machine-readable document on stdout. Exit status is
//! 0 whenever a verdict was computed (whatever it says), 2 for unreadable or
//! invalid input, and 3 when an input exceeds the supported dimension.

mod commands;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "mixcone", version, about = "Mixing distance, stochastic maps and reversibility checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON input document; stdin when omitted and the verb needs input.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Overrides the verb's default tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Minimal decomposition z = z₊ − z₋ of a signed measure or Hermitian matrix.
    Decompose,
    /// Mixing-distance profile of a state pair {"x", "y"}.
    Mixdist {
        /// Sample count for quantum profiles.
        #[arg(long, default_value_t = mixcone::mixdist::DEFAULT_GRID)]
        grid: usize,
    },
    /// Whether (x, y) dominates (xp, yp) in mixing distance.
    Dominates {
        #[arg(long, default_value_t = mixcone::mixdist::DEFAULT_GRID)]
        grid: usize,
    },
    /// Search for a stochastic matrix sending (x, y) to (xp, yp).
    FindMap {
        /// Solve over exact rationals instead of floating point.
        #[arg(long)]
        exact: bool,
    },
    /// Random instances comparing LP feasibility with dominance.
    RssSweep {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
    },
    /// Validate a column-stochastic matrix {"rows", "cols", "entries"}.
    CheckStochastic,
    /// Disjoint-column-support isometry test.
    CheckIsometry,
    /// Reversible (with inverse on range) or irreversible (with witness).
    Classify,
    /// Kraus form of a block-isometry channel.
    BuildIsometry(BlueprintArgs),
    /// Stochastic left inverse of a block-isometry channel.
    InvertIsometry(BlueprintArgs),
    /// Trace preservation, surjectivity and isometry of a Kraus channel.
    CheckChannel {
        #[arg(long, default_value_t = mixcone::quantum::DEFAULT_ISOMETRY_SAMPLES)]
        samples: usize,
    },
    /// Damped motion: speed decay and motion-reversal defect.
    DemoDamped {
        #[arg(long, default_value_t = 0.0)]
        x0: f64,
        #[arg(long, default_value_t = 1.0)]
        v0: f64,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 50)]
        steps: usize,
    },
    /// Ornstein–Uhlenbeck relaxation of a Gaussian bump.
    DemoFp {
        #[arg(long, default_value_t = -6.0, allow_hyphen_values = true)]
        lower: f64,
        #[arg(long, default_value_t = 6.0, allow_hyphen_values = true)]
        upper: f64,
        #[arg(long, default_value_t = 200)]
        cells: usize,
        /// Drift b(X) = −θX.
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
        sigma: f64,
        /// Time step; defaults to the stability bound.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 8.0)]
        t_max: f64,
        /// Number of sampled times after t = 0.
        #[arg(long, default_value_t = 40)]
        samples: usize,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        center: f64,
        #[arg(long, default_value_t = 0.2)]
        width: f64,
    },
    /// The integer shift semigroup on a random sparse state.
    DemoShift {
        #[arg(long, default_value_t = 6)]
        steps: u32,
        /// Random state support is drawn from [-radius, radius].
        #[arg(long, default_value_t = 10)]
        radius: i64,
    },
}

#[derive(Debug, Args)]
pub struct BlueprintArgs {
    /// Input dimension d (used when no --input blueprint is given).
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Comma-separated block weights.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.5])]
    pub weights: Vec<f64>,
    /// Extra output dimensions beyond n·d.
    #[arg(long, default_value_t = 0)]
    pub extra: usize,
    /// Comma-separated block indices implemented antilinearly.
    #[arg(long, value_delimiter = ',')]
    pub antilinear: Vec<usize>,
    /// Rotate the output space by a seeded random unitary.
    #[arg(long)]
    pub rotate: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(mut out) => {
            if !out.ends_with('\n') {
                out.push('\n');
            }
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(out.as_bytes()).and_then(|()| stdout.flush()) {
                // A reader that closed the pipe early is not an error.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: writing output: {e}");
                    ExitCode::from(2)
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
