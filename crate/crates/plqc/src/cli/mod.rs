//! Command-line front end. [`run`] parses arguments, writes the requested
//! CSV or text, and returns the process exit code.
//!
//! Exit codes: 0 on success, 2 on a usage or validation error, 3 when a
//! `--check` fails, 1 on an internal error.

mod commands;
pub mod range;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
pub use range::{IntRange, RealRange};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

/// Environment variable holding a default seed; `--seed` wins over it.
pub const SEED_ENV: &str = "PLQC_SEED";

/// Build identifier embedded in output headers.
pub const BUILD: &str = env!("PLQC_BUILD");

#[derive(Debug, Parser)]
#[command(name = "plqc", version, about = "Loss-tolerant parity-code quantum computing: sweeps, Monte Carlo, thresholds and costs")]
pub struct RunConfig {
    /// Write output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form success probabilities as CSV.
    #[command(subcommand)]
    Analytic(Analytic),
    /// Monte Carlo over the state engine as CSV.
    Mc(McArgs),
    /// Exact event-tree enumeration next to the closed form, as CSV.
    Enumerate(EnumerateArgs),
    /// One protocol run on the state engine with its event log and process
    /// fidelity.
    Statevec(StatevecArgs),
    /// Loss threshold search.
    Threshold(ThresholdArgs),
    /// Expected Bell-pair cost of resource states.
    #[command(subcommand)]
    Cost(Cost),
}

/// Efficiency sweep: `--eta` drives every component not pinned separately.
#[derive(Debug, Clone, Args)]
pub struct EtaArgs {
    /// Uniform efficiency range `min:max[:step]` (default step 0.01).
    #[arg(long)]
    pub eta: RealRange,
    /// Fixed source efficiency.
    #[arg(long)]
    pub eta_s: Option<f64>,
    /// Fixed memory efficiency.
    #[arg(long)]
    pub eta_m: Option<f64>,
    /// Fixed detector efficiency.
    #[arg(long)]
    pub eta_d: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Analytic {
    /// Memory re-encoding probabilities P_Qs, P_ff, P_Qf, P_E.
    Pe {
        /// Block sizes `min:max[:step]`.
        #[arg(long)]
        n: IntRange,
        /// Redundancy range; ignored with `--optimal-q`.
        #[arg(long, required_unless_present = "optimal_q")]
        q: Option<IntRange>,
        /// Use the `q` that maximises P_E at each point.
        #[arg(long)]
        optimal_q: bool,
        /// Upper end of the optimal-q search.
        #[arg(long, default_value_t = crate::analytics::DEFAULT_Q_MAX)]
        q_max: u128,
        #[command(flatten)]
        eta: EtaArgs,
    },
    /// Optimal redundancy q* for each block size.
    Optq {
        /// Block sizes `min:max[:step]`.
        #[arg(long)]
        n: IntRange,
        /// Upper end of the optimal-q search.
        #[arg(long, default_value_t = crate::analytics::DEFAULT_Q_MAX)]
        q_max: u128,
        #[command(flatten)]
        eta: EtaArgs,
    },
    /// CNOT no-progress terms, progress probability and P_TOTAL.
    Ptotal {
        /// Block sizes `min:max[:step]`.
        #[arg(long)]
        n: IntRange,
        /// Redundancy range; ignored with `--optimal-q`.
        #[arg(long, required_unless_present = "optimal_q")]
        q: Option<IntRange>,
        /// Use the memory-optimal `q`.
        #[arg(long)]
        optimal_q: bool,
        /// Upper end of the optimal-q search.
        #[arg(long, default_value_t = crate::analytics::DEFAULT_Q_MAX)]
        q_max: u128,
        #[command(flatten)]
        eta: EtaArgs,
    },
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// `memory`, `x90`, `cnot` or `ztheta:<radians>`.
    pub protocol: String,
    /// Block sizes `min:max[:step]`.
    #[arg(long)]
    pub n: IntRange,
    /// Redundancy widths `min:max[:step]`.
    #[arg(long)]
    pub q: IntRange,
    #[command(flatten)]
    pub eta: EtaArgs,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Master seed (or set PLQC_SEED).
    #[arg(long, env = SEED_ENV)]
    pub seed: u64,
    /// Compare each estimate with the closed form; exit 3 unless every
    /// point lies within 4 standard errors.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeKind {
    Memory,
    Cnot,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    pub protocol: TreeKind,
    /// Block sizes `min:max[:step]`.
    #[arg(long)]
    pub n: IntRange,
    /// Redundancy widths `min:max[:step]`.
    #[arg(long)]
    pub q: IntRange,
    #[command(flatten)]
    pub eta: EtaArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatevecOp {
    Memory,
    Z90,
    Ztheta,
    X90,
    Cnot,
}

#[derive(Debug, Args)]
pub struct StatevecArgs {
    pub op: StatevecOp,
    /// Block size.
    #[arg(long)]
    pub n: usize,
    /// Redundancy width.
    #[arg(long)]
    pub q: usize,
    /// Angle for `ztheta`.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub theta: f64,
    /// Uniform efficiency; 1 runs without loss.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, env = SEED_ENV)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    pub protocol: TreeKind,
    /// Comma-separated block sizes to walk.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 8, 16, 32, 64, 128, 256, 512, 1024])]
    pub schedule: Vec<usize>,
    /// Failure probability the largest block size must beat.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Width of the final bracket.
    #[arg(long, default_value_t = 0.005)]
    pub width: f64,
    #[arg(long, default_value_t = 0.5)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    #[arg(long)]
    pub eta_s: Option<f64>,
    #[arg(long)]
    pub eta_m: Option<f64>,
    #[arg(long)]
    pub eta_d: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Cost {
    /// Type-I construction of `|0>^(n)` from Bell pairs.
    Parity {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = crate::resources::P_FUSION)]
        p_i: f64,
    },
    /// `|0>^(n)` chained from type-I built segments with type-II fusion.
    Chain {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        segment: usize,
        #[arg(long, default_value_t = crate::resources::P_FUSION)]
        p_ii: f64,
    },
    /// The redundancy resource `|0>|0>^(n,q) + |1>|1>^(n,q)`.
    Redundancy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: usize,
        /// Success probability of the entangling gate making each seed.
        #[arg(long, default_value_t = crate::resources::P_ENTANGLE)]
        p_c: f64,
        /// Bell pairs charged per entangling-gate attempt.
        #[arg(long, default_value_t = crate::resources::ENTANGLE_STEP_COST)]
        step_cost: f64,
    },
}

/// Why a command did not finish cleanly.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Output was produced but a `--check` failed.
    Check(String, String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Precondition(_) | Error::Capacity { .. } => CliError::Usage(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// code. Output goes to `--output` or `stdout`; diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let (text, code) = match commands::execute(&cfg.command) {
        Ok(text) => (text, EXIT_OK),
        Err(CliError::Check(text, why)) => {
            let _ = writeln!(stderr, "check failed: {why}");
            (text, EXIT_CHECK)
        }
        Err(CliError::Usage(why)) => {
            let _ = writeln!(stderr, "error: {why}");
            return EXIT_USAGE;
        }
        Err(CliError::Internal(why)) => {
            let _ = writeln!(stderr, "internal error: {why}");
            return EXIT_INTERNAL;
        }
    };
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &text),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    code
}
