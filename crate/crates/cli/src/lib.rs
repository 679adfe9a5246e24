//! Command-line front end for the `mcmul` simulator.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! code. All output is assembled in memory and written only after the whole
//! run has succeeded, so a failing run leaves no partial results behind.

use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod commands;
mod csvio;
mod render;
pub mod scenario;

pub use commands::Document;
pub use scenario::{load_scenario, Format, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  2  usage error: unknown subcommand or flag, malformed flag value
  3  validation error: scenario, parameters or input data violate a precondition
  4  internal error, or an output file could not be written";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<mcmul::Error> for CliError {
    fn from(e: mcmul::Error) -> Self {
        let text = e.to_string();
        if text.starts_with(e.name()) {
            CliError::Validation(text)
        } else {
            CliError::Validation(format!("{}: {text}", e.name()))
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mcmul",
    version,
    about = "Gate-level simulator for a reconfigurable memristor-CMOS array multiplier",
    after_help = EXIT_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multiply operand pairs on a partitioned array and report the cost
    Multiply(MultiplyArgs),
    /// Print the control vectors and enabled-block mask of a partition list
    Plan(PlanArgs),
    /// Drive a single memristor with a voltage waveform
    Device(DeviceArgs),
    /// Compare 8-bit and 4+4 modes on a 4-tap FIR filter
    BenchFir(BenchFirArgs),
    /// Compare 8-bit and 4+4 modes on a 4-point FFT
    BenchFft(BenchFftArgs),
    /// Render a saved JSON report, or compare it against another
    Report(ReportArgs),
    /// Print the effective scenario, defaults filled in, as TOML
    Scenario(ScenarioArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML); flags override its fields
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Seed for every random draw in the run
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ArrayArgs {
    /// Array width: 2, 4, 8, 16 or 32
    #[arg(long)]
    n: Option<usize>,
    /// Partition widths packed from bit 0, e.g. 5,3
    #[arg(long, value_delimiter = ',')]
    widths: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
struct MultiplyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    array: ArrayArgs,
    /// Operand pairs, one per partition: 21x19,5x6. Separate steps with `;`
    #[arg(long, conflicts_with_all = ["input", "random"])]
    pairs: Option<String>,
    /// CSV of operand steps with header a0,b0[,a1,b1]
    #[arg(long, value_name = "PATH", conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Number of random steps drawn from the seed
    #[arg(long, value_name = "STEPS")]
    random: Option<usize>,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    array: ArrayArgs,
}

#[derive(Debug, Args)]
struct DeviceArgs {
    #[command(flatten)]
    common: Common,
    /// Sine amplitude (volts)
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,
    /// Sine frequency (hertz)
    #[arg(long)]
    frequency: Option<f64>,
    /// Time step (seconds)
    #[arg(long)]
    dt: Option<f64>,
    /// Number of steps
    #[arg(long)]
    steps: Option<usize>,
    /// Initial normalized state
    #[arg(long)]
    x0: Option<f64>,
    /// CSV drive with a `v` column, replacing the sine
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Write the trace as CSV (t,v,i,q,phi,x,m)
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchFirArgs {
    #[command(flatten)]
    common: Common,
    /// Random samples to filter
    #[arg(long)]
    samples: Option<usize>,
    /// Four signed 8-bit taps, e.g. 12,-40,40,-12
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    coefficients: Option<Vec<i64>>,
    /// CSV samples (k,sign,magnitude) replacing the random ones
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Write the 8-bit outputs as CSV
    #[arg(long, value_name = "PATH")]
    outputs: Option<PathBuf>,
    /// Write the 4+4 outputs as CSV
    #[arg(long, value_name = "PATH")]
    split_outputs: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchFftArgs {
    #[command(flatten)]
    common: Common,
    /// Random input vectors to transform
    #[arg(long)]
    vectors: Option<usize>,
    /// Use exact twiddles instead of random ones
    #[arg(long)]
    exact_twiddles: bool,
    /// CSV inputs (k,re_sign,re_mag,im_sign,im_mag) replacing the random ones
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Write the 8-bit bins as CSV
    #[arg(long, value_name = "PATH")]
    outputs: Option<PathBuf>,
    /// Write the 4+4 bins as CSV
    #[arg(long, value_name = "PATH")]
    split_outputs: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// JSON report written by another subcommand
    file: PathBuf,
    /// Baseline report; prints candidate / baseline ratios per cost entry
    #[arg(long, value_name = "PATH")]
    against: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    array: ArrayArgs,
}

/// Files and standard output of a successful run.
#[derive(Debug, Default)]
struct Output {
    stdout: Vec<u8>,
    files: Vec<(PathBuf, Vec<u8>)>,
}

/// Runs one command line (`args[0]` is the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };

    let result = catch_unwind(AssertUnwindSafe(|| commands::execute(cli.command)))
        .unwrap_or_else(|_| Err(CliError::Internal("simulation panicked".into())))
        .and_then(|o| emit(o, out));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

fn emit(o: Output, out: &mut dyn Write) -> Result<(), CliError> {
    for (path, bytes) in &o.files {
        std::fs::write(path, bytes)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    out.write_all(&o.stdout)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Internal(format!("cannot write output: {e}")))
}
