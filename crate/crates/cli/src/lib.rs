//! Command-line front end for `zpeff`.
//!
//! [`run`] parses arguments, dispatches to a subcommand and maps failures
//! onto exit codes: 0 on success, 1 for domain, validation, data or I/O
//! errors, 2 for usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

mod commands;
pub mod curves;
pub mod output;

pub use curves::{emit_curves, CurveTable};
pub use output::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "zpeff", version, about = "Zipf-Pareto efficiency toolkit")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Master seed for every randomized computation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Suppress the human-readable summary on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Efficiency, Shannon entropy and varentropy of a discrete distribution.
    Measure(MeasureArgs),
    /// Figure data tables.
    Curves(CurvesArgs),
    /// Zipf fit of a corpus or count table, or Pareto fit of samples.
    Fit(FitArgs),
    /// Randomized Lesche-stability trials.
    Stability(StabilityArgs),
    /// Zero-efficiency and zero-entropy thresholds.
    Roots(RootsArgs),
    /// Efficiency maximizer under a mean or multiplier constraint.
    Maximize(MaximizeArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["dist", "input"])))]
pub struct MeasureArgs {
    /// Probabilities, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub dist: Option<Vec<f64>>,
    /// File of probabilities separated by commas, spaces or newlines.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Efficiency coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    /// Varentropy exponent; defaults to `a` when `0 < a < 1`.
    #[arg(long)]
    pub b: Option<f64>,
    /// Rescale non-negative weights to unit mass instead of requiring it.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// Figure number.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub figure: u8,
    /// Grid points (at least 10).
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(10..=10_000_000))]
    pub grid: u64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["corpus", "counts", "samples"])))]
pub struct FitArgs {
    /// UTF-8 text; tokens are counted and ranked.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// CSV table of `token,count`.
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Numeric samples, one per line.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Pareto scale for the sample fit (default: sample minimum).
    #[arg(long, conflicts_with_all = ["corpus", "counts"])]
    pub xmin: Option<f64>,
    /// Zipf rank window `lo:hi` (default 5:max(50, n/10)).
    #[arg(long, value_parser = parse_window, conflicts_with = "samples")]
    pub window: Option<(usize, usize)>,
    /// Keep the case of tokens.
    #[arg(long, conflicts_with_all = ["samples", "counts"])]
    pub keep_case: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("radius").required(true).args(["delta", "epsilon"])))]
pub struct StabilityArgs {
    #[arg(long)]
    pub a: f64,
    /// L1 radius of the perturbations.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Target bound; the radius is derived as `(ε/M)^{1/(1-a)}`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Support sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2,100,10000")]
    pub sizes: Vec<usize>,
    /// Random pairs per support size.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    /// Root-finder tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("constraint").required(true).args(["mean", "multiplier"])))]
pub struct MaximizeArgs {
    /// Achievement levels: a file, a comma-separated list, or `lo:hi` for
    /// the integers `lo..=hi`.
    #[arg(long)]
    pub values: String,
    #[arg(long)]
    pub a: f64,
    /// Target mean achievement.
    #[arg(long)]
    pub mean: Option<f64>,
    /// Positive cost multiplier on the mean.
    #[arg(long)]
    pub multiplier: Option<f64>,
    /// Stationarity tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: usize = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: usize = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if lo == 0 || hi < lo {
        return Err(format!("window {lo}:{hi} must satisfy 1 <= lo <= hi"));
    }
    Ok((lo, hi))
}

/// Parses `argv` (program name first) and runs the command against the
/// process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(done) => {
            if out.write_all(done.stdout.as_bytes()).is_err() {
                return EXIT_FAILURE;
            }
            if !cli.quiet {
                if let Some(s) = done.summary {
                    let _ = writeln!(err, "{s}");
                }
            }
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}
