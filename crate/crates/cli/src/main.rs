//! `choquet`: evaluate and check Choquet traces from the command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use choquet_core::linalg::DEFAULT_TOL;

mod commands;
mod formats;

#[derive(Debug, Parser)]
#[command(name = "choquet", version, about = "Choquet traces on finite-dimensional C*-algebras and AF algebras")]
struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Choquet trace of a positive element of a finite direct sum of matrix algebras.
    Eval(EvalArgs),
    /// Choquet trace of an element of an AF algebra given by a Bratteli diagram.
    EvalAf(EvalAfArgs),
    /// Run the randomized verification suites.
    Verify(VerifyArgs),
    /// Tabulate a scale function on one level of a diagram.
    ScaleTable(ScaleTableArgs),
    /// Push an element down a diagram to a deeper level.
    Embed(EmbedArgs),
    /// Write example diagram, scale and element files.
    Example(ExampleArgs),
    /// Recover the scale function of a trace from its values on projections.
    Reconstruct(ReconstructArgs),
    /// Discrete Choquet integral of a vector against a capacity.
    Integrate(IntegrateArgs),
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    element: PathBuf,
    #[arg(long)]
    scale: PathBuf,
    /// Evaluate through this threshold grid as well and report the difference.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Spectral clustering and positivity tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct EvalAfArgs {
    #[arg(long)]
    diagram: PathBuf,
    #[arg(long)]
    element: PathBuf,
    /// Composite scale file. Without it the diagram's canonical trace is
    /// used with `--lambda`.
    #[arg(long)]
    scale: Option<PathBuf>,
    /// Power transform used when no scale file is given; 1 is the trace itself.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite configuration (JSON). Missing fields take their defaults.
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count for every suite.
    #[arg(long)]
    trials: Option<usize>,
    /// Run only these suites (repeatable).
    #[arg(long = "suite")]
    suites: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct ScaleTableArgs {
    /// Required for composite scales.
    #[arg(long)]
    diagram: Option<PathBuf>,
    /// Defaults to the table's own level, or 1 for composite scales.
    #[arg(long)]
    level: Option<usize>,
    #[arg(long)]
    scale: PathBuf,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    format: TableFormat,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long)]
    diagram: PathBuf,
    #[arg(long)]
    element: PathBuf,
    /// Target level.
    #[arg(long)]
    level: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExampleName {
    Fibonacci,
    Uhf,
}

#[derive(Debug, Args)]
struct ExampleArgs {
    name: ExampleName,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// UHF factors, cycled when the depth exceeds their number.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    factors: Vec<usize>,
    /// Exponent of the power transform in the written scale.
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceKind {
    /// The Choquet trace of `--scale`.
    Scale,
    /// The operator norm.
    Norm,
    /// The sum of the block traces.
    Trace,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long)]
    scale: Option<PathBuf>,
    /// Block sizes, e.g. `2,1`. Taken from the table when omitted.
    #[arg(long, value_delimiter = ',')]
    shape: Option<Vec<usize>>,
    /// Level of a composite scale to use.
    #[arg(long, default_value_t = 1)]
    level: usize,
    #[arg(long, value_enum, default_value_t = TraceKind::Scale)]
    trace: TraceKind,
}

#[derive(Debug, Args)]
struct IntegrateArgs {
    #[arg(long)]
    capacity: PathBuf,
    /// Non-negative coordinates, e.g. `3,1,2`.
    #[arg(long, value_delimiter = ',', required = true)]
    x: Vec<f64>,
}

/// Error with the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_SCHEMA: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;

impl CliError {
    pub fn schema(message: impl Into<String>) -> Self {
        CliError { code: EXIT_SCHEMA, message: message.into() }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        CliError { code: EXIT_DOMAIN, message: message.into() }
    }
}

impl From<choquet_core::Error> for CliError {
    fn from(e: choquet_core::Error) -> Self {
        match e {
            choquet_core::Error::Validation(_) => CliError::schema(e.to_string()),
            _ => CliError::domain(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Text to print and the exit code to return with it.
pub struct Output {
    pub text: String,
    pub code: u8,
}

impl Output {
    pub fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Eval(a) => commands::eval(&a.element, &a.scale, a.grid.as_deref(), a.tol),
        Command::EvalAf(a) => commands::eval_af(&a.diagram, &a.element, a.scale.as_deref(), a.lambda, a.tol),
        Command::Verify(a) => commands::verify(a.config.as_deref(), a.seed, a.trials, &a.suites),
        Command::ScaleTable(a) => commands::scale_table(a.diagram.as_deref(), a.level, &a.scale, a.format == TableFormat::Csv),
        Command::Embed(a) => commands::embed(&a.diagram, &a.element, a.level),
        Command::Example(a) => {
            let example = match a.name {
                ExampleName::Fibonacci => commands::Example::Fibonacci,
                ExampleName::Uhf => commands::Example::Uhf(a.factors),
            };
            commands::example(example, a.depth, a.lambda, &a.out_dir)
        }
        Command::Reconstruct(a) => {
            let kind = match a.trace {
                TraceKind::Scale => commands::TraceSource::Scale,
                TraceKind::Norm => commands::TraceSource::Norm,
                TraceKind::Trace => commands::TraceSource::Trace,
            };
            commands::reconstruct(a.scale.as_deref(), a.shape, a.level, kind)
        }
        Command::Integrate(a) => commands::integrate(&a.capacity, &a.x),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let result = run(cli).and_then(|output| {
        match &out {
            Some(path) => std::fs::write(path, format!("{}\n", output.text))
                .map_err(|e| CliError::domain(format!("cannot write {}: {e}", path.display())))?,
            None => {
                let mut stdout = io::stdout().lock();
                match writeln!(stdout, "{}", output.text) {
                    Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(CliError::domain(format!("cannot write to stdout: {e}"))),
                    _ => {}
                }
            }
        }
        Ok(output.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
