mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monogamy_core::Sense;

use crate::output::CliError;

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_REGION_POINTS: usize = 400;

#[derive(Parser, Debug)]
#[command(name = "monogamy", version, about = "Monogamy between KCBS contextuality and CHSH nonlocality")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Number of random samples (states or behaviors); for `region`, the
    /// number of boundary levels [default: 100000, 400 for region]
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: Option<u64>,

    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Tolerance used by the invariant checks
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_f64)]
    pub tol: f64,

    /// Output file, or output directory for `region`; stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl RunConfig {
    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.map_or(default, |s| s as usize)
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("must be a positive finite number".into())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprKind {
    Kcbs,
    Chsh,
    Monogamy,
    C1,
    C2,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SenseArg {
    Min,
    Max,
}

impl From<SenseArg> for Sense {
    fn from(s: SenseArg) -> Self {
        match s {
            SenseArg::Min => Sense::Min,
            SenseArg::Max => Sense::Max,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical, no-disturbance and quantum bounds of every expression
    Bounds,
    /// Boundary samples, monogamy line and touching point of the quantum region
    Region,
    /// Run the full invariant suite
    Verify {
        #[arg(long, hide = true)]
        perturb_m: Option<f64>,
    },
    /// Random pure-state sweep of the quantum region
    Sweep,
    /// Spectra of the KCBS, CHSH and M operators
    Spectra,
    /// Matrices of the KCBS and CHSH operators and the block M
    Operators,
    /// No-disturbance behavior attaining the LP optimum of an expression
    NdWitness {
        #[arg(long, value_enum, default_value_t = ExprKind::Monogamy)]
        expr: ExprKind,
        #[arg(long, default_value_t = 5, allow_negative_numbers = true)]
        pivot: i64,
        #[arg(long, value_enum, default_value_t = SenseArg::Min)]
        sense: SenseArg,
    },
    /// Monogamy certificate of a behavior read from a JSON file
    Certify {
        #[arg(long)]
        input: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = &cli.config;
    match cli.command {
        Command::Bounds => commands::bounds(config),
        Command::Region => commands::region(config),
        Command::Verify { perturb_m } => verify::run(config, perturb_m),
        Command::Sweep => commands::sweep(config),
        Command::Spectra => commands::spectra(config),
        Command::Operators => commands::operators(config),
        Command::NdWitness { expr, pivot, sense } => commands::nd_witness(config, expr, pivot, sense.into()),
        Command::Certify { input } => commands::certify(config, &input),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
