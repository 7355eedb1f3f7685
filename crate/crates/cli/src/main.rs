mod cmd;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tmlab::Error;

#[derive(Parser, Debug)]
#[command(name = "tmlab", version, about = "Multifractal analysis of the Thue-Morse g-measure")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Report natural-log values instead of base-2 normalized ones.
    #[arg(long, global = true)]
    natural_log: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Joint,
    Intermediate,
    Bounded,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    XiMu,
    XiPsi,
    #[value(name = "F")]
    F,
    Rho,
    Fig2,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Measure,
    Spectrum,
    Construct,
    Analyze,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Grid of the joint spectrum f and of eta on the triangle.
    Spectrum {
        /// Points per axis.
        #[arg(long, default_value_t = 101)]
        q: usize,
    },
    /// Build a point and write its JSON descriptor.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        lambda: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also record the first N symbols.
        #[arg(long)]
        prefix_len: Option<usize>,
    },
    /// Trajectory of a point given by its descriptor file (`-` reads stdin).
    Trajectory {
        descriptor: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        /// Horizon: a position for xi and fig2, a block index for F and rho.
        #[arg(long)]
        n_max: u128,
        /// Report tail-window extrema over this trailing fraction.
        #[arg(long)]
        tail: Option<f64>,
        /// Large-block threshold for F and rho; defaults to the point's own.
        #[arg(long)]
        lambda: Option<u64>,
        /// Ratio of the geometric sampling grid.
        #[arg(long, default_value_t = 1.01)]
        grid_ratio: f64,
    },
    /// Estimate and bound the measure of a cylinder.
    Measure {
        /// Word such as `0101` or `0^8 1`.
        word: String,
        #[arg(long, default_value_t = 14)]
        depth: usize,
        /// Operation budget.
        #[arg(long)]
        budget: Option<u128>,
        /// Also integrate the Riesz product over the cylinder.
        #[arg(long)]
        quadrature: bool,
        #[arg(long, default_value_t = 14)]
        levels: usize,
    },
    /// Run the verification checks.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

/// Failure categories, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    Check(String),
    Usage(String),
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Budget { .. } => Failure::Resource(format!("{e}; try a smaller --depth or a larger --budget")),
            Error::Overflow(_) | Error::Numeric(_) => Failure::Resource(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Resource(format!("i/o error: {e}"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Resource(e.to_string()))?;
    }
    let mut ctx = output::Context::new(cli.out.clone(), cli.format, cli.natural_log);
    match cli.command {
        Command::Spectrum { q } => cmd::spectrum(&mut ctx, q),
        Command::Construct {
            kind,
            alpha,
            beta,
            gamma,
            lambda,
            seed,
            prefix_len,
        } => cmd::construct(&mut ctx, kind, cmd::Targets { alpha, beta, gamma }, lambda, seed, prefix_len),
        Command::Trajectory {
            descriptor,
            which,
            n_max,
            tail,
            lambda,
            grid_ratio,
        } => cmd::trajectory(&mut ctx, &descriptor, which, n_max, tail, lambda, grid_ratio),
        Command::Measure {
            word,
            depth,
            budget,
            quadrature,
            levels,
        } => cmd::measure(&mut ctx, &word, depth, budget, quadrature.then_some(levels)),
        Command::Verify { suite } => cmd::verify(&mut ctx, suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
