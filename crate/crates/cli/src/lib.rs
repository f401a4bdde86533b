//! Command-line harness for `hahn-fde`: JSON problem configs, the problem
//! registry and the `fde` subcommands.
//!
//! ```text
//! fde verify|solve|mnc|stability|study --config <path> [--output json|csv] [--out <path>]
//! ```
//!
//! Exit codes: 0 success, 1 checked criterion not met, 2 config error,
//! 3 singular parameters, 4 divergence, 5 stability condition violated.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hahn_fde::mnc::PerturbationShape;

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::Emission;
pub use config::{parse_config, OutputFormat, ProblemConfig};
pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "fde",
    version,
    about = "Caputo fractional BVP workbench in generalized Hahn spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON problem configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's `output` field.
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ShapeArg {
    Constant,
    Sine,
}

impl From<ShapeArg> for PerturbationShape {
    fn from(s: ShapeArg) -> Self {
        match s {
            ShapeArg::Constant => PerturbationShape::Constant,
            ShapeArg::Sine => PerturbationShape::Sine,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Existence, uniqueness and stability constants.
    Verify(Common),
    /// Picard solution of the truncated system.
    Solve(Common),
    /// Hausdorff measure of noncompactness of a vector family.
    Mnc {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 40)]
        kmax: usize,
        /// Members sampled from the unit-sphere generator.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, value_enum, default_value = "unit-sphere")]
        family: commands::FamilyKind,
    },
    /// Hyers–Ulam perturbation experiment.
    Stability {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "constant")]
        shape: ShapeArg,
    },
    /// Truncation (`--Ns`) and grid refinement (`--Ms`) tables.
    Study {
        #[command(flatten)]
        common: Common,
        #[arg(long = "Ns", value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long = "Ms", value_delimiter = ',')]
        ms: Option<Vec<usize>>,
    },
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Verify(c) | Command::Solve(c) => c,
            Command::Mnc { common, .. } | Command::Stability { common, .. } | Command::Study { common, .. } => common,
        }
    }

    fn default_format(&self) -> OutputFormat {
        match self {
            Command::Solve(_) => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

pub fn load_config(path: &std::path::Path) -> Result<ProblemConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_config(&text)
}

/// Runs a parsed command line and returns what to emit.
pub fn run(cli: &Cli) -> Result<Emission, CliError> {
    let common = cli.command.common();
    let config = load_config(&common.config)?;
    let format = common.output.or(config.output).unwrap_or(cli.command.default_format());
    let emission = match &cli.command {
        Command::Verify(_) => commands::emit_verify(&commands::verify(&config)?, format)?,
        Command::Solve(_) => commands::emit_solve(&commands::solve(&config)?, format)?,
        Command::Mnc {
            kmax, samples, family, ..
        } => commands::emit_mnc(&commands::mnc(&config, *family, *kmax, *samples)?, format)?,
        Command::Stability { epsilon, shape, .. } => {
            commands::emit_stability(&commands::stability(&config, *epsilon, (*shape).into())?, format)?
        }
        Command::Study { ns, ms, .. } => {
            commands::emit_study(&commands::study(&config, ns.as_deref(), ms.as_deref())?, format)?
        }
    };
    if let Some(path) = &common.out {
        std::fs::write(path, &emission.body).map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    }
    Ok(emission)
}
