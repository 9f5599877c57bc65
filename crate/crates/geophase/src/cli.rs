//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Format;
use crate::expr;

#[derive(Debug, Parser)]
#[command(
    name = "geophase",
    version,
    about = "Geometric two-qubit phase gate in cavity QED: phases, gates, pulse design and validation scans"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn number(s: &str) -> Result<f64, String> {
    expr::eval(s).map_err(|e| e.to_string())
}

/// Flags shared by the config-driven subcommands.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Configuration file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output file. Defaults to the config's `[output] path`, then
    /// `$GEOPHASE_OUT_DIR/<command>.<ext>`, then stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Propagator time step; accepts `pi` arithmetic.
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    pub dt: Option<f64>,
    /// Fock-space dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Quadrature panels for the analytic phases.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Geometric, dynamical and total phase on each branch.
    Phases {
        #[command(flatten)]
        common: Common,
        /// Report the closure residual of an open path instead of failing.
        #[arg(long)]
        allow_open: bool,
    },
    /// Two-qubit gate matrix and its quality measures.
    Gate {
        #[command(flatten)]
        common: Common,
    },
    /// Solve for a circular pulse with the given total phase.
    Design {
        /// Target phase, e.g. `pi/2` or `1.3`.
        #[arg(allow_hyphen_values = true)]
        target: String,
        /// Hold the coupling amplitude fixed.
        #[arg(long, value_parser = number, conflicts_with = "period")]
        g0: Option<f64>,
        /// Hold the cycle duration fixed.
        #[arg(long, value_parser = number)]
        period: Option<f64>,
        #[arg(long, default_value_t = 1)]
        loops: u32,
        /// Write the pulse here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotating-wave and truncation scans from the `[validate]` table.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Cartesian parameter grid from the `[sweep]` table.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
}
