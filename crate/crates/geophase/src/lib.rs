//! Configuration, file formats and the command-line front-end for
//! `geophase-core`.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod expr;
pub mod output;

use std::path::PathBuf;

use cli::{Command, Common};
use config::RunConfig;
use error::CliError;
use output::{emit, resolve_format, resolve_path, Table, OUT_DIR_ENV};

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(dt) = common.dt {
        if !(dt > 0.0) {
            return Err(CliError::config("--dt", format!("must be > 0, got {dt}")));
        }
        cfg.dt = Some(dt);
    }
    if let Some(dim) = common.dim {
        cfg.dim = dim;
    }
    if let Some(steps) = common.steps {
        if steps < 2 {
            return Err(CliError::config(
                "--steps",
                format!("need >= 2, got {steps}"),
            ));
        }
        cfg.n_steps = steps;
    }
    Ok(cfg)
}

fn write_table(table: &Table, common: &Common, cfg: &RunConfig) -> Result<(), CliError> {
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let format = resolve_format(
        common.format.map(Into::into),
        cfg.format,
        common.out.as_deref().or(cfg.out_path.as_deref()),
    );
    let path = resolve_path(
        common.out.as_deref(),
        cfg.out_path.as_deref(),
        out_dir.as_deref(),
        table.command,
        format,
    );
    emit(path.as_deref(), &table.encode(format))
}

/// Runs one parsed command line.
pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Phases { common, allow_open } => {
            let cfg = load(&common)?;
            write_table(&commands::phases(&cfg, allow_open)?, &common, &cfg)
        }
        Command::Gate { common } => {
            let cfg = load(&common)?;
            write_table(&commands::gate(&cfg)?, &common, &cfg)
        }
        Command::Design {
            target,
            g0,
            period,
            loops,
            out,
        } => {
            let target =
                expr::eval(&target).map_err(|e| CliError::config("target", e.to_string()))?;
            let text = commands::design(target, g0, period, loops)?;
            emit(out.as_deref(), text.as_bytes())
        }
        Command::Validate { common } => {
            let cfg = load(&common)?;
            let (table, regression) = commands::validate(&cfg)?;
            write_table(&table, &common, &cfg)?;
            regression.map_or(Ok(()), Err)
        }
        Command::Sweep { common } => {
            let cfg = load(&common)?;
            write_table(&commands::sweep(&cfg)?, &common, &cfg)
        }
    }
}
