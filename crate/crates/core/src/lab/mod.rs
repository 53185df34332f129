//! Configuration-driven experiment runner behind the `be-lab` binary.
//!
//! A run reads one JSON document (see the README for the schema), executes
//! one of the commands `bound`, `verify`, `example41` or `sweep`, and writes
//! a CSV or JSON table. Identical configurations give byte-identical output
//! regardless of the thread count.

pub mod config;
mod output;
mod run;

pub use config::{
    parse_config, parse_config_with, parse_model, Command, ConfigErrors, DeltaMethod, ExperimentConfig, Format, McConfig,
    OutputConfig, Overrides, SweepAxis, SweepConfig, Violation,
};
pub use output::{emit_results, encode, real, Example41Row, Record, ResultRow};
pub use run::{cmd_bound, cmd_example41, cmd_sweep, cmd_verify, Report, EXAMPLE41_MC_MIN_EPSILON};

use crate::error::{Error, Result};
use std::path::{Path, PathBuf};

/// Environment variable that redirects output files into a directory.
pub const OUTPUT_DIR_ENV: &str = "BELAB_OUTPUT_DIR";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Encoded table of a finished command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    pub errors: Vec<String>,
    pub any_fail: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if !self.errors.is_empty() {
            EXIT_RUNTIME
        } else if self.any_fail {
            EXIT_FAIL
        } else {
            EXIT_PASS
        }
    }
}

/// Run `command` and encode its rows.
pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    let format = cfg.output.format;
    let (bytes, errors, any_fail) = match command {
        Command::Example41 => {
            let r = cmd_example41(cfg)?;
            (table(&r.rows, format)?, r.errors.clone(), r.any_fail())
        }
        _ => {
            let r = match command {
                Command::Bound => cmd_bound(cfg)?,
                Command::Verify => cmd_verify(cfg)?,
                _ => cmd_sweep(cfg)?,
            };
            (table(&r.rows, format)?, r.errors.clone(), r.any_fail())
        }
    };
    Ok(Outcome { bytes, errors, any_fail })
}

fn table<R: Record>(rows: &[R], format: Format) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(Error::Domain("the command produced no rows".into()));
    }
    encode(rows, format)
}

/// Destination file, or `None` for standard output. A set output directory
/// keeps the configured file name (default `results.<ext>`).
pub fn output_path(cfg: &OutputConfig, dir_override: Option<&Path>) -> Option<PathBuf> {
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match (dir_override, &cfg.path) {
        (Some(dir), Some(p)) => Some(dir.join(p.file_name().map(PathBuf::from).unwrap_or_else(|| format!("results.{ext}").into()))),
        (Some(dir), None) => Some(dir.join(format!("results.{ext}"))),
        (None, p) => p.clone(),
    }
}
