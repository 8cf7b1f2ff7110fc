//! Error kinds that select the process exit code.

use std::sync::Arc;

use hismhd_core::init::beltrami::minimal_length;
use hismhd_core::init::{assemble_with, AssemblyOptions, InitialData};
use hismhd_core::Grid;

use crate::config::RunConfig;

/// Malformed command line or configuration (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// The requested initial data cannot be built on this box (exit code 3).
#[derive(Debug)]
pub struct Infeasible(pub String);

impl std::fmt::Display for Infeasible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Infeasible {}

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_INTEGRATION: u8 = 4;

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        EXIT_USAGE
    } else if e.downcast_ref::<Infeasible>().is_some() {
        EXIT_INFEASIBLE
    } else {
        1
    }
}

/// Grid and initial data of `cfg`; construction failures carry the smallest
/// box length that works for this `n`, `M0` and `δ`.
pub fn build_data(cfg: &RunConfig) -> anyhow::Result<(Arc<Grid>, InitialData)> {
    cfg.validate()?;
    let grid = Grid::new(cfg.n, cfg.length).map_err(|e| usage(e.to_string()))?;
    let opts = AssemblyOptions { leray_project: cfg.leray_project };
    match assemble_with(&cfg.params, &grid, opts) {
        Ok(d) => Ok((grid, d)),
        Err(e @ (hismhd_core::Error::EmptyAnnulus { .. } | hismhd_core::Error::CutoffDoesNotFit { .. })) => {
            let needed = minimal_length(cfg.n, 4.0 * cfg.params.m0, cfg.params.delta);
            Err(Infeasible(format!(
                "{e}; minimal box length L (annulus and cutoff) for n = {}, M0 = {}, delta = {} is {needed:.6}",
                cfg.n, cfg.params.m0, cfg.params.delta
            ))
            .into())
        }
        Err(e) => Err(e.into()),
    }
}
