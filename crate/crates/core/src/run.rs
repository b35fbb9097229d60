//! Compute and sweep tasks driven by a [`RunConfig`].

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::kernel::DenominatorPath;
use crate::quadrature::{casimir_forces_with, CasimirResult, Prefactors};
use crate::report::SweepRow;

/// Energy and forces for the configured system.
pub fn run_compute(cfg: &RunConfig, path: DenominatorPath) -> Result<CasimirResult> {
    casimir_forces_with(&cfg.system, &cfg.quadrature, &Prefactors::STANDARD, path)
}

/// One row per sweep value, in the configured order; failures stay in their row.
pub fn run_sweep(cfg: &RunConfig, path: DenominatorPath) -> Result<Vec<SweepRow>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::invalid("task", "no sweep target and values configured"))?;
    let index = sweep.target.layer_index(cfg.system.layer_count());
    Ok(sweep
        .values
        .iter()
        .map(|&value| {
            let outcome = cfg
                .system
                .with_thickness(index, value)
                .and_then(|sys| casimir_forces_with(&sys, &cfg.quadrature, &Prefactors::STANDARD, path))
                .map_err(|e| e.to_string());
            SweepRow {
                target_m: value,
                outcome,
            }
        })
        .collect())
}
