use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, IntegratorConfig, SimOptions};
use crate::error::{Error, Result};
use crate::model::{rescale_mass, ModelConfig};
use crate::spectral::SpectralField;
use crate::stochastic::BrownianPath;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaleReport {
    pub factor: f64,
    /// Shared comparison times, in the rescaled clock.
    pub times: Vec<f64>,
    /// `max_t max_k |ϱ_m(t)^(k) − ϱ(t/m)^(k) / m|`.
    pub max_discrepancy: f64,
    /// The discrepancy divided by the largest rescaled coefficient.
    pub relative_discrepancy: f64,
}

/// Compares the run of `(cfg, path, rho0)` on `[0, horizon / m]` with the run of the
/// mass-rescaled configuration along the rescaled path from `rho0 / m` on `[0, horizon]`.
///
/// The original run uses step `icfg.dt` and the rescaled run `m · icfg.dt`, so both
/// evaluate the Brownian path at the same points.
pub fn rescale_equivalence_check(
    cfg: &ModelConfig,
    m: f64,
    path: &BrownianPath,
    rho0: &SpectralField,
    horizon: f64,
    icfg: &IntegratorConfig,
    snapshot_stride: usize,
) -> Result<RescaleReport> {
    let (cfg_m, map) = rescale_mass(cfg, m)?;
    let original_horizon = map.original_time(horizon);
    if path.horizon() < original_horizon * (1.0 - 1e-12) {
        return Err(Error::PathTooShort(original_horizon));
    }
    let opts = SimOptions { snapshot_stride, ..SimOptions::default() };
    let original = simulate(rho0, path, original_horizon, icfg, cfg, &opts)?;
    let path_m = map.map_path(path);
    let icfg_m = IntegratorConfig { dt: map.forward_time(icfg.dt), ..*icfg };
    let rescaled = simulate(&map.map_field(rho0), &path_m, horizon, &icfg_m, &cfg_m, &opts)?;
    if original.snapshots.len() != rescaled.snapshots.len() || !original.completed() || !rescaled.completed() {
        return Err(Error::InvalidParameter("rescaled runs did not produce matching snapshots".into()));
    }
    let mut max_discrepancy: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let mut times = Vec::with_capacity(rescaled.snapshots.len());
    for (a, b) in original.snapshots.iter().zip(&rescaled.snapshots) {
        let expected = map.map_field(&a.rho);
        max_discrepancy = max_discrepancy.max(b.rho.max_abs_diff(&expected)?);
        scale = scale.max(expected.max_abs());
        times.push(b.t);
    }
    Ok(RescaleReport {
        factor: m,
        times,
        max_discrepancy,
        relative_discrepancy: if scale > 0.0 { max_discrepancy / scale } else { max_discrepancy },
    })
}
