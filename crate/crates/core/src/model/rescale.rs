use serde::{Deserialize, Serialize};

use super::config::ModelConfig;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::stochastic::BrownianPath;

/// Maps between a run with mean `M` and the equivalent run with mean `M / m`.
///
/// If `μ` solves the equation with viscosity `ν` along `W`, then `μ_m(t) = μ(t/m) / m`
/// solves it with `ν / √m` along `W_m(t) = √m W(t/m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassRescaling {
    pub factor: f64,
    /// Rescaled time per original time unit.
    pub time_scale: f64,
    /// Multiplier on Brownian values.
    pub path_amplitude: f64,
    /// Multiplier on fields.
    pub field_scale: f64,
}

impl MassRescaling {
    /// Rescaled time corresponding to original time `t`.
    pub fn forward_time(&self, t: f64) -> f64 {
        t * self.time_scale
    }

    /// Original time corresponding to rescaled time `t`.
    pub fn original_time(&self, t: f64) -> f64 {
        t / self.time_scale
    }

    pub fn map_path(&self, path: &BrownianPath) -> BrownianPath {
        path.rescaled(self.time_scale, self.path_amplitude)
    }

    pub fn map_field(&self, f: &SpectralField) -> SpectralField {
        f.scaled(self.field_scale)
    }

    pub fn is_identity(&self) -> bool {
        self.factor == 1.0
    }
}

/// Configuration with mean divided by `m`, plus the maps relating the two runs.
pub fn rescale_mass(cfg: &ModelConfig, m: f64) -> Result<(ModelConfig, MassRescaling)> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("mass factor {m} must be > 0")));
    }
    let mut out = cfg.clone();
    if m != 1.0 {
        out.nu = cfg.nu / m.sqrt();
        out.beta = cfg.beta / m;
        out.mass = cfg.mass / m;
    }
    let map = MassRescaling { factor: m, time_scale: m, path_amplitude: m.sqrt(), field_scale: 1.0 / m };
    Ok((out, map))
}
