use num_complex::Complex64;

use super::integrator::SimState;
use super::linear::gamma_apply;
use crate::error::Result;
use crate::model::ModelConfig;
use crate::spectral::SpectralField;

/// `μ = mass + ϱ` and `θ = Γ^{-1} μ` for a state.
///
/// `θ` is refused with an overflow error when `νW · max|k|^s` exceeds `cap`.
pub fn recover_mu_theta(state: &SimState, cfg: &ModelConfig, cap: f64) -> (SpectralField, Result<SpectralField>) {
    let lat = *state.rho.lattice();
    let mut mu = state.rho.clone();
    let z = lat.zero_index();
    mu.coeffs_mut()[z] += Complex64::new(cfg.mass * lat.volume(), 0.0);
    let theta = gamma_apply(&mu, -state.nu_w, cfg.s, cap);
    (mu, theta)
}
