//! Time integration of the transformed equation
//! `∂_t ϱ = −B^t(ϱ, ϱ) − Lϱ − (ν²/2) A ϱ` for `ϱ = μ − 1`.

mod bilinear;
mod integrator;
mod linear;
mod picard;
mod recover;

pub use bilinear::{bilinear_b, BilinearOperator};
pub use integrator::{
    etd_step, simulate, simulate_with, steps_to, Integrator, IntegratorConfig, Scheme, SimOptions, SimOutput, SimState,
    Termination, DEFAULT_BLOWUP_FACTOR,
};
pub use linear::{gamma_apply, linear_propagate, multiplier_exponent, LinearFlow, DEFAULT_OVERFLOW_CAP};
pub use picard::{picard_solve, PicardOptions, PicardResult};
pub use recover::recover_mu_theta;
