//! Interaction kernels, the interaction matrix, and the derived scalar parameters.

mod admissibility;
mod config;
mod kernel;
mod matrix;
mod params;
mod rescale;

pub use admissibility::{
    check_admissibility, AdmissibilityInput, AdmissibilityReport, Condition, ConditionStatus,
    P_GRID_POINTS,
};
#[cfg(test)]
pub(crate) use config::fixtures;
pub use config::{linear_symbol, ModelConfig};
pub use kernel::InteractionKernel;
pub use matrix::{InteractionMatrix, MatrixSymmetry};
pub use params::{
    compute_derived, compute_lambda_k0, compute_zeta, compute_zeta_signed, omega_probability_closed_form,
    weighted_growth, zeta_summand, zeta_with_radius, DerivedParams,
    KernelSign, ZetaBracket, DEFAULT_ZETA_TOL,
};
pub use rescale::{rescale_mass, MassRescaling};
