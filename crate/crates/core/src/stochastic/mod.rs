//! Brownian paths and the barrier event `{α + βt − νW(t) ≥ 0 for all t ≥ 0}`.

mod omega;
mod path;

pub use omega::{
    bridge_survival, horizon_for_tail, mean_and_se, omega_probability_mc, omega_verdict, sample_omega_paths, tail_survival, ConditionedPath, OmegaMcResult,
    OmegaVerdict,
};
pub use path::BrownianPath;
