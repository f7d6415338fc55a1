use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::path::{path_rng, step_count, BrownianPath};
use crate::error::{Error, Result};
use crate::model::omega_probability_closed_form;

/// Membership of a sampled path in the event `{α + βt − νW(t) ≥ 0 for all t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaVerdict {
    /// Discrete check on the grid points.
    pub member: bool,
    /// Product of per-interval Brownian-bridge non-crossing probabilities.
    pub survival_prob_given_grid: f64,
    /// Smallest grid distance to the barrier, in units of W.
    pub min_distance: f64,
}

/// Result of a Monte Carlo estimate of the event probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaMcResult {
    pub estimate: f64,
    /// Binomial-scale standard error `sqrt(p(1-p)/n)`.
    pub se: f64,
    /// Standard error of the per-path survival factors.
    pub sample_se: f64,
    /// Fraction of paths passing the discrete grid check alone.
    pub discrete_estimate: f64,
    pub n: usize,
    pub dt: f64,
    /// Horizon actually simulated.
    pub horizon: f64,
    pub requested_horizon: f64,
    pub seed: u64,
    /// Upper bound on the crossing probability after the horizon.
    pub tail_bound: f64,
    pub closed_form: f64,
}

fn check_positive(alpha: f64, beta: f64, nu: f64) -> Result<()> {
    if !(alpha > 0.0 && beta > 0.0 && nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha, beta, nu must be > 0 (got {alpha}, {beta}, {nu})"
        )));
    }
    Ok(())
}

/// Probability that a Brownian bridge from `d0` to `d1` (both > 0) stays positive over `dt`.
pub fn bridge_survival(d0: f64, d1: f64, dt: f64) -> f64 {
    if d0 <= 0.0 || d1 <= 0.0 {
        0.0
    } else {
        -(-2.0 * d0 * d1 / dt).exp_m1()
    }
}

/// Probability that Brownian motion started at distance `d` below a barrier of slope `drift` never hits it.
pub fn tail_survival(d: f64, drift: f64) -> f64 {
    if d <= 0.0 {
        0.0
    } else {
        -(-2.0 * d * drift).exp_m1()
    }
}

#[derive(Default)]
struct Accumulator {
    member: bool,
    survival: f64,
    min_distance: f64,
    prev: Option<(f64, f64)>,
}

impl Accumulator {
    fn new() -> Self {
        Self { member: true, survival: 1.0, min_distance: f64::INFINITY, prev: None }
    }

    fn push(&mut self, t: f64, d: f64) {
        if d < 0.0 {
            self.member = false;
        }
        self.min_distance = self.min_distance.min(d);
        if let Some((t0, d0)) = self.prev {
            self.survival *= bridge_survival(d0, d, t - t0);
        }
        self.prev = Some((t, d));
    }

    fn finish(self) -> OmegaVerdict {
        let survival = if self.member { self.survival } else { 0.0 };
        OmegaVerdict { member: self.member, survival_prob_given_grid: survival, min_distance: self.min_distance }
    }
}

/// Discrete membership and bridge-corrected survival of a path on its own grid.
pub fn omega_verdict(path: &BrownianPath, alpha: f64, beta: f64, nu: f64) -> Result<OmegaVerdict> {
    check_positive(alpha, beta, nu)?;
    let mut acc = Accumulator::new();
    for (&t, &w) in path.times().iter().zip(path.values()) {
        acc.push(t, (alpha + beta * t) / nu - w);
    }
    Ok(acc.finish())
}

/// Horizon beyond which the residual crossing probability `exp(-2(α+βH)β/ν²)` is below `threshold`.
pub fn horizon_for_tail(alpha: f64, beta: f64, nu: f64, threshold: f64) -> f64 {
    let h = (nu * nu / (2.0 * beta) * (1.0 / threshold).ln() - alpha) / beta;
    h.max(0.0)
}

/// A path accepted by [`sample_omega_paths`].
#[derive(Debug, Clone)]
pub struct ConditionedPath {
    pub stream: u64,
    pub path: BrownianPath,
}

/// Draws paths from streams `0, 1, 2, ...` of `seed` and keeps the first `count` whose grid
/// values stay below the barrier on `[0, check_horizon]`. Accepted paths are returned
/// truncated to `horizon` and in stream order.
#[allow(clippy::too_many_arguments)]
pub fn sample_omega_paths(
    alpha: f64,
    beta: f64,
    nu: f64,
    horizon: f64,
    check_horizon: f64,
    dt: f64,
    seed: u64,
    count: usize,
    max_attempts: u64,
) -> Result<Vec<ConditionedPath>> {
    check_positive(alpha, beta, nu)?;
    if !(dt > 0.0) || !(horizon > 0.0) || check_horizon < horizon {
        return Err(Error::InvalidParameter("need dt > 0, horizon > 0 and check_horizon >= horizon".into()));
    }
    let steps = step_count(check_horizon, dt);
    let keep = step_count(horizon, dt);
    let accept = |stream: u64| -> Option<Vec<f64>> {
        let mut rng = path_rng(seed, stream);
        let sd = dt.sqrt();
        let mut values = Vec::with_capacity(keep + 1);
        let mut w = 0.0;
        values.push(w);
        for step in 1..=steps {
            let z: f64 = StandardNormal.sample(&mut rng);
            w += sd * z;
            if (alpha + beta * step as f64 * dt) / nu - w < 0.0 {
                return None;
            }
            if step <= keep {
                values.push(w);
            }
        }
        Some(values)
    };

    const BATCH: u64 = 256;
    let mut found = Vec::with_capacity(count);
    let mut next = 0u64;
    while found.len() < count {
        if next >= max_attempts {
            return Err(Error::InsufficientSamples { found: found.len(), required: count });
        }
        let end = (next + BATCH).min(max_attempts);
        let batch: Vec<(u64, Option<Vec<f64>>)> = (next..end).into_par_iter().map(|i| (i, accept(i))).collect();
        for (stream, values) in batch {
            if let Some(values) = values {
                if found.len() < count {
                    let times = (0..values.len()).map(|i| i as f64 * dt).collect();
                    let path = BrownianPath::from_values(times, values)?.with_seed(seed, stream);
                    found.push(ConditionedPath { stream, path });
                }
            }
        }
        next = end;
    }
    Ok(found)
}

/// Monte Carlo estimate of `P(α + βt − νW(t) ≥ 0 ∀t)`.
///
/// Path `i` draws from stream `i` of `seed`, so the estimate does not depend on scheduling.
/// Each path contributes the product of bridge non-crossing factors on `[0, H]` times the
/// exact survival factor of the residual barrier after `H`. The horizon is extended so that
/// the residual crossing bound stays below 0.1 standard errors.
pub fn omega_probability_mc(
    alpha: f64,
    beta: f64,
    nu: f64,
    n_paths: usize,
    horizon: f64,
    dt: f64,
    seed: u64,
) -> Result<OmegaMcResult> {
    check_positive(alpha, beta, nu)?;
    if n_paths < 2 || !(dt > 0.0) || !(horizon > 0.0) {
        return Err(Error::InvalidParameter("need n_paths >= 2, dt > 0, horizon > 0".into()));
    }
    let closed_form = omega_probability_closed_form(alpha, beta, nu)?;
    let nf = n_paths as f64;
    let se_ref = (closed_form * (1.0 - closed_form) / nf).sqrt().max(1.0 / nf);
    let needed = horizon_for_tail(alpha, beta, nu, 0.1 * se_ref);
    let steps = step_count(horizon.max(needed), dt);
    let sim_horizon = steps as f64 * dt;
    let tail_bound = (-2.0 * (alpha + beta * sim_horizon) * beta / (nu * nu)).exp();

    let samples: Vec<(f64, bool)> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let sd = dt.sqrt();
            let mut acc = Accumulator::new();
            let mut w = 0.0;
            acc.push(0.0, alpha / nu);
            for step in 1..=steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                w += sd * z;
                let t = step as f64 * dt;
                acc.push(t, (alpha + beta * t) / nu - w);
                if !acc.member {
                    break;
                }
            }
            let last = acc.prev.map(|(_, d)| d).unwrap_or(0.0);
            let v = acc.finish();
            (v.survival_prob_given_grid * tail_survival(last, beta / nu), v.member)
        })
        .collect();

    let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let (estimate, sample_se) = mean_and_se(&values);
    let discrete = samples.iter().filter(|s| s.1).count() as f64 / nf;
    Ok(OmegaMcResult {
        estimate,
        se: (estimate * (1.0 - estimate) / nf).max(0.0).sqrt(),
        sample_se,
        discrete_estimate: discrete,
        n: n_paths,
        dt,
        horizon: sim_horizon,
        requested_horizon: horizon,
        seed,
        tail_bound,
        closed_form,
    })
}

/// Mean and standard error of the mean, summed in slice order.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}
