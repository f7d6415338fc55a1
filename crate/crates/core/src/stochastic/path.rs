use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for locating a time on the path grid.
const GRID_TOL: f64 = 1e-9;

/// A sampled realization of a standard Brownian motion on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianPath {
    times: Vec<f64>,
    values: Vec<f64>,
    /// Seed and stream the path was generated from, when sampled.
    seed: Option<(u64, u64)>,
}

/// Number of uniform steps of size `dt` needed to reach `horizon`.
pub(crate) fn step_count(horizon: f64, dt: f64) -> usize {
    (horizon / dt - GRID_TOL).ceil().max(1.0) as usize
}

pub(crate) fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl BrownianPath {
    /// Exact Gaussian increments on the grid `t_i = i dt`, `i = 0..=ceil(horizon/dt)`.
    pub fn sample(horizon: f64, dt: f64, seed: u64) -> Result<Self> {
        Self::sample_stream(horizon, dt, seed, 0)
    }

    /// Like [`Self::sample`] but drawing from an independent stream of the same seed.
    pub fn sample_stream(horizon: f64, dt: f64, seed: u64, stream: u64) -> Result<Self> {
        check_grid(horizon, dt)?;
        let n = step_count(horizon, dt);
        let mut rng = path_rng(seed, stream);
        let sd = dt.sqrt();
        let mut values = Vec::with_capacity(n + 1);
        let mut w = 0.0;
        values.push(w);
        for _ in 0..n {
            let z: f64 = StandardNormal.sample(&mut rng);
            w += sd * z;
            values.push(w);
        }
        let times = (0..=n).map(|i| i as f64 * dt).collect();
        Ok(Self { times, values, seed: Some((seed, stream)) })
    }

    /// The path `W ≡ 0`.
    pub fn zero(horizon: f64, dt: f64) -> Result<Self> {
        check_grid(horizon, dt)?;
        let n = step_count(horizon, dt);
        Ok(Self {
            times: (0..=n).map(|i| i as f64 * dt).collect(),
            values: vec![0.0; n + 1],
            seed: None,
        })
    }

    /// A path with explicitly given grid values.
    pub fn from_values(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::InvalidParameter("path needs matching times and values, at least two points".into()));
        }
        if times[0] != 0.0 || values[0] != 0.0 {
            return Err(Error::InvalidParameter("path must start at t = 0 with W = 0".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("path times must increase and values be finite".into()));
        }
        Ok(Self { times, values, seed: None })
    }

    /// Records the seed and stream the values were drawn from.
    pub(crate) fn with_seed(mut self, seed: u64, stream: u64) -> Self {
        self.seed = Some((seed, stream));
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> Option<(u64, u64)> {
        self.seed
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("non-empty path")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid index of `t`, which must lie on the grid.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let scale = self.horizon().max(1.0);
        if t > self.horizon() + GRID_TOL * scale {
            return Err(Error::PathTooShort(t));
        }
        let pos = self.times.partition_point(|&x| x < t - GRID_TOL * scale);
        match self.times.get(pos) {
            Some(&x) if (x - t).abs() <= GRID_TOL * scale => Ok(pos),
            _ => Err(Error::OffGrid(t)),
        }
    }

    /// `W(t)` at a grid time.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.index_of(t).map(|i| self.values[i])
    }

    /// `W'(t) = amplitude · W(t / time_factor)`, i.e. times multiplied by `time_factor`.
    pub fn rescaled(&self, time_factor: f64, amplitude: f64) -> Self {
        Self {
            times: self.times.iter().map(|t| t * time_factor).collect(),
            values: self.values.iter().map(|w| w * amplitude).collect(),
            seed: self.seed,
        }
    }

    /// Path restricted to `[0, horizon]` (rounded up to the next grid point).
    pub fn truncated(&self, horizon: f64) -> Self {
        let end = self.times.partition_point(|&x| x < horizon - GRID_TOL * horizon.max(1.0));
        let end = (end + 1).min(self.times.len()).max(2);
        Self {
            times: self.times[..end].to_vec(),
            values: self.values[..end].to_vec(),
            seed: self.seed,
        }
    }
}

fn check_grid(horizon: f64, dt: f64) -> Result<()> {
    if !(horizon > 0.0 && dt > 0.0 && horizon.is_finite() && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("horizon {horizon} and dt {dt} must be > 0")));
    }
    Ok(())
}
