use serde::{Deserialize, Serialize};

use super::bilinear::BilinearOperator;
use super::linear::{apply_factors, LinearFlow, DEFAULT_OVERFLOW_CAP};
use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::spectral::{fourier_lebesgue_norm, ConvolutionPath, SpectralField, Summability};
use crate::stochastic::BrownianPath;

/// Successive distances below this fraction of the solution size count as converged.
const CONVERGED_REL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub n_iter: usize,
    /// Number of trapezoid intervals on `[0, T]`; the nodes must lie on the path grid.
    pub quad_points: usize,
    pub convolution: ConvolutionPath,
    pub overflow_cap: f64,
    pub suppress_nonlinear: bool,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            n_iter: 8,
            quad_points: 100,
            convolution: ConvolutionPath::Direct,
            overflow_cap: DEFAULT_OVERFLOW_CAP,
            suppress_nonlinear: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub terminal: SpectralField,
    /// Final iterate at every quadrature node.
    pub trajectory: Vec<SpectralField>,
    pub times: Vec<f64>,
    /// `sup_t ||ϱ_{n+1}(t) − ϱ_n(t)||_{l¹}` per iteration.
    pub distances: Vec<f64>,
    /// Largest ratio of successive distances above the round-off floor.
    pub max_ratio: f64,
    /// Distances decrease at every iteration until they reach the round-off floor.
    pub contraction: bool,
}

fn l1(f: &SpectralField) -> f64 {
    fourier_lebesgue_norm(f, 0.0, Summability::Finite(1.0)).unwrap_or(f64::INFINITY)
}

/// Fixed-point iteration of the mild form
/// `ϱ(t) = e^{-t(ν²A/2+L)} ϱ⁰ − ∫_0^t e^{-(t−τ)(ν²A/2+L)} B^τ(ϱ(τ), ϱ(τ)) dτ`,
/// with the integral discretized by the trapezoid rule on a uniform grid.
pub fn picard_solve(
    rho0: &SpectralField,
    path: &BrownianPath,
    horizon: f64,
    opts: &PicardOptions,
    cfg: &ModelConfig,
) -> Result<PicardResult> {
    cfg.validate()?;
    if opts.quad_points == 0 || !(horizon > 0.0) {
        return Err(Error::InvalidParameter("need quad_points >= 1 and horizon > 0".into()));
    }
    let lattice = *rho0.lattice();
    let q = opts.quad_points;
    let h = horizon / q as f64;
    let times: Vec<f64> = (0..=q).map(|i| i as f64 * h).collect();
    let taus: Vec<f64> = times.iter().map(|&t| path.value_at(t).map(|w| cfg.nu * w)).collect::<Result<_>>()?;
    let flow = LinearFlow::new(lattice, cfg);
    let step = flow.propagator(h);
    let bilinear = BilinearOperator::new(lattice, cfg)?;

    let mut free = Vec::with_capacity(q + 1);
    free.push(rho0.clone());
    for i in 1..=q {
        let prev: &SpectralField = &free[i - 1];
        free.push(apply_factors(prev, &step));
    }

    let mut current = free.clone();
    let mut distances = Vec::with_capacity(opts.n_iter);
    for _ in 0..opts.n_iter {
        let b: Vec<SpectralField> = if opts.suppress_nonlinear {
            vec![SpectralField::zeros(lattice); q + 1]
        } else {
            current
                .iter()
                .zip(&taus)
                .map(|(r, &tau)| bilinear.apply(r, r, tau, opts.convolution, opts.overflow_cap))
                .collect::<Result<_>>()?
        };
        let mut next = Vec::with_capacity(q + 1);
        next.push(rho0.clone());
        let mut integral = SpectralField::zeros(lattice);
        for i in 1..=q {
            let pushed = apply_factors(&integral, &step);
            let eb = apply_factors(&b[i - 1], &step);
            integral = pushed.add_scaled(&eb.add_scaled(&b[i], 1.0)?, 0.5 * h)?;
            next.push(free[i].add_scaled(&integral, -1.0)?);
        }
        let dist = next
            .iter()
            .zip(&current)
            .map(|(a, c)| a.add_scaled(c, -1.0).map(|d| l1(&d)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        distances.push(dist);
        current = next;
    }

    let size = current.iter().map(l1).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let floor = CONVERGED_REL * size;
    let mut max_ratio: f64 = 0.0;
    let mut contraction = true;
    for w in distances.windows(2) {
        if w[0] <= floor {
            break;
        }
        let ratio = w[1] / w[0];
        max_ratio = max_ratio.max(ratio);
        if ratio >= 1.0 && w[1] > floor {
            contraction = false;
        }
    }
    Ok(PicardResult {
        terminal: current[q].clone(),
        trajectory: current,
        times,
        distances,
        max_ratio,
        contraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{linear_propagate, simulate, IntegratorConfig, SimOptions};
    use crate::model::fixtures::config;
    use crate::model::InteractionMatrix;
    use crate::spectral::Lattice;
    use num_complex::Complex64;

    fn data(lat: Lattice, amp: f64) -> SpectralField {
        let mut f = SpectralField::zeros(lat);
        f.set_coeff([1, 0], Complex64::new(amp, 0.0)).unwrap();
        f.set_coeff([3, 0], Complex64::new(0.5 * amp, -0.5 * amp)).unwrap();
        f
    }

    #[test]
    fn suppressed_converges_immediately() {
        let lat = Lattice::new(1, 8).unwrap();
        let cfg = config(1, InteractionMatrix::scalar(-1.0), 2.0, 1.0, 1.0, 0.1);
        let path = BrownianPath::sample(0.1, 1e-3, 1).unwrap();
        let opts = PicardOptions { suppress_nonlinear: true, n_iter: 3, ..PicardOptions::default() };
        let r = picard_solve(&data(lat, 1.0), &path, 0.1, &opts, &cfg).unwrap();
        assert!(r.distances.iter().all(|&d| d == 0.0));
        let lin = linear_propagate(&data(lat, 1.0), 0.1, &cfg).unwrap();
        assert!(r.terminal.max_abs_diff(&lin).unwrap() < 1e-14);
    }

    #[test]
    fn contracts_and_matches_heun() {
        let lat = Lattice::new(1, 8).unwrap();
        let cfg = config(1, InteractionMatrix::scalar(-1.0), 2.0, 1.0, 1.0, 0.1);
        let path = BrownianPath::sample(0.1, 1e-4, 2).unwrap();
        let rho0 = data(lat, 0.5);
        let opts = PicardOptions { n_iter: 12, quad_points: 1000, ..PicardOptions::default() };
        let r = picard_solve(&rho0, &path, 0.1, &opts, &cfg).unwrap();
        assert!(r.contraction, "{:?}", r.distances);
        assert!(r.max_ratio <= 0.5, "{:?}", r.distances);
        let out = simulate(&rho0, &path, 0.1, &IntegratorConfig::with_dt(1e-4), &cfg, &SimOptions { snapshot_stride: 1000, ..SimOptions::default() }).unwrap();
        let diff = out.last().rho.max_abs_diff(&r.terminal).unwrap();
        assert!(diff < 1e-6, "diff {diff}");
    }
}
