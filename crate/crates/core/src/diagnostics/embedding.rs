use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spectral::{
    fourier_lebesgue_norm, gevrey_norm, mode_norm, GevreyNormSpec, Lattice, SpectralField, Summability,
};

/// Relative slack before an inequality counts as violated.
pub const EMBEDDING_REL_TOL: f64 = 1e-12;
/// Regularity loss `ε` used for the Fourier-Lebesgue embedding with `(·)+`.
pub const FL_EPSILON: f64 = 0.01;

pub const GEVREY_SCALE: &str = "gevrey_scale";
pub const GEVREY_SMOOTHING: &str = "gevrey_smoothing";
pub const FL_HOLDER: &str = "fourier_lebesgue_holder";
pub const FL_HAUSDORFF_YOUNG: &str = "fourier_lebesgue_hausdorff_young";

/// Outcome of one inequality family over all sampled fields and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest `lhs / rhs − 1`.
    pub max_excess: f64,
    /// Largest `lhs / rhs` with the constant omitted, i.e. the empirically required constant.
    pub calibrated_constant: f64,
}

impl EmbeddingCheck {
    fn new(name: &str) -> Self {
        Self { name: name.into(), samples: 0, violations: 0, max_excess: f64::NEG_INFINITY, calibrated_constant: 0.0 }
    }

    fn record(&mut self, lhs: f64, rhs_norm: f64, constant: f64) {
        let rhs = constant * rhs_norm;
        self.samples += 1;
        let excess = if rhs > 0.0 { lhs / rhs - 1.0 } else if lhs > 0.0 { f64::INFINITY } else { -1.0 };
        if excess > EMBEDDING_REL_TOL {
            self.violations += 1;
        }
        self.max_excess = self.max_excess.max(excess);
        if rhs_norm > 0.0 {
            self.calibrated_constant = self.calibrated_constant.max(lhs / rhs_norm);
        }
    }

    fn merge(&mut self, other: &Self) {
        self.samples += other.samples;
        self.violations += other.violations;
        self.max_excess = self.max_excess.max(other.max_excess);
        self.calibrated_constant = self.calibrated_constant.max(other.calibrated_constant);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub n_fields: usize,
    pub seed: u64,
    pub tol: f64,
    pub checks: Vec<EmbeddingCheck>,
}

impl EmbeddingReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.violations == 0 && c.samples > 0)
    }

    pub fn check(&self, name: &str) -> Option<&EmbeddingCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Random real zero-mean trigonometric polynomial with coefficient decay `e^{-b|k|^s}`.
pub fn random_zero_mean_field(lattice: Lattice, s: f64, decay: f64, rng: &mut impl Rng) -> SpectralField {
    let mut f = SpectralField::zeros(lattice);
    let z = lattice.zero_index();
    for i in z + 1..lattice.len() {
        let k = lattice.mode(i);
        let amp = (-decay * mode_norm(k).powf(s)).exp();
        let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * amp;
        f.set_coeff(k, c).expect("lattice mode");
    }
    f
}

/// `(Σ_{0 < |k|_inf <= K} |k|^{-(d + ε q)})^{1/q}` with `1/p = 1/q + 1/r`: the Hölder constant
/// of `||f||_{W^{σ,p}} <= C ||f||_{W^{σ + d(1/p − 1/r) + ε, r}}` for zero-mean fields on the lattice.
pub fn holder_constant(lattice: &Lattice, p: f64, r: Summability, eps: f64) -> f64 {
    let d = lattice.dim() as f64;
    let q = match r {
        Summability::Infinity => p,
        Summability::Finite(r) => r * p / (r - p),
    };
    let sum: f64 = lattice.modes().filter(|k| *k != [0, 0]).map(|k| mode_norm(k).powf(-(d + eps * q))).sum();
    sum.powf(1.0 / q)
}

/// Samples of `f` on a uniform `n^d` grid of the torus.
struct Sampler {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl Sampler {
    fn new(n: usize) -> Self {
        Self { n, fft: FftPlanner::new().plan_fft_inverse(n) }
    }

    fn samples(&self, f: &SpectralField) -> Vec<Complex64> {
        let lat = f.lattice();
        let n = self.n;
        let d = lat.dim();
        let mut buf = vec![Complex64::new(0.0, 0.0); n.pow(d as u32)];
        let ni = n as i64;
        for (i, c) in f.coeffs().iter().enumerate() {
            let k = lat.mode(i);
            let a = k[0].rem_euclid(ni) as usize;
            let idx = if d == 1 { a } else { a * n + k[1].rem_euclid(ni) as usize };
            buf[idx] = *c;
        }
        if d == 1 {
            self.fft.process(&mut buf);
        } else {
            self.fft.process(&mut buf);
            let mut t = vec![Complex64::new(0.0, 0.0); n * n];
            for r in 0..n {
                for c in 0..n {
                    t[c * n + r] = buf[r * n + c];
                }
            }
            self.fft.process(&mut t);
            for r in 0..n {
                for c in 0..n {
                    buf[c * n + r] = t[r * n + c];
                }
            }
        }
        let scale = 1.0 / lat.volume();
        buf.iter().map(|v| v * scale).collect()
    }

    /// Trapezoid approximation of `||f||_{L^q(T^d)}`.
    fn lq_norm(&self, f: &SpectralField, q: f64) -> f64 {
        let lat = f.lattice();
        let samples = self.samples(f);
        let cell = lat.volume() / samples.len() as f64;
        if q.is_infinite() {
            return samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
        }
        (samples.iter().map(|v| v.norm().powf(q)).sum::<f64>() * cell).powf(1.0 / q)
    }
}

fn fractional_derivative(f: &SpectralField, order: f64) -> SpectralField {
    crate::spectral::apply_multiplier(f, |k| {
        Complex64::new(if k == [0, 0] { 0.0 } else { mode_norm(k).powf(order) }, 0.0)
    })
    .expect("finite symbol")
}

const RADII: [f64; 3] = [0.0, 0.3, 1.0];
const RADIUS_STEPS: [f64; 3] = [0.0, 0.2, 1.0];
const KAPPAS: [f64; 3] = [-0.5, 0.0, 0.9];
const KAPPA_STEPS: [f64; 3] = [0.0, 0.5, 1.7];
const SUMMABILITIES: [Summability; 3] = [Summability::Finite(1.0), Summability::Finite(2.0), Summability::Infinity];
const HOLDER_PAIRS: [(f64, Summability); 5] = [
    (1.0, Summability::Finite(2.0)),
    (1.0, Summability::Infinity),
    (2.0, Summability::Infinity),
    (1.5, Summability::Finite(3.0)),
    (2.0, Summability::Finite(4.0)),
];
const HY_EXPONENTS: [f64; 4] = [2.0, 3.0, 4.0, f64::INFINITY];
const ORDERS: [f64; 2] = [0.0, 0.7];

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn summability(p: f64) -> Summability {
    if p.is_infinite() {
        Summability::Infinity
    } else {
        Summability::Finite(p)
    }
}

fn field_checks(index: u64, seed: u64) -> Result<[EmbeddingCheck; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let d = rng.random_range(1..=2usize);
    let cutoff = if d == 1 { rng.random_range(2..=12) } else { rng.random_range(2..=6) };
    let lattice = Lattice::new(d, cutoff)?;
    let s = rng.random_range(0.51..=1.0);
    let f = if index % 10 == 0 {
        // single unit-frequency mode, where the scale embedding is tight
        let mut f = SpectralField::zeros(lattice);
        f.set_coeff([1, 0], Complex64::new(rng.random_range(0.5..2.0), 0.0))?;
        f
    } else {
        let decay = rng.random_range(0.0..2.0);
        random_zero_mean_field(lattice, s, decay, &mut rng)
    };

    let mut scale = EmbeddingCheck::new(GEVREY_SCALE);
    let mut smoothing = EmbeddingCheck::new(GEVREY_SMOOTHING);
    for &r in &SUMMABILITIES {
        for &a in &RADII {
            for &da in &RADIUS_STEPS {
                let a2 = a + da;
                for &kappa in &KAPPAS {
                    for &dk in &KAPPA_STEPS {
                        let k2 = kappa + dk;
                        let lhs = gevrey_norm(&f, &GevreyNormSpec::new(a, kappa, r, s)?)?;
                        let rhs = gevrey_norm(&f, &GevreyNormSpec::new(a2, k2, r, s)?)?;
                        scale.record(lhs, rhs, (a - a2).exp());
                        if da > 0.0 {
                            let n = dk.ceil() as u32;
                            let lhs = gevrey_norm(&f, &GevreyNormSpec::new(a, k2, r, s)?)?;
                            let rhs = gevrey_norm(&f, &GevreyNormSpec::new(a2, kappa, r, s)?)?;
                            smoothing.record(lhs, rhs, factorial(n) / da.powi(n as i32));
                        }
                    }
                }
            }
        }
    }

    let dim = d as f64;
    let mut holder = EmbeddingCheck::new(FL_HOLDER);
    for &(p, r) in &HOLDER_PAIRS {
        let c = holder_constant(&lattice, p, r, FL_EPSILON);
        let gain = dim * (1.0 / p - 1.0 / r.as_f64()) + FL_EPSILON;
        for &order in &ORDERS {
            let lhs = fourier_lebesgue_norm(&f, order, Summability::Finite(p))?;
            let rhs = fourier_lebesgue_norm(&f, order + gain, r)?;
            holder.record(lhs, rhs, c);
        }
    }

    let mut hy = EmbeddingCheck::new(FL_HAUSDORFF_YOUNG);
    let sampler = Sampler::new(16 * cutoff as usize);
    for &order in &ORDERS {
        let g = fractional_derivative(&f, order);
        for &p in &HY_EXPONENTS {
            let dual = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
            let lhs = fourier_lebesgue_norm(&f, order, summability(p))?;
            let rhs = sampler.lq_norm(&g, dual);
            let c = if p.is_infinite() { 1.0 } else { lattice.volume().powf(1.0 / p) };
            hy.record(lhs, rhs, c);
        }
    }
    Ok([scale, smoothing, holder, hy])
}

/// Runs the Gevrey scale and smoothing embeddings and the two Fourier-Lebesgue
/// embeddings on `n_fields` random zero-mean fields.
pub fn embedding_suite(n_fields: usize, seed: u64) -> Result<EmbeddingReport> {
    let per_field: Vec<[EmbeddingCheck; 4]> =
        (0..n_fields as u64).into_par_iter().map(|i| field_checks(i, seed)).collect::<Result<_>>()?;
    let mut checks = [GEVREY_SCALE, GEVREY_SMOOTHING, FL_HOLDER, FL_HAUSDORFF_YOUNG].map(EmbeddingCheck::new);
    for fc in &per_field {
        for (acc, c) in checks.iter_mut().zip(fc) {
            acc.merge(c);
        }
    }
    Ok(EmbeddingReport { n_fields, seed, tol: EMBEDDING_REL_TOL, checks: checks.to_vec() })
}
