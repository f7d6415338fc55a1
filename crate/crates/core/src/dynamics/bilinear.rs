use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::spectral::{dealias_cutoff, mode_norm, symmetrize, ConvolutionPath, FastConvolver, Lattice, Mode, SpectralField};

/// Lattices up to this many modes keep a table of fused exponents per `(k, j)` pair.
const EXPONENT_TABLE_MAX_LEN: usize = 2500;
/// Output modes below this count are evaluated on the calling thread.
const PARALLEL_MIN_LEN: usize = 256;
const NO_PAIR: u32 = u32::MAX;

/// The bilinear term `B(f, g) = div Γ(Γ^{-1} f · M ∇g * Γ^{-1} g)` on a fixed lattice.
///
/// Spectrally, `B(f,g)^(k) = -(2π)^{-d} Σ_j (k·Mj) ĝ(j) e^{τ(|k-j|^s + |j|^s - |k|^s)} f^(k-j) g^(j)`
/// with `τ = νW`.
#[derive(Debug, Clone)]
pub struct BilinearOperator {
    lattice: Lattice,
    s: f64,
    modes: Vec<Mode>,
    norms_s: Vec<f64>,
    /// `ĝ(j) · Mj` per lattice index.
    kernel_vec: Vec<[Complex64; 2]>,
    /// Index into `exponents` per `(k, j)` pair, or `NO_PAIR` when `k - j` is off the lattice.
    exponent_ids: Option<Vec<u32>>,
    exponents: Vec<f64>,
    max_excess: f64,
    fast: FastConvolver,
}

impl BilinearOperator {
    pub fn new(lattice: Lattice, cfg: &ModelConfig) -> Result<Self> {
        if cfg.d != lattice.dim() {
            return Err(Error::InvalidParameter(format!(
                "model dimension {} does not match lattice dimension {}",
                cfg.d,
                lattice.dim()
            )));
        }
        let modes: Vec<Mode> = lattice.modes().collect();
        let norms_s: Vec<f64> = modes.iter().map(|&k| mode_norm(k).powf(cfg.s)).collect();
        let kernel_vec = modes
            .iter()
            .map(|&j| {
                let g = cfg.kernel.eval(j);
                let mj = cfg.matrix.apply(j);
                [g * mj[0], g * mj[1]]
            })
            .collect();
        let len = lattice.len();
        let mut max_excess: f64 = 0.0;
        let mut ids = Vec::new();
        let mut exponents = Vec::new();
        let tabulate = len <= EXPONENT_TABLE_MAX_LEN;
        let mut unique: HashMap<u64, u32> = HashMap::new();
        if tabulate {
            ids = vec![NO_PAIR; len * len];
        }
        for (ki, &k) in modes.iter().enumerate() {
            for (ji, &j) in modes.iter().enumerate() {
                let kj = [k[0] - j[0], k[1] - j[1]];
                if !lattice.contains(kj) {
                    continue;
                }
                let excess = norms_s[lattice.index_unchecked(kj)] + norms_s[ji] - norms_s[ki];
                max_excess = max_excess.max(excess);
                if tabulate {
                    let next = exponents.len() as u32;
                    let id = *unique.entry(excess.to_bits()).or_insert_with(|| {
                        exponents.push(excess);
                        next
                    });
                    ids[ki * len + ji] = id;
                }
            }
        }
        Ok(Self {
            lattice,
            s: cfg.s,
            modes,
            norms_s,
            kernel_vec,
            exponent_ids: tabulate.then_some(ids),
            exponents,
            max_excess,
            fast: FastConvolver::new(lattice),
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// `max (|k-j|^s + |j|^s - |k|^s)` over lattice pairs.
    pub fn max_excess(&self) -> f64 {
        self.max_excess
    }

    /// Largest exponent of `e` the given evaluation path forms at `tau`.
    pub fn exponent_bound(&self, tau: f64, path: ConvolutionPath) -> f64 {
        match path {
            ConvolutionPath::Direct => (tau * self.max_excess).max(0.0),
            ConvolutionPath::Fast { .. } => tau.abs() * self.lattice.max_norm().powf(self.s),
        }
    }

    /// `B(f, g)` at `tau = νW`.
    pub fn apply(&self, f: &SpectralField, g: &SpectralField, tau: f64, path: ConvolutionPath, cap: f64) -> Result<SpectralField> {
        f.check_same_lattice(g)?;
        if f.lattice() != &self.lattice {
            return Err(Error::LatticeMismatch {
                left: format!("{:?}", f.lattice()),
                right: format!("{:?}", self.lattice),
            });
        }
        let exponent = self.exponent_bound(tau, path);
        if exponent > cap {
            return Err(Error::OverflowRisk { exponent, cap });
        }
        let mut out = match path {
            ConvolutionPath::Direct => self.apply_direct(f, g, tau),
            ConvolutionPath::Fast { dealias } => self.apply_fast(f, g, tau, dealias),
        };
        let real = f.is_real() && g.is_real();
        if real {
            symmetrize(&self.lattice, &mut out);
        }
        Ok(SpectralField::from_raw(self.lattice, out, real))
    }

    fn apply_direct(&self, f: &SpectralField, g: &SpectralField, tau: f64) -> Vec<Complex64> {
        let lat = self.lattice;
        let len = lat.len();
        let fc = f.coeffs();
        // (j, ĝ(j)(Mj) g^(j))
        let support: Vec<(usize, [Complex64; 2])> = g
            .coeffs()
            .iter()
            .enumerate()
            .filter_map(|(j, &c)| {
                let kv = self.kernel_vec[j];
                let a = [kv[0] * c, kv[1] * c];
                (a[0].norm_sqr() + a[1].norm_sqr() > 0.0).then_some((j, a))
            })
            .collect();
        let table_exp: Option<Vec<f64>> =
            self.exponent_ids.as_ref().map(|_| self.exponents.iter().map(|e| (tau * e).exp()).collect());
        let scale = -1.0 / lat.volume();
        let eval = |ki: usize| -> Complex64 {
            let k = self.modes[ki];
            if k == [0, 0] {
                return Complex64::new(0.0, 0.0);
            }
            let kf = [k[0] as f64, k[1] as f64];
            let mut acc = Complex64::new(0.0, 0.0);
            for &(ji, a) in &support {
                let j = self.modes[ji];
                let kj = [k[0] - j[0], k[1] - j[1]];
                let w = match (&self.exponent_ids, &table_exp) {
                    (Some(ids), Some(ex)) => {
                        let id = ids[ki * len + ji];
                        if id == NO_PAIR {
                            continue;
                        }
                        ex[id as usize]
                    }
                    _ => {
                        if !lat.contains(kj) {
                            continue;
                        }
                        let e = self.norms_s[lat.index_unchecked(kj)] + self.norms_s[ji] - self.norms_s[ki];
                        if tau == 0.0 {
                            1.0
                        } else {
                            (tau * e).exp()
                        }
                    }
                };
                let fk = fc[lat.index_unchecked(kj)];
                if fk.re == 0.0 && fk.im == 0.0 {
                    continue;
                }
                acc += (a[0] * kf[0] + a[1] * kf[1]) * (fk * w);
            }
            acc * scale
        };
        if len >= PARALLEL_MIN_LEN {
            (0..len).into_par_iter().map(eval).collect()
        } else {
            (0..len).map(eval).collect()
        }
    }

    fn apply_fast(&self, f: &SpectralField, g: &SpectralField, tau: f64, dealias: bool) -> Vec<Complex64> {
        let lat = self.lattice;
        let keep = if dealias { dealias_cutoff(&lat) } else { lat.cutoff() };
        let i = Complex64::new(0.0, 1.0);
        let weighted: Vec<Complex64> =
            f.coeffs().iter().zip(&self.norms_s).map(|(c, n)| c * (tau * n).exp()).collect();
        let fp = self.fast.to_physical(&weighted, keep);
        let mut out = vec![Complex64::new(0.0, 0.0); lat.len()];
        for c in 0..lat.dim() {
            let v: Vec<Complex64> = g
                .coeffs()
                .iter()
                .enumerate()
                .map(|(j, gc)| i * self.kernel_vec[j][c] * gc * (tau * self.norms_s[j]).exp())
                .collect();
            let vp = self.fast.to_physical(&v, keep);
            let prod = fp.iter().zip(&vp).map(|(a, b)| a * b).collect();
            let conv = self.fast.to_spectral(prod);
            for (idx, o) in out.iter_mut().enumerate() {
                *o += i * (self.modes[idx][c] as f64) * conv[idx];
            }
        }
        for (o, n) in out.iter_mut().zip(&self.norms_s) {
            *o *= (-tau * n).exp();
        }
        out
    }
}

/// `B(f, g)` at `tau = νW` for one evaluation.
pub fn bilinear_b(
    f: &SpectralField,
    g: &SpectralField,
    tau: f64,
    cfg: &ModelConfig,
    path: ConvolutionPath,
    cap: f64,
) -> Result<SpectralField> {
    BilinearOperator::new(*f.lattice(), cfg)?.apply(f, g, tau, path, cap)
}
