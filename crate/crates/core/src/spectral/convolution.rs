use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::lattice::{Lattice, Mode};
use crate::error::Result;

/// How a quadratic product is evaluated in spectral space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvolutionPath {
    /// Direct truncated convolution over the lattice, `O(N^2)` in the mode count.
    #[default]
    Direct,
    /// Transform-based product. With `dealias`, inputs are truncated to
    /// `|k|_inf <= floor(2K/3)` first.
    Fast { dealias: bool },
}

/// Cutoff retained by the 2/3 rule.
#[inline]
pub fn dealias_cutoff(lattice: &Lattice) -> i64 {
    2 * lattice.cutoff() / 3
}

/// `F(f g)(k) = (2 pi)^{-d} Σ_j f^(k-j) g^(j)` with all of `k`, `j`, `k-j` on the lattice.
pub fn convolve_direct(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.check_same_lattice(g)?;
    let lat = *f.lattice();
    let inv_vol = 1.0 / lat.volume();
    let fc = f.coeffs();
    let gc = g.coeffs();
    let out = lat
        .modes()
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (jdx, gj) in gc.iter().enumerate() {
                if gj.re == 0.0 && gj.im == 0.0 {
                    continue;
                }
                let j = lat.mode(jdx);
                if let Some(kj) = lat.index([k[0] - j[0], k[1] - j[1]]) {
                    acc += fc[kj] * gj;
                }
            }
            acc * inv_vol
        })
        .collect();
    Ok(SpectralField::from_raw(lat, out, f.is_real() && g.is_real()))
}

pub fn convolve_product(f: &SpectralField, g: &SpectralField, path: ConvolutionPath) -> Result<SpectralField> {
    match path {
        ConvolutionPath::Direct => convolve_direct(f, g),
        ConvolutionPath::Fast { dealias } => {
            f.check_same_lattice(g)?;
            FastConvolver::new(*f.lattice()).convolve(f, g, dealias)
        }
    }
}

/// Smallest `2^a 3^b 5^c` that is at least `n`.
fn smooth_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Padded FFT grid for products of lattice fields.
///
/// The grid has at least `3K + 1` points per axis, so a product of two
/// lattice-supported fields has no aliasing on any retained mode and the
/// transform path reproduces the direct truncated convolution.
#[derive(Clone)]
pub struct FastConvolver {
    lattice: Lattice,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FastConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FastConvolver").field("lattice", &self.lattice).field("n", &self.n).finish()
    }
}

impl FastConvolver {
    pub fn new(lattice: Lattice) -> Self {
        let n = smooth_size(3 * lattice.cutoff() as usize + 1);
        let mut planner = FftPlanner::new();
        Self {
            lattice,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    #[inline]
    fn grid_index(&self, k: Mode) -> usize {
        let n = self.n as i64;
        let a = k[0].rem_euclid(n) as usize;
        match self.lattice.dim() {
            1 => a,
            _ => a * self.n + k[1].rem_euclid(n) as usize,
        }
    }

    fn transform(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        match self.lattice.dim() {
            1 => fft.process(buf),
            _ => {
                fft.process(buf);
                let mut t = vec![Complex64::new(0.0, 0.0); n * n];
                transpose(buf, &mut t, n);
                fft.process(&mut t);
                transpose(&t, buf, n);
            }
        }
    }

    /// Physical-space samples (unnormalized inverse DFT) of coefficients with
    /// every mode beyond `|k|_inf <= keep` dropped.
    pub fn to_physical(&self, coeffs: &[Complex64], keep: i64) -> Vec<Complex64> {
        let lat = self.lattice;
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n.pow(lat.dim() as u32)];
        for (i, c) in coeffs.iter().enumerate() {
            let k = lat.mode(i);
            if k[0].abs() <= keep && k[1].abs() <= keep {
                buf[self.grid_index(k)] = *c;
            }
        }
        self.transform(&mut buf, &self.inverse);
        buf
    }

    /// Lattice coefficients of the product represented by physical samples,
    /// normalized so that `to_spectral(to_physical(f) * to_physical(g))` is the
    /// convolution `(2 pi)^{-d} Σ_j f^(k-j) g^(j)`.
    pub fn to_spectral(&self, mut samples: Vec<Complex64>) -> Vec<Complex64> {
        let lat = self.lattice;
        self.transform(&mut samples, &self.forward);
        let scale = 1.0 / (self.n.pow(lat.dim() as u32) as f64 * lat.volume());
        lat.modes().map(|k| samples[self.grid_index(k)] * scale).collect()
    }

    pub fn convolve(&self, f: &SpectralField, g: &SpectralField, dealias: bool) -> Result<SpectralField> {
        f.check_same_lattice(g)?;
        let keep = if dealias { dealias_cutoff(&self.lattice) } else { self.lattice.cutoff() };
        let a = self.to_physical(f.coeffs(), keep);
        let b = self.to_physical(g.coeffs(), keep);
        let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        let mut out = self.to_spectral(prod);
        let real = f.is_real() && g.is_real();
        if real {
            symmetrize(&self.lattice, &mut out);
        }
        Ok(SpectralField::from_raw(self.lattice, out, real))
    }
}

/// Replaces `c(k)` by `(c(k) + conj(c(-k))) / 2`, removing round-off asymmetry.
pub(crate) fn symmetrize(lat: &Lattice, c: &mut [Complex64]) {
    for i in 0..c.len() {
        let j = lat.neg_index(i);
        if i < j {
            let avg = (c[i] + c[j].conj()) * 0.5;
            c[i] = avg;
            c[j] = avg.conj();
        } else if i == j {
            c[i].im = 0.0;
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in 0..n {
            dst[c * n + r] = src[r * n + c];
        }
    }
}
