use num_complex::Complex64;

use super::lattice::{Lattice, Mode};
use crate::error::{Error, Result};

/// Relative tolerance used when checking Hermitian symmetry of real fields.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Fourier coefficients `f^(k) = ∫ f(x) e^{-i k·x} dx` of a trigonometric
/// polynomial supported on a [`Lattice`].
///
/// `real` records that the field represents a real-valued function, in which
/// case `f^(-k) = conj(f^(k))` holds up to [`HERMITIAN_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    lattice: Lattice,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(lattice: Lattice) -> Self {
        Self {
            lattice,
            coeffs: vec![Complex64::new(0.0, 0.0); lattice.len()],
            real: true,
        }
    }

    /// The constant function `c`, i.e. `(2 pi)^d c` at the zero mode.
    pub fn constant(lattice: Lattice, c: f64) -> Self {
        let mut f = Self::zeros(lattice);
        f.coeffs[lattice.zero_index()] = Complex64::new(c * lattice.volume(), 0.0);
        f
    }

    pub fn from_coeffs(lattice: Lattice, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != lattice.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                lattice.len(),
                coeffs.len()
            )));
        }
        let f = Self { lattice, coeffs, real };
        f.validate()?;
        Ok(f)
    }

    /// Builds a field from a per-mode function.
    pub fn from_fn(lattice: Lattice, real: bool, mut coeff: impl FnMut(Mode) -> Complex64) -> Result<Self> {
        let coeffs = lattice.modes().map(&mut coeff).collect();
        Self::from_coeffs(lattice, coeffs, real)
    }

    pub(crate) fn from_raw(lattice: Lattice, coeffs: Vec<Complex64>, real: bool) -> Self {
        debug_assert_eq!(coeffs.len(), lattice.len());
        Self { lattice, coeffs, real }
    }

    fn validate(&self) -> Result<()> {
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite { mode: self.lattice.mode(i) });
            }
        }
        if self.real {
            if let Some((mode, defect)) = self.hermitian_defect() {
                return Err(Error::NotHermitian { mode, defect });
            }
        }
        Ok(())
    }

    /// Worst Hermitian-symmetry defect relative to the largest coefficient,
    /// if it exceeds [`HERMITIAN_TOL`].
    pub fn hermitian_defect(&self) -> Option<(Mode, f64)> {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: Option<(Mode, f64)> = None;
        for i in 0..self.coeffs.len() {
            let j = self.lattice.neg_index(i);
            let defect = (self.coeffs[i] - self.coeffs[j].conj()).norm() / scale;
            if defect > HERMITIAN_TOL && worst.is_none_or(|(_, w)| defect > w) {
                worst = Some((self.lattice.mode(i), defect));
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect().is_none()
    }

    #[inline]
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    #[inline]
    pub fn is_real(&self) -> bool {
        self.real
    }

    #[cfg(test)]
    pub(crate) fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    pub fn coeff(&self, k: Mode) -> Option<Complex64> {
        self.lattice.index(k).map(|i| self.coeffs[i])
    }

    /// Sets one coefficient and, for real fields, its conjugate partner.
    pub fn set_coeff(&mut self, k: Mode, value: Complex64) -> Result<()> {
        let i = self
            .lattice
            .index(k)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {k:?} outside lattice")))?;
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFinite { mode: k });
        }
        self.coeffs[i] = value;
        if self.real {
            let j = self.lattice.neg_index(i);
            if i == j {
                self.coeffs[i] = Complex64::new(value.re, 0.0);
            } else {
                self.coeffs[j] = value.conj();
            }
        }
        Ok(())
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[self.lattice.zero_index()]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &SpectralField) -> Result<f64> {
        self.check_same_lattice(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn check_same_lattice(&self, other: &SpectralField) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch {
                left: format!("{:?}", self.lattice),
                right: format!("{:?}", other.lattice),
            });
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        Self::from_raw(self.lattice, self.coeffs.iter().map(|c| c * factor).collect(), self.real)
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &SpectralField, factor: f64) -> Result<SpectralField> {
        self.check_same_lattice(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b * factor)
            .collect();
        Ok(Self::from_raw(self.lattice, coeffs, self.real && other.real))
    }

    /// Zeroes every mode with `|k|_inf` above `keep`.
    pub fn truncated(&self, keep: i64) -> SpectralField {
        let mut out = self.clone();
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let k = self.lattice.mode(i);
            if k[0].abs() > keep || k[1].abs() > keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Evaluates the inverse transform `(2 pi)^{-d} Σ f^(k) e^{i k·x}` at a point.
    pub fn eval(&self, x: [f64; 2]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.lattice.mode(i);
            let phase = k[0] as f64 * x[0] + k[1] as f64 * x[1];
            acc += c * Complex64::from_polar(1.0, phase);
        }
        acc / self.lattice.volume()
    }
}
