use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{mode_neg, mode_norm, Mode, HERMITIAN_TOL};

/// Fourier transform `g^(k)` of the interaction potential, with `|g^(k)| <= C_g |k|^{-γ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum InteractionKernel {
    /// `g^(k) = amplitude · |k|^{-γ}` for `k != 0`.
    PowerLaw { gamma: f64, amplitude: f64 },
    /// Explicit values on `|k|_inf <= radius`. Modes outside the table are not
    /// evaluable; `bound_constant` is the certified `C_g`.
    Tabulated {
        gamma: f64,
        radius: i64,
        values: BTreeMap<(i64, i64), Complex64>,
        bound_constant: f64,
    },
}

impl InteractionKernel {
    pub fn power_law(gamma: f64) -> Result<Self> {
        Self::power_law_scaled(gamma, 1.0)
    }

    pub fn power_law_scaled(gamma: f64, amplitude: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("kernel decay exponent γ = {gamma} must be > 0")));
        }
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter("kernel amplitude must be finite".into()));
        }
        Ok(Self::PowerLaw { gamma, amplitude })
    }

    /// Builds a tabulated kernel, checking Hermitian symmetry on the table and
    /// measuring `C_g = max |g^(k)| |k|^γ`.
    pub fn tabulated(gamma: f64, radius: i64, values: BTreeMap<(i64, i64), Complex64>) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("kernel decay exponent γ = {gamma} must be > 0")));
        }
        let scale = values.values().map(|v| v.norm()).fold(f64::MIN_POSITIVE, f64::max);
        let mut bound: f64 = 0.0;
        for (&(a, b), v) in &values {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite { mode: [a, b] });
            }
            if a.abs() > radius || b.abs() > radius {
                return Err(Error::InvalidParameter(format!("table entry {:?} outside radius {radius}", (a, b))));
            }
            let partner = values.get(&(-a, -b)).copied().unwrap_or_default();
            let defect = (v - partner.conj()).norm() / scale;
            if defect > HERMITIAN_TOL {
                return Err(Error::NotHermitian { mode: [a, b], defect });
            }
            if (a, b) != (0, 0) {
                bound = bound.max(v.norm() * mode_norm([a, b]).powf(gamma));
            }
        }
        Ok(Self::Tabulated { gamma, radius, values, bound_constant: bound })
    }

    pub fn gamma(&self) -> f64 {
        match self {
            Self::PowerLaw { gamma, .. } | Self::Tabulated { gamma, .. } => *gamma,
        }
    }

    /// Certified constant `C_g` in `|g^(k)| <= C_g |k|^{-γ}`.
    pub fn bound_constant(&self) -> f64 {
        match self {
            Self::PowerLaw { amplitude, .. } => amplitude.abs(),
            Self::Tabulated { bound_constant, .. } => *bound_constant,
        }
    }

    /// Largest `|k|_inf` at which the kernel can be evaluated.
    pub fn evaluable_radius(&self) -> Option<i64> {
        match self {
            Self::PowerLaw { .. } => None,
            Self::Tabulated { radius, .. } => Some(*radius),
        }
    }

    /// `g^(k)`, with `g^(0) = 0`. Tabulated kernels return zero for modes
    /// missing from the table; callers must stay inside [`Self::evaluable_radius`].
    pub fn eval(&self, k: Mode) -> Complex64 {
        if k == [0, 0] {
            return Complex64::new(0.0, 0.0);
        }
        match self {
            Self::PowerLaw { gamma, amplitude } => Complex64::new(amplitude * mode_norm(k).powf(-gamma), 0.0),
            Self::Tabulated { values, .. } => values.get(&(k[0], k[1])).copied().unwrap_or_default(),
        }
    }

    /// Largest Hermitian defect `|g^(-k) - conj(g^(k))|` over the given modes.
    pub fn hermitian_defect(&self, modes: impl Iterator<Item = Mode>) -> f64 {
        modes
            .map(|k| (self.eval(mode_neg(k)) - self.eval(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Empirical `max |g^(k)| |k|^γ` over the given modes.
    pub fn measured_bound(&self, modes: impl Iterator<Item = Mode>) -> f64 {
        let gamma = self.gamma();
        modes
            .filter(|k| *k != [0, 0])
            .map(|k| self.eval(k).norm() * mode_norm(k).powf(gamma))
            .fold(0.0, f64::max)
    }
}
