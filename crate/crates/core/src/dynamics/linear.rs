use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelConfig;
use crate::spectral::{apply_multiplier, mode_norm, Lattice, SpectralField};

/// Default bound on exponents of `e` formed by multipliers and the bilinear term.
pub const DEFAULT_OVERFLOW_CAP: f64 = 300.0;

/// `|tau| · max|k|^s`, the largest exponent formed by `e^{∓tau |k|^s}` on the lattice.
pub fn multiplier_exponent(lattice: &Lattice, tau: f64, s: f64) -> f64 {
    tau.abs() * lattice.max_norm().powf(s)
}

/// `Γ = e^{-tau |∇|^s}` applied to `f`.
pub fn gamma_apply(f: &SpectralField, tau: f64, s: f64, cap: f64) -> Result<SpectralField> {
    let exponent = multiplier_exponent(f.lattice(), tau, s);
    if exponent > cap {
        return Err(Error::OverflowRisk { exponent, cap });
    }
    if tau == 0.0 {
        return Ok(f.clone());
    }
    apply_multiplier(f, |k| Complex64::new((-tau * mode_norm(k).powf(s)).exp(), 0.0))
}

/// Symbols of `ν² A / 2 + L` tabulated on a lattice.
#[derive(Debug, Clone)]
pub struct LinearFlow {
    lattice: Lattice,
    symbols: Vec<Complex64>,
}

impl LinearFlow {
    pub fn new(lattice: Lattice, cfg: &ModelConfig) -> Self {
        let symbols = lattice.modes().map(|k| cfg.linear_symbol(k)).collect();
        Self { lattice, symbols }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    /// Per-mode factors `e^{-dt m(k)}`.
    pub fn propagator(&self, dt: f64) -> Vec<Complex64> {
        self.symbols.iter().map(|m| (-dt * m).exp()).collect()
    }

    pub fn apply(&self, f: &SpectralField, dt: f64) -> Result<SpectralField> {
        if !(dt >= 0.0) {
            return Err(Error::InvalidParameter(format!("propagation time {dt} must be >= 0")));
        }
        Ok(apply_factors(f, &self.propagator(dt)))
    }
}

/// Multiplies each coefficient by a tabulated Hermitian factor.
pub(crate) fn apply_factors(f: &SpectralField, factors: &[Complex64]) -> SpectralField {
    let coeffs = f.coeffs().iter().zip(factors).map(|(c, e)| c * e).collect();
    SpectralField::from_raw(*f.lattice(), coeffs, f.is_real())
}

/// `e^{-dt(ν² A / 2 + L)} f`.
pub fn linear_propagate(f: &SpectralField, dt: f64, cfg: &ModelConfig) -> Result<SpectralField> {
    LinearFlow::new(*f.lattice(), cfg).apply(f, dt)
}
