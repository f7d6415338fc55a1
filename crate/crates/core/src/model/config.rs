use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::InteractionKernel;
use super::matrix::InteractionMatrix;
use crate::error::{Error, Result};
use crate::spectral::{mode_norm, Mode};

/// Every parameter of the transformed random PDE and of the decay statement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d: usize,
    /// Fractional order of the random diffusion.
    pub s: f64,
    pub nu: f64,
    /// Initial Gevrey radius of the barrier `φ^t = α + β t`.
    pub alpha: f64,
    /// Growth rate of the barrier.
    pub beta: f64,
    /// Extra Gevrey radius in the decay statement.
    pub epsilon: f64,
    /// Normalized mean `(2 pi)^{-d} ∫ μ dx`. The theory assumes 1; other
    /// values are used by the mass-rescaling comparison.
    #[serde(default = "unit_mass")]
    pub mass: f64,
    pub matrix: InteractionMatrix,
    pub kernel: InteractionKernel,
}

fn unit_mass() -> f64 {
    1.0
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d == 1 || self.d == 2) {
            return Err(Error::InvalidParameter(format!("d = {} not in {{1, 2}}", self.d)));
        }
        if self.matrix.dim() != self.d {
            return Err(Error::InvalidParameter(format!(
                "matrix is {0}x{0} but d = {1}",
                self.matrix.dim(),
                self.d
            )));
        }
        if !(self.s > 0.0 && self.s <= 1.0) {
            return Err(Error::InvalidParameter(format!("s = {} not in (0, 1]", self.s)));
        }
        for (name, v) in [("nu", self.nu), ("alpha", self.alpha), ("beta", self.beta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be >= 0")));
            }
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {} must be >= 0", self.epsilon)));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass = {} must be > 0", self.mass)));
        }
        Ok(())
    }

    /// Lower end of the admissible window for `s`: `max(1/2, (2 - γ)/2)`.
    pub fn s_lower_bound(&self) -> f64 {
        f64::max(0.5, (2.0 - self.kernel.gamma()) / 2.0)
    }

    /// Whether `max(1/2, (2-γ)/2) < s <= 1`. Runs outside the window are allowed
    /// but carry no guarantees.
    pub fn in_s_window(&self) -> bool {
        self.s > self.s_lower_bound() && self.s <= 1.0
    }

    /// `φ^t = α + β t`.
    #[inline]
    pub fn phi(&self, t: f64) -> f64 {
        self.alpha + self.beta * t
    }

    /// `(k · M k) g^(k)`, scaled by the mass.
    #[inline]
    pub fn kernel_term(&self, k: Mode) -> Complex64 {
        self.kernel.eval(k) * (self.mass * self.matrix.form(k, k))
    }

    /// Symbol of `ν² A / 2 + L`: `ν² |k|^{2s} / 2 - (k · M k) g^(k)`.
    pub fn linear_symbol(&self, k: Mode) -> Complex64 {
        if k == [0, 0] {
            return Complex64::new(0.0, 0.0);
        }
        let diffusion = 0.5 * self.nu * self.nu * mode_norm(k).powf(2.0 * self.s);
        Complex64::new(diffusion, 0.0) - self.kernel_term(k)
    }

    /// `|M|`.
    pub fn matrix_norm(&self) -> f64 {
        self.matrix.operator_norm()
    }
}

/// Symbol of the linear operator for a configuration.
pub fn linear_symbol(k: Mode, cfg: &ModelConfig) -> Complex64 {
    cfg.linear_symbol(k)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn config(d: usize, matrix: InteractionMatrix, gamma: f64, s: f64, nu: f64, beta: f64) -> ModelConfig {
        ModelConfig {
            d,
            s,
            nu,
            alpha: 0.1,
            beta,
            epsilon: 0.05,
            mass: 1.0,
            matrix,
            kernel: InteractionKernel::power_law(gamma).unwrap(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::config;
    use super::*;

    #[test]
    fn antisymmetric_matrix_leaves_pure_diffusion() {
        let cfg = config(2, InteractionMatrix::rotation(), 1.0, 0.75, 1.3, 0.1);
        for k in [[1, 0], [2, 3], [-4, 1]] {
            let expected = 0.5 * 1.3 * 1.3 * mode_norm(k).powf(1.5);
            assert_eq!(linear_symbol(k, &cfg), Complex64::new(expected, 0.0));
        }
    }

    #[test]
    fn repulsive_symbol_value() {
        // 2 - (4 * -1) * 1/4 = 3, recomputed term by term
        let cfg = config(1, InteractionMatrix::scalar(-1.0), 2.0, 1.0, 1.0, 0.0);
        let m = linear_symbol([2, 0], &cfg);
        let diffusion = 0.5 * 1.0 * 4.0;
        let kernel = -4.0 * 0.25;
        assert_eq!(diffusion - kernel, 3.0);
        assert_eq!(m, Complex64::new(3.0, 0.0));
        assert_eq!(linear_symbol([0, 0], &cfg), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn s_window() {
        let mut cfg = config(1, InteractionMatrix::scalar(1.0), 1.0, 0.5, 1.0, 0.0);
        assert!(!cfg.in_s_window());
        cfg.s = 0.6;
        assert!(cfg.in_s_window());
        cfg.kernel = InteractionKernel::power_law(0.5).unwrap();
        assert!(!cfg.in_s_window(), "(2 - 0.5)/2 = 0.75");
    }

    #[test]
    fn validate_rejects_mismatch() {
        let cfg = config(2, InteractionMatrix::scalar(1.0), 1.0, 1.0, 1.0, 0.0);
        assert!(cfg.validate().is_err());
    }
}
