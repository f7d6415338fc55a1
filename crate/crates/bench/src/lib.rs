//! Shared inputs for the benchmarks.

use gevrey_flow::model::{InteractionKernel, InteractionMatrix, ModelConfig};
use gevrey_flow::spectral::{Lattice, SpectralField};
use num_complex::Complex64;

/// Repulsive `d`-dimensional configuration with kernel `|k|^{-2}`.
pub fn repulsive(d: usize) -> ModelConfig {
    ModelConfig {
        d,
        s: 1.0,
        nu: 1.0,
        alpha: 0.1,
        beta: 0.1,
        epsilon: 0.05,
        mass: 1.0,
        matrix: if d == 1 { InteractionMatrix::scalar(-1.0) } else { InteractionMatrix::identity(2, -1.0) },
        kernel: InteractionKernel::power_law(2.0).expect("valid exponent"),
    }
}

/// Deterministic real zero-mean field with coefficients decaying like `e^{-|k|/4}`.
pub fn smooth_field(lattice: Lattice) -> SpectralField {
    SpectralField::from_fn(lattice, true, |k| {
        let n = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
        if n == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let phase = (k[0] * 7 + k[1] * 3) as f64;
            Complex64::new(phase.cos(), 0.5 * phase.sin()) * (-0.25 * n).exp()
        }
    })
    .expect("finite coefficients")
}
