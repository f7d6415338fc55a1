//! Lattice geometry, Fourier coefficient fields, norms, and products.
//!
//! Fourier conventions: `f^(k) = ∫_{T^d} f(x) e^{-i k·x} dx` and
//! `f(x) = (2 pi)^{-d} Σ_k f^(k) e^{i k·x}`. The constant function 1 has
//! `f^(0) = (2 pi)^d`.

mod convolution;
mod field;
mod lattice;
mod norm;

pub use convolution::{convolve_direct, convolve_product, dealias_cutoff, ConvolutionPath, FastConvolver};
pub(crate) use convolution::symmetrize;
pub use field::{SpectralField, HERMITIAN_TOL};
pub use lattice::{mode_neg, mode_norm, mode_sub, Lattice, Mode};
pub use norm::{apply_multiplier, fourier_lebesgue_norm, gevrey_norm, symbol_power, GevreyNormSpec, Summability, EXP_GUARD};
