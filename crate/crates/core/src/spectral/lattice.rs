use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer frequency vector. One-dimensional lattices keep the second entry at zero.
pub type Mode = [i64; 2];

/// Truncated frequency lattice `{k in Z^d : |k|_inf <= K}` on the d-torus.
///
/// Storage order is row-major over the components, each running from `-K` to `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    cutoff: i64,
}

impl Lattice {
    pub fn new(dim: usize, cutoff: i64) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidLattice(format!("dimension {dim} not in {{1, 2}}")));
        }
        if cutoff < 1 {
            return Err(Error::InvalidLattice(format!("cutoff {cutoff} < 1")));
        }
        Ok(Self { dim, cutoff })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Number of retained values per axis, `2K + 1`.
    #[inline]
    pub fn side(&self) -> usize {
        (2 * self.cutoff + 1) as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn contains(&self, k: Mode) -> bool {
        let c = self.cutoff;
        k[0].abs() <= c && (if self.dim == 1 { k[1] == 0 } else { k[1].abs() <= c })
    }

    #[inline]
    pub fn index(&self, k: Mode) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        Some(self.index_unchecked(k))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, k: Mode) -> usize {
        let c = self.cutoff;
        match self.dim {
            1 => (k[0] + c) as usize,
            _ => ((k[0] + c) as usize) * self.side() + (k[1] + c) as usize,
        }
    }

    #[inline]
    pub fn mode(&self, idx: usize) -> Mode {
        let c = self.cutoff;
        match self.dim {
            1 => [idx as i64 - c, 0],
            _ => {
                let n = self.side();
                [(idx / n) as i64 - c, (idx % n) as i64 - c]
            }
        }
    }

    /// Index of the zero frequency.
    #[inline]
    pub fn zero_index(&self) -> usize {
        self.index_unchecked([0, 0])
    }

    /// Index of `-k` for the mode stored at `idx`.
    #[inline]
    pub fn neg_index(&self, idx: usize) -> usize {
        self.len() - 1 - idx
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.len()).map(move |i| self.mode(i))
    }

    /// Largest Euclidean frequency magnitude on the lattice.
    pub fn max_norm(&self) -> f64 {
        self.cutoff as f64 * (self.dim as f64).sqrt()
    }

    /// `(2 pi)^d`, the Fourier coefficient of the constant function 1.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(self.dim as i32)
    }
}

/// Euclidean length `|k|`.
#[inline]
pub fn mode_norm(k: Mode) -> f64 {
    ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt()
}

#[inline]
pub fn mode_sub(a: Mode, b: Mode) -> Mode {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn mode_neg(a: Mode) -> Mode {
    [-a[0], -a[1]]
}
