use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Mode;

/// Constant real `d x d` interaction matrix `M`, `d <= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionMatrix {
    dim: usize,
    entries: [[f64; 2]; 2],
}

/// Symmetry class of the interaction matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixSymmetry {
    Symmetric,
    Antisymmetric,
    General,
}

impl InteractionMatrix {
    pub fn new(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if !(dim == 1 || dim == 2) || rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidParameter(format!("interaction matrix must be {dim}x{dim}")));
        }
        let mut entries = [[0.0; 2]; 2];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidParameter("interaction matrix entries must be finite".into()));
                }
                entries[i][j] = *v;
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn scalar(m: f64) -> Self {
        Self { dim: 1, entries: [[m, 0.0], [0.0, 0.0]] }
    }

    /// Counter-clockwise rotation by pi/2 in the plane.
    pub fn rotation() -> Self {
        Self { dim: 2, entries: [[0.0, -1.0], [1.0, 0.0]] }
    }

    pub fn identity(dim: usize, sign: f64) -> Self {
        let mut entries = [[0.0; 2]; 2];
        for (i, row) in entries.iter_mut().enumerate().take(dim) {
            row[i] = sign;
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.entries[i][..self.dim].to_vec()).collect()
    }

    pub fn negated(&self) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        out
    }

    /// `M v` for a lattice vector.
    #[inline]
    pub fn apply(&self, v: Mode) -> [f64; 2] {
        let (a, b) = (v[0] as f64, v[1] as f64);
        [
            self.entries[0][0] * a + self.entries[0][1] * b,
            self.entries[1][0] * a + self.entries[1][1] * b,
        ]
    }

    /// Bilinear form `u · M v`.
    #[inline]
    pub fn form(&self, u: Mode, v: Mode) -> f64 {
        let mv = self.apply(v);
        u[0] as f64 * mv[0] + u[1] as f64 * mv[1]
    }

    /// Operator norm `|M|` (largest singular value).
    pub fn operator_norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        // eigenvalues of M^T M
        let p = a * a + c * c;
        let q = a * b + c * d;
        let r = b * b + d * d;
        let tr = p + r;
        let disc = ((p - r) * (p - r) + 4.0 * q * q).sqrt();
        (0.5 * (tr + disc)).sqrt()
    }

    /// Operator norm of the symmetric part, which bounds `|k · M k| <= |M_sym| |k|^2`.
    pub fn symmetric_part_norm(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        let off = 0.5 * (b + c);
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + off * off).sqrt();
        (mean + rad).abs().max((mean - rad).abs())
    }

    pub fn symmetry(&self) -> MatrixSymmetry {
        let [[a, b], [c, d]] = self.entries;
        if a == 0.0 && d == 0.0 && b == -c {
            MatrixSymmetry::Antisymmetric
        } else if b == c {
            MatrixSymmetry::Symmetric
        } else {
            MatrixSymmetry::General
        }
    }
}
