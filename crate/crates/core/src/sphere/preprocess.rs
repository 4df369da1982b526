use num_complex::Complex64;

use crate::linalg::{householder_qr, CMatrix};
use crate::{Error, Result};

/// Channel after QR: `y' = Q^H y`, upper-triangular `R` with positive real
/// diagonal, and the noise scale `1 / (2 sigma^2)`.
#[derive(Debug, Clone)]
pub struct PreprocessedChannel {
    m_t: usize,
    q_h_y: Vec<Complex64>,
    r: CMatrix,
    inv_two_sigma_sq: f64,
}

/// QR-decomposes `h` and rotates `y` into the triangular domain.
pub fn qr_preprocess(h: &CMatrix, y: &[Complex64], sigma_sq: f64) -> Result<PreprocessedChannel> {
    Error::check_len(h.rows(), y.len())?;
    let (q, r) = householder_qr(h)?;
    let m_t = h.cols();
    let q_h_y = (0..m_t)
        .map(|j| (0..h.rows()).map(|i| q[(i, j)].conj() * y[i]).sum())
        .collect();
    PreprocessedChannel::new(r, q_h_y, sigma_sq)
}

impl PreprocessedChannel {
    /// Wraps an already triangular system.
    pub fn new(r: CMatrix, q_h_y: Vec<Complex64>, sigma_sq: f64) -> Result<Self> {
        let m_t = r.cols();
        if r.rows() != m_t {
            return Err(Error::BadShape {
                rows: r.rows(),
                cols: m_t,
            });
        }
        Error::check_len(m_t, q_h_y.len())?;
        if sigma_sq.is_nan() || sigma_sq <= 0.0 {
            return Err(Error::Config(format!(
                "noise variance must be positive, got {sigma_sq}"
            )));
        }
        Ok(PreprocessedChannel {
            m_t,
            q_h_y,
            r,
            inv_two_sigma_sq: 1.0 / (2.0 * sigma_sq),
        })
    }

    /// Number of transmit streams (tree depth).
    pub fn m_t(&self) -> usize {
        self.m_t
    }

    pub fn q_h_y(&self) -> &[Complex64] {
        &self.q_h_y
    }

    pub fn r(&self) -> &CMatrix {
        &self.r
    }

    #[inline]
    pub fn r_diag(&self, level: usize) -> f64 {
        self.r[(level, level)].re
    }

    pub fn inv_two_sigma_sq(&self) -> f64 {
        self.inv_two_sigma_sq
    }

    /// `y'_level - sum_{j > level} R_{level, j} s_j` for the fixed symbols
    /// `s[level + 1..]`. Entries of `s` at or below `level` are ignored.
    #[inline]
    pub fn residual(&self, level: usize, s: &[Complex64]) -> Complex64 {
        let row = self.r.row(level);
        let mut acc = self.q_h_y[level];
        for j in level + 1..self.m_t {
            acc -= row[j] * s[j];
        }
        acc
    }

    /// Channel distance increment of placing `point` at `level` under the
    /// given parent residual.
    #[inline]
    pub fn delta_channel(&self, level: usize, parent_residual: Complex64, point: Complex64) -> f64 {
        self.inv_two_sigma_sq * (parent_residual - point * self.r_diag(level)).norm_sqr()
    }
}
