//! Small dense complex matrices and a Householder QR.

use num_complex::Complex64;

use crate::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        Error::check_len(rows * cols, data.len())?;
        Ok(CMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        CMatrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self[(i, k)] * other[(k, j)]).sum()
        })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Thin QR factorization `A = Q R` of an `m x n` matrix with `m >= n`.
///
/// `Q` is `m x n` with orthonormal columns and `R` is `n x n` upper
/// triangular with a real, strictly positive diagonal. Householder
/// reflections without column pivoting; the diagonal phases are rotated into
/// `Q` afterwards. Fails if some `|R_kk|` is below `1e-10 * max |R_jj|`.
pub fn householder_qr(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (m, n) = (a.rows(), a.cols());
    if m < n || n == 0 {
        return Err(Error::BadShape { rows: m, cols: n });
    }
    let mut r = a.clone();
    let mut q = CMatrix::identity(m);
    let zero = Complex64::new(0.0, 0.0);

    for k in 0..n {
        let norm_x = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm_x == 0.0 {
            return Err(Error::RankDeficient {
                column: k,
                diag: 0.0,
            });
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm_x;

        let mut v: Vec<Complex64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let v_norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if v_norm == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= v_norm);

        // R <- (I - 2 v v^H) R on rows k.., columns k..
        for j in k..n {
            let dot: Complex64 = v
                .iter()
                .enumerate()
                .map(|(t, vi)| vi.conj() * r[(k + t, j)])
                .sum();
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= 2.0 * vi * dot;
            }
        }
        // Q <- Q (I - 2 v v^H) on columns k..
        for i in 0..m {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| q[(i, k + t)] * vi).sum();
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= 2.0 * dot * vi.conj();
            }
        }
        for i in k + 1..m {
            r[(i, k)] = zero;
        }
    }

    let mut q_thin = CMatrix::from_fn(m, n, |i, j| q[(i, j)]);
    let mut r_sq = CMatrix::from_fn(n, n, |i, j| if j >= i { r[(i, j)] } else { zero });

    // Rotate each diagonal entry onto the positive real axis.
    for k in 0..n {
        let d = r_sq[(k, k)];
        let mag = d.norm();
        let phase = if mag == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            d / mag
        };
        for j in k..n {
            r_sq[(k, j)] *= phase.conj();
        }
        r_sq[(k, k)] = Complex64::new(mag, 0.0);
        for i in 0..m {
            q_thin[(i, k)] *= phase;
        }
    }

    let max_diag = (0..n).map(|k| r_sq[(k, k)].re).fold(0.0, f64::max);
    for k in 0..n {
        let diag = r_sq[(k, k)].re;
        if diag <= 1e-10 * max_diag {
            return Err(Error::RankDeficient { column: k, diag });
        }
    }
    Ok((q_thin, r_sq))
}
