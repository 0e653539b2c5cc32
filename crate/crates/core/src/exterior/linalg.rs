//! Small dense matrices of jets.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Pivots smaller than this (relative to the largest entry) count as zero.
const SINGULAR_TOL: f64 = 1e-14;

/// Square row-major matrix of [`Jet`]s.
#[derive(Clone, Debug, PartialEq)]
pub struct JetMatrix {
    n: usize,
    data: Vec<Jet>,
}

impl JetMatrix {
    pub fn zeros(n: usize) -> Self {
        JetMatrix { n, data: vec![Jet::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = JetMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Jet::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Jet>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(JetMatrix { n, data })
    }

    pub fn from_f64(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: values.len() });
        }
        Ok(JetMatrix { n, data: values.iter().map(|&v| Jet::constant(v)).collect() })
    }

    pub fn diagonal(values: &[Jet]) -> Self {
        let mut m = JetMatrix::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        let mut t = JetMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.abs_val()))
    }

    pub fn values(&self) -> Vec<f64> {
        self.data.iter().map(|c| c.val).collect()
    }

    /// Submatrix on the given rows and columns.
    pub fn minor_matrix(&self, rows: &[usize], cols: &[usize]) -> JetMatrix {
        debug_assert_eq!(rows.len(), cols.len());
        let k = rows.len();
        let mut m = JetMatrix::zeros(k);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with partial pivoting on values.
    pub fn det(&self) -> Jet {
        let n = self.n;
        match n {
            0 => return Jet::ONE,
            1 => return self.data[0],
            2 => return self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)],
            _ => {}
        }
        let mut a = self.clone();
        let mut det = Jet::ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs_val().total_cmp(&a[(j, col)].abs_val()))
                .expect("non-empty range");
            if a[(pivot, col)].val == 0.0 {
                return Jet::ZERO;
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)];
            det *= p;
            for row in col + 1..n {
                let factor = a[(row, col)] / p;
                if factor.is_zero() {
                    continue;
                }
                for k in col..n {
                    let v = a[(col, k)];
                    a[(row, k)] -= factor * v;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<JetMatrix> {
        let n = self.n;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut a = self.clone();
        let mut inv = JetMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs_val().total_cmp(&a[(j, col)].abs_val()))
                .ok_or(Error::SingularMatrix)?;
            if a[(pivot, col)].abs_val() <= SINGULAR_TOL * scale {
                return Err(Error::SingularMatrix);
            }
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)];
            for k in 0..n {
                a[(col, k)] = a[(col, k)] / p;
                inv[(col, k)] = inv[(col, k)] / p;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = a[(row, col)];
                if factor.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let (ak, ik) = (a[(col, k)], inv[(col, k)]);
                    a[(row, k)] -= factor * ak;
                    inv[(row, k)] -= factor * ik;
                }
            }
        }
        Ok(inv)
    }

    /// Values of the leading principal minors.
    pub fn leading_minors(&self) -> Vec<f64> {
        (1..=self.n)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.minor_matrix(&idx, &idx).det().val
            })
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.n {
            self.data.swap(i * self.n + k, j * self.n + k);
        }
    }
}

impl Index<(usize, usize)> for JetMatrix {
    type Output = Jet;
    fn index(&self, (i, j): (usize, usize)) -> &Jet {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for JetMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Jet {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &JetMatrix {
    type Output = JetMatrix;
    fn mul(self, rhs: &JetMatrix) -> JetMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = JetMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}
