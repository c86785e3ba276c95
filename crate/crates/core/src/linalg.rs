//! Small dense matrices, generic over [`Scalar`], with exact elimination
//! routines for the rational specialization.
//!
//! Everything here targets the modest sizes this crate needs (stencil moment
//! systems and Butcher tableaux, at most a few hundred rows); no pivoting for
//! magnitude is done since the exact routines cannot lose precision.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::Error;
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Build from nested rows; every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, Error> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    got: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Matrix-vector product.
    pub fn mat_vec(&self, v: &[T]) -> Result<Vec<T>, Error> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(T::zero(), |acc, (a, x)| acc + a.clone() * x.clone())
            })
            .collect())
    }

    /// Matrix product `self * other`. Zero entries are skipped, which matters
    /// for the mostly-zero nilpotent powers the tableau checks compute.
    pub fn mat_mul(&self, other: &Self) -> Result<Self, Error> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, cur + a.clone() * b.clone());
                }
            }
        }
        Ok(out)
    }

    /// Row sums, one per row.
    pub fn row_sums(&self) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .fold(T::zero(), |acc, x| acc + x.clone())
            })
            .collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// Exact operations, only meaningful over the rationals.
impl Matrix<BigRational> {
    /// Rank by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        let mut pivot_row = 0;
        for col in 0..m.cols {
            let Some(src) = (pivot_row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(pivot_row, src);
            let pivot = m.get(pivot_row, col).clone();
            for r in pivot_row + 1..m.rows {
                if m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone() / pivot.clone();
                for c in col..m.cols {
                    let val = m.get(r, c).clone() - factor.clone() * m.get(pivot_row, c).clone();
                    m.set(r, c, val);
                }
            }
            rank += 1;
            pivot_row += 1;
            if pivot_row == m.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

/// Solve the square system `a x = rhs` by exact Gauss-Jordan elimination.
/// Returns `None` when the matrix is singular.
pub fn solve_exact(a: &Matrix<BigRational>, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "solve_exact requires a square matrix");
    assert_eq!(n, rhs.len(), "right-hand side length must match");

    let mut m = a.clone();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let src = (col..n).find(|&r| !m.get(r, col).is_zero())?;
        m.swap_rows(col, src);
        b.swap(col, src);
        let pivot = m.get(col, col).clone();
        for c in col..n {
            let val = m.get(col, c).clone() / pivot.clone();
            m.set(col, c, val);
        }
        b[col] = b[col].clone() / pivot;
        for r in 0..n {
            if r == col || m.get(r, col).is_zero() {
                continue;
            }
            let factor = m.get(r, col).clone();
            for c in col..n {
                let val = m.get(r, c).clone() - factor.clone() * m.get(col, c).clone();
                m.set(r, c, val);
            }
            b[r] = b[r].clone() - factor * b[col].clone();
        }
    }
    Some(b)
}
