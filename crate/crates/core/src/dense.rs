//! Small dense real matrices. Dimensions here are the torus dimension, so
//! everything is `O(p^3)` with `p` at most a dozen or so.

use std::ops::{Index, IndexMut};

use crate::lattice::IntMatrix;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        let n = m.dim();
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = T::c(m.get(i, j) as f64);
            }
        }
        out
    }

    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Self {
        let mut out = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                out[(i, j)] = c[i];
            }
        }
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.cols.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat<T>) -> Mat<T> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Mat<T>) -> Mat<T> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    fn zip_with(&self, other: &Mat<T>, f: impl Fn(T, T) -> T) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Matrix power for `k >= 0`.
    pub fn pow(&self, k: usize) -> Mat<T> {
        let mut out = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        out
    }

    /// Spectral norm (largest singular value).
    pub fn op_norm2(&self) -> T {
        if self.rows == 0 || self.cols == 0 {
            return T::zero();
        }
        let gram = self.transpose().mul(self);
        let top = symmetric_eigenvalues(&gram).into_iter().fold(T::zero(), T::max);
        top.max(T::zero()).sqrt()
    }

    /// Solves `self x = rhs` by Gaussian elimination with partial pivoting.
    /// Returns `None` for a numerically singular system.
    pub fn solve(&self, rhs: &[T]) -> Option<Vec<T>> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        let mut a = self.clone();
        let mut b = rhs.to_vec();
        let scale = a.max_abs();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| a[(i, k)].abs().partial_cmp(&a[(j, k)].abs()).unwrap())?;
            if a[(piv, k)].abs() <= scale * T::epsilon() {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    a.data.swap(k * n + j, piv * n + j);
                }
                b.swap(k, piv);
            }
            for i in k + 1..n {
                let f = a[(i, k)] / a[(k, k)];
                if f == T::zero() {
                    continue;
                }
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
                let bk = b[k];
                b[i] -= f * bk;
            }
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let s: T = (i + 1..n).map(|j| a[(i, j)] * x[j]).sum();
            x[i] = (b[i] - s) / a[(i, i)];
        }
        Some(x)
    }

    /// Orthonormal basis for the column space, extracting `rank` columns by
    /// Gram-Schmidt with column pivoting. Also returns the norm of the largest
    /// residual left after the last extracted column, which is zero up to
    /// round-off when the true rank is `rank`.
    pub fn orthonormal_range(&self, rank: usize) -> (Mat<T>, T) {
        let n = self.rows;
        let mut cols: Vec<Vec<T>> = (0..self.cols).map(|j| self.column(j)).collect();
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(rank);
        for _ in 0..rank {
            let (best, norm) = cols
                .iter()
                .enumerate()
                .map(|(j, c)| (j, norm2(c)))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .expect("at least one column");
            let q: Vec<T> = cols[best].iter().map(|&v| v / norm).collect();
            for c in cols.iter_mut() {
                // twice is enough
                for _ in 0..2 {
                    let d = dot(&q, c);
                    for (ci, &qi) in c.iter_mut().zip(&q) {
                        *ci -= d * qi;
                    }
                }
            }
            basis.push(q);
        }
        let residual = cols.iter().map(|c| norm2(c)).fold(T::zero(), T::max);
        (Mat::from_columns(n, &basis), residual)
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc.hypot(x))
}

pub fn norm1<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |acc, x| acc + x.abs())
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues<T: Scalar>(m: &Mat<T>) -> Vec<T> {
    let n = m.rows();
    let mut a = m.clone();
    let tol = T::epsilon() * T::c(0.5);
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let v = a[(i, j)] * a[(i, j)];
                total += v;
                if i != j {
                    off += v;
                }
            }
        }
        if off <= tol * tol * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (T::c(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_eigenvalues() {
        let mut m = Mat::<f64>::zeros(2, 2);
        m[(0, 0)] = 2.0;
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        m[(1, 1)] = 2.0;
        let mut ev = symmetric_eigenvalues(&m);
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_of_rank_one() {
        // u v^T has norm |u| |v|
        let m = Mat::from_columns(2, &[vec![3.0f64, 4.0], vec![6.0, 8.0]]);
        assert!((m.op_norm2() - 5.0 * 5.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn solve_small_system() {
        let a = Mat::from_columns(2, &[vec![0.0f64, 1.0], vec![2.0, 1.0]]);
        let x = a.solve(&[4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
        let singular = Mat::from_columns(2, &[vec![1.0f64, 2.0], vec![2.0, 4.0]]);
        assert!(singular.solve(&[1.0, 1.0]).is_none());
    }

    #[test]
    fn range_basis_is_orthonormal() {
        let a = Mat::from_columns(3, &[vec![1.0f64, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]]);
        let (q, resid) = a.orthonormal_range(2);
        let g = q.transpose().mul(&q);
        assert!(g.sub(&Mat::identity(2)).max_abs() < 1e-14);
        assert!(resid < 1e-14);
    }

    #[test]
    fn matrix_power() {
        let a = Mat::<f64>::from_int(&IntMatrix::from_rows(vec![vec![1, 1], vec![1, 0]]).unwrap());
        let f = a.pow(10);
        assert_eq!(f[(0, 1)], 55.0);
    }
}
