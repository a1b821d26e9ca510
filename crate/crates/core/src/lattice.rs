//! Exact integer linear algebra on the lattice `Z^p`.
//!
//! Everything here is exact: matrices carry `i64` entries, determinants and
//! orbit iterates are computed with big integers, and translation terms of the
//! affine map are big rationals.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exact integer lattice vector of arbitrary size.
pub type BigVec = Vec<BigInt>;
/// Exact rational vector.
pub type RatVec = Vec<BigRational>;

/// Square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare { rows: dim, cols: row.len() });
            }
            entries.extend(row);
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1;
        }
        IntMatrix { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        IntMatrix { dim: n, entries }
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let n = self.dim;
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: i64 = 0;
                for k in 0..n {
                    let t = self.get(i, k)
                        .checked_mul(other.get(k, j))
                        .ok_or(Error::Overflow("matrix product"))?;
                    acc = acc.checked_add(t).ok_or(Error::Overflow("matrix product"))?;
                }
                entries[i * n + j] = acc;
            }
        }
        Ok(IntMatrix { dim: n, entries })
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix::identity(self.dim)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        let big: Vec<BigInt> = self.entries.iter().map(|&v| BigInt::from(v)).collect();
        bareiss_det(big, self.dim)
    }

    /// Exact determinant together with the `|det| = 1` verdict.
    pub fn det_unimodular(&self) -> (BigInt, bool) {
        let det = self.determinant();
        let unimodular = det.abs().is_one();
        (det, unimodular)
    }

    /// Exact inverse of a unimodular matrix, via the adjugate.
    pub fn inverse_unimodular(&self) -> Result<IntMatrix> {
        let (det, unimodular) = self.det_unimodular();
        if !unimodular {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        let n = self.dim;
        if n == 1 {
            return Ok(IntMatrix { dim: 1, entries: vec![self.entries[0]] });
        }
        let mut entries = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                // inverse[j][i] = (-1)^(i+j) minor(i, j) / det
                let mut minor = Vec::with_capacity((n - 1) * (n - 1));
                for r in (0..n).filter(|&r| r != i) {
                    for c in (0..n).filter(|&c| c != j) {
                        minor.push(BigInt::from(self.get(r, c)));
                    }
                }
                let mut cof = bareiss_det(minor, n - 1);
                if (i + j) % 2 == 1 {
                    cof = -cof;
                }
                let v = cof * &det; // det = +-1, so dividing equals multiplying
                entries[j * n + i] = v.to_i64().ok_or(Error::Overflow("matrix inverse"))?;
            }
        }
        Ok(IntMatrix { dim: n, entries })
    }

    /// `M v` on exact big-integer vectors.
    pub fn mul_big(&self, v: &[BigInt]) -> BigVec {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if a != 0 {
                        acc += vj * a;
                    }
                }
                acc
            })
            .collect()
    }

    /// `M v` on exact rational vectors.
    pub fn mul_rat(&self, v: &[BigRational]) -> RatVec {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                let mut acc = BigRational::zero();
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if a != 0 {
                        acc += vj * BigRational::from_integer(BigInt::from(a));
                    }
                }
                acc
            })
            .collect()
    }

    /// `M x` in floating point.
    pub fn mul_real<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        (0..self.dim)
            .map(|i| {
                let mut acc = T::zero();
                for (j, &xj) in x.iter().enumerate() {
                    acc += T::c(self.get(i, j) as f64) * xj;
                }
                acc
            })
            .collect()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

fn bareiss_det(mut a: Vec<BigInt>, n: usize) -> BigInt {
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(r) => {
                    for c in 0..n {
                        a.swap(k * n + c, r * n + c);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    sign * &a[n * n - 1]
}

/// Free-function form of [`IntMatrix::det_unimodular`].
pub fn det_unimodular(m: &IntMatrix) -> (BigInt, bool) {
    m.det_unimodular()
}

/// Parses a rational from `"num/den"`, an integer, or a decimal such as
/// `"-0.125"` or `"2.5e-3"` (read as an exact fraction with a power-of-ten
/// denominator).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("cannot parse rational {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Ok(r)
}

/// Representative of `r mod 1` in `[0, 1)`.
pub fn frac_mod_one(r: &BigRational) -> BigRational {
    r - r.floor()
}

/// `exp(2 pi i r)` computed from the exact residue of `r` modulo one.
///
/// Residues that are multiples of 1/4 map to exact unit values.
pub fn unit_phase<T: Scalar>(r: &BigRational) -> Complex<T> {
    let f = frac_mod_one(r);
    let four = BigRational::from_integer(BigInt::from(4));
    let quarter = &f * &four;
    if quarter.is_integer() {
        return match quarter.to_integer().to_i64().unwrap_or(0) {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    // map to (-1/2, 1/2] so the angle stays small
    let mut x = f.to_f64().unwrap_or(0.0);
    if x > 0.5 {
        x -= 1.0;
    }
    let theta = T::c(x) * T::TAU();
    Complex::new(theta.cos(), theta.sin())
}

/// Exact inner product of a rational and an integer vector.
pub fn rat_dot_big(a: &[BigRational], m: &[BigInt]) -> BigRational {
    a.iter()
        .zip(m)
        .filter(|(_, mi)| !mi.is_zero())
        .fold(BigRational::zero(), |acc, (ai, mi)| acc + ai * BigRational::from_integer(mi.clone()))
}

/// Narrows a big lattice vector to `i64` coordinates when they fit.
pub fn to_small(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

pub fn to_big(v: &[i64]) -> BigVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn big_to_real<T: Scalar>(v: &[BigInt]) -> Vec<T> {
    v.iter().map(|x| T::c(x.to_f64().unwrap_or(f64::INFINITY))).collect()
}

/// The affine map `x -> A x + b` on the torus, `A` in `GL(p, Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineTorusMap {
    a: IntMatrix,
    a_inv: IntMatrix,
    b: RatVec,
}

impl AffineTorusMap {
    pub fn new(a: IntMatrix, b: RatVec) -> Result<Self> {
        if b.len() != a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: b.len() });
        }
        let a_inv = a.inverse_unimodular()?;
        Ok(AffineTorusMap { a, a_inv, b })
    }

    /// Linear automorphism, `b = 0`.
    pub fn linear(a: IntMatrix) -> Result<Self> {
        let p = a.dim();
        Self::new(a, vec![BigRational::zero(); p])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.a
    }

    pub fn inverse_matrix(&self) -> &IntMatrix {
        &self.a_inv
    }

    pub fn translation(&self) -> &[BigRational] {
        &self.b
    }

    /// `b_k = gamma^k(0)`.
    pub fn translation_term(&self, k: i64) -> RatVec {
        let mut t = vec![BigRational::zero(); self.dim()];
        if k >= 0 {
            for _ in 0..k {
                t = self.step_forward(&t);
            }
        } else {
            for _ in 0..(-k) {
                t = self.step_backward(&t);
            }
        }
        t
    }

    /// `gamma(x) = A x + b` on exact rational points of `R^p`.
    pub fn step_forward(&self, x: &[BigRational]) -> RatVec {
        self.a.mul_rat(x).into_iter().zip(&self.b).map(|(ax, bi)| ax + bi).collect()
    }

    /// `gamma^{-1}(x) = A^{-1} (x - b)`.
    pub fn step_backward(&self, x: &[BigRational]) -> RatVec {
        let shifted: RatVec = x.iter().zip(&self.b).map(|(xi, bi)| xi - bi).collect();
        self.a_inv.mul_rat(&shifted)
    }

    /// `gamma^k(x)` on `R^p` in floating point, not reduced modulo one.
    pub fn apply_real<T: Scalar>(&self, x: &[T], k: i64) -> Vec<T> {
        let b: Vec<T> = self.b.iter().map(|r| T::c(r.to_f64().unwrap_or(0.0))).collect();
        let mut y = x.to_vec();
        if k >= 0 {
            for _ in 0..k {
                y = self.a.mul_real(&y).into_iter().zip(&b).map(|(v, &bi)| v + bi).collect();
            }
        } else {
            for _ in 0..(-k) {
                let shifted: Vec<T> = y.iter().zip(&b).map(|(&v, &bi)| v - bi).collect();
                y = self.a_inv.mul_real(&shifted);
            }
        }
        y
    }

    /// `gamma^k(x) mod 1`, coordinates in `[0, 1)`.
    pub fn apply_torus<T: Scalar>(&self, x: &[T], k: i64) -> Vec<T> {
        self.apply_real(x, k).into_iter().map(|v| v - v.floor()).collect()
    }

    /// Dual map `B = (A^{-1})^T`.
    pub fn dual(&self) -> DualMap {
        DualMap { matrix: self.a_inv.transpose(), inverse: self.a.transpose() }
    }
}

/// Frequency transport `B = (A^{-1})^T` with its exact inverse `A^T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualMap {
    matrix: IntMatrix,
    inverse: IntMatrix,
}

impl DualMap {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &IntMatrix {
        &self.inverse
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Exact `B^k m` for any integer `k`.
    pub fn apply_power(&self, k: i64, m: &[BigInt]) -> BigVec {
        let step = if k >= 0 { &self.matrix } else { &self.inverse };
        let mut v = m.to_vec();
        for _ in 0..k.unsigned_abs() {
            v = step.mul_big(&v);
        }
        v
    }

    /// Same map with the roles of `B` and `B^{-1}` exchanged.
    pub fn inverted(&self) -> DualMap {
        DualMap { matrix: self.inverse.clone(), inverse: self.matrix.clone() }
    }
}

/// Free-function form of [`AffineTorusMap::dual`]; fails if `A` is not unimodular.
pub fn dual_matrix(map: &AffineTorusMap) -> DualMap {
    map.dual()
}

/// Free-function form of [`DualMap::apply_power`].
pub fn apply_power(b: &DualMap, k: i64, m: &[BigInt]) -> BigVec {
    b.apply_power(k, m)
}

/// Greatest common divisor of the entries of a lattice vector.
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}
