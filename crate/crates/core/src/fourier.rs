//! Sparse Fourier series on the torus `T^p = R^p / Z^p`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{rat_dot_big, to_big, to_small, unit_phase, AffineTorusMap};
use crate::scalar::Scalar;

/// Frequency vector `m` in `Z^p`.
pub type Freq = Vec<i64>;

/// Amplitudes with modulus below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Finite sum `sum_m c_m Theta_m` with `Theta_m(x) = exp(2 pi i <x, m>)`.
///
/// Terms are kept in lexicographic frequency order and zero amplitudes are
/// never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries<T> {
    p: usize,
    coeffs: BTreeMap<Freq, Complex<T>>,
}

impl<T: Scalar> FourierSeries<T> {
    pub fn zero(p: usize) -> Self {
        FourierSeries { p, coeffs: BTreeMap::new() }
    }

    /// `amplitude * Theta_m`.
    pub fn basis_mode(p: usize, m: Freq, amplitude: Complex<T>) -> Result<Self> {
        let mut s = Self::zero(p);
        s.add_term(m, amplitude)?;
        Ok(s)
    }

    pub fn from_terms(p: usize, terms: impl IntoIterator<Item = (Freq, Complex<T>)>) -> Result<Self> {
        let mut s = Self::zero(p);
        for (m, c) in terms {
            s.add_term(m, c)?;
        }
        Ok(s)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at `m` (zero when absent).
    pub fn coeff(&self, m: &[i64]) -> Complex<T> {
        self.coeffs.get(m).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Freq, &Complex<T>)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Freq> {
        self.coeffs.keys()
    }

    /// Adds `amplitude` at `m`, pruning the entry if the sum vanishes.
    pub fn add_term(&mut self, m: Freq, amplitude: Complex<T>) -> Result<()> {
        if m.len() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: m.len() });
        }
        let entry = self.coeffs.entry(m);
        let threshold = T::c(PRUNE_THRESHOLD);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + amplitude;
                if v.norm() < threshold {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if amplitude.norm() >= threshold {
                    v.insert(amplitude);
                }
            }
        }
        Ok(())
    }

    pub fn scale(&self, a: Complex<T>) -> Self {
        let mut out = Self::zero(self.p);
        for (m, c) in &self.coeffs {
            out.add_term(m.clone(), *c * a).expect("same dimension");
        }
        out
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: other.p });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(m.clone(), *c)?;
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            out.add_term(m.clone(), -*c)?;
        }
        Ok(out)
    }

    /// Pointwise product, i.e. convolution of the coefficient families.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = Self::zero(self.p);
        for (m1, c1) in &self.coeffs {
            for (m2, c2) in &other.coeffs {
                let m: Freq = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                out.add_term(m, *c1 * *c2)?;
            }
        }
        Ok(out)
    }

    /// `h o gamma^k`. The coefficient at `m` is
    /// `exp(2 pi i <b_k, B^k m>) h(B^k m)`, so each stored frequency `alpha`
    /// moves to `B^{-k} alpha` with phase `exp(2 pi i <b_k, alpha>)`.
    pub fn pullback(&self, map: &AffineTorusMap, k: i64) -> Result<Self> {
        if map.dim() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: map.dim() });
        }
        if k == 0 {
            return Ok(self.clone());
        }
        let dual = map.dual();
        let b_k = map.translation_term(k);
        let mut out = Self::zero(self.p);
        for (alpha, c) in &self.coeffs {
            let alpha_big = to_big(alpha);
            let m = dual.apply_power(-k, &alpha_big);
            let m = to_small(&m).ok_or(Error::Overflow("pullback frequency"))?;
            let phase = unit_phase::<T>(&rat_dot_big(&b_k, &alpha_big));
            out.add_term(m, *c * phase)?;
        }
        Ok(out)
    }

    /// `delta(h) = h - h o gamma`.
    pub fn coboundary(&self, map: &AffineTorusMap) -> Result<Self> {
        self.try_sub(&self.pullback(map, 1)?)
    }

    /// `|c_0| + sum_{m != 0} |m|_1^r |c_m|`.
    pub fn seminorm_1r(&self, r: u32) -> T {
        self.coeffs
            .iter()
            .map(|(m, c)| {
                let l1: i64 = m.iter().map(|v| v.abs()).sum();
                if l1 == 0 {
                    c.norm()
                } else {
                    T::c(l1 as f64).powi(r as i32) * c.norm()
                }
            })
            .fold(T::zero(), |acc, t| acc + t)
    }

    pub fn evaluate(&self, x: &[T]) -> Result<Complex<T>> {
        if x.len() != self.p {
            return Err(Error::DimensionMismatch { expected: self.p, found: x.len() });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (m, c) in &self.coeffs {
            let t: T = m.iter().zip(x).map(|(&mi, &xi)| T::c(mi as f64) * xi).sum();
            let t = t - t.floor();
            acc += *c * Complex::from_polar(T::one(), T::TAU() * t);
        }
        Ok(acc)
    }

    /// Mean value `c_0`.
    pub fn mean(&self) -> Complex<T> {
        self.coeff(&vec![0; self.p])
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (m, c) in &self.coeffs {
            worst = worst.max((*c - other.coeff(m)).norm());
        }
        for (m, c) in &other.coeffs {
            if !self.coeffs.contains_key(m) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    /// Hermitian symmetry `c_{-m} = conj(c_m)`, i.e. the function is real valued.
    pub fn is_real_valued(&self, tol: T) -> bool {
        self.coeffs.iter().all(|(m, c)| {
            let neg: Freq = m.iter().map(|v| -v).collect();
            (self.coeff(&neg) - c.conj()).norm() <= tol
        })
    }

    pub fn max_frequency_l1(&self) -> i64 {
        self.coeffs.keys().map(|m| m.iter().map(|v| v.abs()).sum()).max().unwrap_or(0)
    }

    pub(crate) fn lookup_big(&self, m: &[BigInt]) -> Option<Complex<T>> {
        let small = to_small(m)?;
        self.coeffs.get(&small).copied()
    }
}

impl<T: Scalar> Add for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn add(self, rhs: Self) -> FourierSeries<T> {
        self.try_add(rhs).expect("dimension mismatch in series addition")
    }
}

impl<T: Scalar> Sub for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn sub(self, rhs: Self) -> FourierSeries<T> {
        self.try_sub(rhs).expect("dimension mismatch in series subtraction")
    }
}

impl<T: Scalar> Mul for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn mul(self, rhs: Self) -> FourierSeries<T> {
        self.try_mul(rhs).expect("dimension mismatch in series product")
    }
}

impl<T: Scalar> Neg for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn neg(self) -> FourierSeries<T> {
        self.scale(Complex::new(-T::one(), T::zero()))
    }
}

/// Free-function form of [`FourierSeries::basis_mode`].
pub fn basis_mode<T: Scalar>(p: usize, m: Freq, amplitude: Complex<T>) -> Result<FourierSeries<T>> {
    FourierSeries::basis_mode(p, m, amplitude)
}

/// Free-function form of [`FourierSeries::pullback`].
pub fn pullback<T: Scalar>(h: &FourierSeries<T>, map: &AffineTorusMap, k: i64) -> Result<FourierSeries<T>> {
    h.pullback(map, k)
}

/// Free-function form of [`FourierSeries::coboundary`].
pub fn coboundary<T: Scalar>(h: &FourierSeries<T>, map: &AffineTorusMap) -> Result<FourierSeries<T>> {
    h.coboundary(map)
}

/// Trigonometric polynomial recovered from grid samples, with the `|.|_{1,0}`
/// mass of the discrete modes that were discarded.
#[derive(Clone, Debug)]
pub struct SampledSeries<T> {
    pub series: FourierSeries<T>,
    pub tail: T,
}

/// Discrete Fourier ingestion of samples on the uniform grid `{i/n}^p`.
///
/// `samples` is row-major with the first coordinate slowest. Modes with
/// `|m|_1 <= radius` are kept; the result approximates the true Fourier
/// coefficients up to aliasing.
pub fn from_samples<T: Scalar + FftNum>(p: usize, n: usize, samples: &[Complex<T>], radius: i64) -> Result<SampledSeries<T>> {
    let total = n.checked_pow(p as u32).ok_or(Error::Overflow("sample grid size"))?;
    if samples.len() != total || n == 0 {
        return Err(Error::DimensionMismatch { expected: total, found: samples.len() });
    }
    let mut data = samples.to_vec();
    let fft = FftPlanner::<T>::new().plan_fft_forward(n);
    let mut line = vec![Complex::new(T::zero(), T::zero()); n];
    for axis in 0..p {
        let stride = n.pow((p - 1 - axis) as u32);
        for start in 0..total {
            if !(start / stride).is_multiple_of(n) {
                continue;
            }
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[start + j * stride];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                data[start + j * stride] = *v;
            }
        }
    }
    let norm = T::from_usize_lossy(total);
    let mut series = FourierSeries::zero(p);
    let mut tail = T::zero();
    for (idx, v) in data.iter().enumerate() {
        let mut m = vec![0i64; p];
        let mut rest = idx;
        for axis in (0..p).rev() {
            let j = (rest % n) as i64;
            rest /= n;
            m[axis] = if 2 * j > n as i64 { j - n as i64 } else { j };
        }
        let c = *v / norm;
        if m.iter().map(|x| x.abs()).sum::<i64>() <= radius {
            series.add_term(m, c)?;
        } else {
            tail += c.norm();
        }
    }
    Ok(SampledSeries { series, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{parse_rational, IntMatrix};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn cat_half() -> AffineTorusMap {
        let a = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 2]]).unwrap();
        AffineTorusMap::new(a, vec![parse_rational("1/2").unwrap(), parse_rational("0").unwrap()]).unwrap()
    }

    #[test]
    fn basis_modes() {
        let one = basis_mode(2, vec![0, 0], c(1.0, 0.0)).unwrap();
        assert!((one.evaluate(&[0.3, 0.9]).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let t = basis_mode(2, vec![1, 0], c(1.0, 0.0)).unwrap();
        assert!((t.evaluate(&[0.25, 0.7]).unwrap() - c(0.0, 1.0)).norm() < 1e-15);
        assert!((t.evaluate(&[0.5, 0.1]).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(basis_mode(2, vec![3, 4], c(0.0, 0.0)).unwrap().is_empty());
        assert!(basis_mode(2, vec![1, 2, 3], c(1.0, 0.0)).is_err());
    }

    #[test]
    fn cat_pullback_by_hand() {
        let map = cat_half();
        let h = basis_mode(2, vec![1, 0], c(1.0, 0.0)).unwrap();
        let expected = basis_mode(2, vec![1, 1], c(-1.0, 0.0)).unwrap();
        assert!(h.pullback(&map, 1).unwrap().max_coeff_diff(&expected) < 1e-15);
        assert_eq!(h.pullback(&map, 0).unwrap(), h);
    }

    #[test]
    fn cat_coboundary_by_hand() {
        let map = cat_half();
        let h = basis_mode(2, vec![1, 1], c(1.0, 0.0)).unwrap();
        let g = h.coboundary(&map).unwrap();
        let expected = FourierSeries::from_terms(2, [(vec![1, 1], c(1.0, 0.0)), (vec![2, 3], c(1.0, 0.0))]).unwrap();
        assert!(g.max_coeff_diff(&expected) < 1e-15);
        let constant = basis_mode(2, vec![0, 0], c(2.5, 1.0)).unwrap();
        assert!(constant.coboundary(&map).unwrap().is_empty());
    }

    #[test]
    fn seminorms() {
        let empty = FourierSeries::<f64>::zero(2);
        assert_eq!(empty.seminorm_1r(5), 0.0);
        let h = basis_mode(2, vec![1, 1], c(2.0, 0.0)).unwrap();
        assert!((h.seminorm_1r(3) - 16.0).abs() < 1e-12);
        let mixed = FourierSeries::from_terms(2, [(vec![0, 0], c(3.0, 4.0)), (vec![2, -1], c(0.0, 1.0))]).unwrap();
        assert!((mixed.seminorm_1r(0) - 6.0).abs() < 1e-12);
        assert!((mixed.seminorm_1r(2) - 14.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let map = cat_half();
        let h = basis_mode(3, vec![1, 0, 0], c(1.0, 0.0)).unwrap();
        assert!(matches!(h.pullback(&map, 1), Err(Error::DimensionMismatch { .. })));
        assert!(h.evaluate(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn real_valued_flag_survives_coboundary() {
        let map = cat_half();
        let h = FourierSeries::from_terms(2, [(vec![1, 2], c(0.5, 0.25)), (vec![-1, -2], c(0.5, -0.25))]).unwrap();
        assert!(h.is_real_valued(1e-15));
        assert!(h.pullback(&map, 1).unwrap().is_real_valued(1e-14));
        assert!(h.coboundary(&map).unwrap().is_real_valued(1e-14));
    }

    #[test]
    fn grid_ingestion_recovers_trig_polynomial() {
        let h = FourierSeries::from_terms(2, [(vec![1, -2], c(0.5, 0.25)), (vec![0, 3], c(-1.0, 0.0))]).unwrap();
        let n = 16;
        let mut samples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                samples.push(h.evaluate(&[i as f64 / n as f64, j as f64 / n as f64]).unwrap());
            }
        }
        let got = from_samples(2, n, &samples, 4).unwrap();
        assert!(got.series.max_coeff_diff(&h) < 1e-12);
        assert!(got.tail < 1e-12);
        // both modes have |m|_1 = 3
        let truncated = from_samples(2, n, &samples, 2).unwrap();
        assert!(truncated.series.is_empty());
        assert!((truncated.tail - (1.0 + c(0.5, 0.25).norm())).abs() < 1e-12);
    }
}
