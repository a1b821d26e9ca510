//! Norm adapted to a hyperbolic dual map.
//!
//! For the smallest `n >= 1` with `|B^n|_{E-}| < 1` and `|B^{-n}|_{E+}| < 1`
//! (Euclidean operator norms), set
//!
//! ```text
//! |x_-|_* = sum_{k<n} |B^k x_-|,   |x_+|_* = sum_{k<n} |B^{-k} x_+|,
//! |x|_*   = max(|x_-|_*, |x_+|_*)
//! ```
//!
//! Under this norm `B` contracts `E_-` and `B^{-1}` contracts `E_+`.

use num_bigint::BigInt;

use crate::dense::{norm1, norm2, Mat};
use crate::error::{Error, Result};
use crate::lattice::big_to_real;
use crate::scalar::Scalar;
use crate::spectral::HyperbolicSplitting;

/// Largest exponent tried before giving up on contraction.
pub const MAX_EXPONENT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    /// `|m_+|_* >= |m_-|_*`: `|B^k m|_*` grows strictly for `k >= 0`.
    Expanding,
    /// `|m_-|_* > |m_+|_*`: `|B^{-k} m|_*` grows strictly for `k >= 0`.
    Contracting,
}

#[derive(Clone, Debug)]
pub struct AdaptedNorm<T> {
    splitting: HyperbolicSplitting<T>,
    /// Number of terms in each partial sum.
    pub n: usize,
    /// Bound on the operator norm of `B` on `E_-` under `|.|_*`.
    pub theta_minus: T,
    /// Bound on the operator norm of `B^{-1}` on `E_+` under `|.|_*`.
    pub theta_plus_inv: T,
    /// `eta |x|_* <= |x|_1`.
    pub eta: T,
    /// `|x|_1 <= mu |x|_*`.
    pub mu: T,
    // row k maps x to the basis coordinates of B^k Pi_- x (resp. B^{-k} Pi_+ x)
    minus_terms: Vec<Mat<T>>,
    plus_terms: Vec<Mat<T>>,
}

/// Builds the adapted norm for the splitting of `B`.
pub fn build_adapted_norm<T: Scalar>(splitting: &HyperbolicSplitting<T>) -> Result<AdaptedNorm<T>> {
    let stable = splitting.stable_action();
    let unstable = splitting.unstable_inverse_action();
    let mut stable_pows = vec![Mat::identity(stable.rows())];
    let mut unstable_pows = vec![Mat::identity(unstable.rows())];
    let n = loop {
        let k = stable_pows.len();
        if k > MAX_EXPONENT {
            let gap = splitting.spectrum.unit_gap();
            return Err(Error::NotHyperbolic(1.0 + gap.as_f64()));
        }
        let next_s = stable_pows[k - 1].mul(stable);
        let next_u = unstable_pows[k - 1].mul(unstable);
        let done = next_s.op_norm2() < T::one() && next_u.op_norm2() < T::one();
        stable_pows.push(next_s);
        unstable_pows.push(next_u);
        if done {
            break k;
        }
    };

    let theta = |pows: &[Mat<T>]| {
        let alpha: T = pows[1..n].iter().map(|m| m.op_norm2()).sum();
        (alpha + pows[n].op_norm2()) / (alpha + T::one())
    };
    let theta_minus = theta(&stable_pows);
    let theta_plus_inv = theta(&unstable_pows);

    let to_minus = splitting.stable_basis().transpose().mul(&splitting.pi_minus);
    let to_plus = splitting.unstable_basis().transpose().mul(&splitting.pi_plus);
    let minus_terms: Vec<Mat<T>> = stable_pows[..n].iter().map(|m| m.mul(&to_minus)).collect();
    let plus_terms: Vec<Mat<T>> = unstable_pows[..n].iter().map(|m| m.mul(&to_plus)).collect();

    let p = splitting.dim();
    let b = Mat::<T>::from_int(splitting.matrix());
    let b_inv = Mat::<T>::from_int(splitting.inverse());
    let mut biggest = T::one();
    let (mut fwd, mut bwd) = (Mat::identity(p), Mat::identity(p));
    for _ in 1..n {
        fwd = fwd.mul(&b);
        bwd = bwd.mul(&b_inv);
        biggest = biggest.max(fwd.op_norm2()).max(bwd.op_norm2());
    }
    // round-off margin on the computed operator norms
    let margin = T::one() + T::c(1e3) * T::epsilon();
    let proj = (splitting.pi_minus.op_norm2() + splitting.pi_plus.op_norm2()) * margin;
    let eta = T::one() / (T::from_usize_lossy(n) * biggest * margin * proj);
    let mu = T::c(2.0) * T::from_usize_lossy(p).sqrt();

    Ok(AdaptedNorm {
        splitting: splitting.clone(),
        n,
        theta_minus,
        theta_plus_inv,
        eta,
        mu,
        minus_terms,
        plus_terms,
    })
}

impl<T: Scalar> AdaptedNorm<T> {
    pub fn splitting(&self) -> &HyperbolicSplitting<T> {
        &self.splitting
    }

    pub fn dim(&self) -> usize {
        self.splitting.dim()
    }

    /// `|Pi_- x|_*`.
    pub fn norm_minus(&self, x: &[T]) -> T {
        self.minus_terms.iter().map(|m| norm2(&m.mul_vec(x))).fold(T::zero(), |acc, t| acc + t)
    }

    /// `|Pi_+ x|_*`.
    pub fn norm_plus(&self, x: &[T]) -> T {
        self.plus_terms.iter().map(|m| norm2(&m.mul_vec(x))).fold(T::zero(), |acc, t| acc + t)
    }

    pub fn norm_star(&self, x: &[T]) -> T {
        self.norm_minus(x).max(self.norm_plus(x))
    }

    /// Adapted norm of an exact lattice vector.
    pub fn norm_star_big(&self, m: &[BigInt]) -> T {
        self.norm_star(&big_to_real::<T>(m))
    }

    /// Expanding/contracting type of a nonzero vector; ties go to `Expanding`.
    pub fn classify(&self, m: &[T]) -> Result<OrbitKind> {
        if m.iter().all(|v| *v == T::zero()) {
            return Err(Error::ZeroVector);
        }
        Ok(self.classify_split(self.norm_minus(m), self.norm_plus(m)))
    }

    pub fn classify_big(&self, m: &[BigInt]) -> Result<OrbitKind> {
        self.classify(&big_to_real::<T>(m))
    }

    #[inline]
    pub(crate) fn classify_split(&self, minus: T, plus: T) -> OrbitKind {
        if plus >= minus {
            OrbitKind::Expanding
        } else {
            OrbitKind::Contracting
        }
    }

    /// `(eta, mu)` with `eta |x|_* <= |x|_1 <= mu |x|_*` for every `x`.
    pub fn equivalence_constants(&self) -> (T, T) {
        (self.eta, self.mu)
    }

    /// Checks the sandwich inequality at one point.
    pub fn sandwich_holds(&self, x: &[T]) -> bool {
        let star = self.norm_star(x);
        let l1 = norm1(x);
        self.eta * star <= l1 && l1 <= self.mu * star
    }
}

/// Free-function form of [`AdaptedNorm::norm_star`].
pub fn norm_star<T: Scalar>(nm: &AdaptedNorm<T>, x: &[T]) -> T {
    nm.norm_star(x)
}

/// Free-function form of [`AdaptedNorm::classify`].
pub fn classify<T: Scalar>(nm: &AdaptedNorm<T>, m: &[T]) -> Result<OrbitKind> {
    nm.classify(m)
}

/// Free-function form of [`AdaptedNorm::equivalence_constants`].
pub fn equivalence_constants<T: Scalar>(nm: &AdaptedNorm<T>) -> (T, T) {
    nm.equivalence_constants()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{to_big, IntMatrix};
    use crate::spectral::analyze;

    fn cat_norm() -> AdaptedNorm<f64> {
        let b = IntMatrix::from_rows(vec![vec![2, -1], vec![-1, 1]]).unwrap();
        build_adapted_norm(&analyze(&b, 1e-8).unwrap()).unwrap()
    }

    #[test]
    fn cat_norm_parameters() {
        let nm = cat_norm();
        assert_eq!(nm.n, 1);
        let lam = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((nm.theta_minus - lam).abs() < 1e-9);
        assert!((nm.theta_plus_inv - lam).abs() < 1e-9);
        // orthogonal projectors for a symmetric B
        assert!(nm.eta >= 0.5 * (1.0 - 1e-9));
        assert!((nm.mu - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        let nm = cat_norm();
        assert_eq!(nm.norm_star(&[0.0, 0.0]), 0.0);
        assert_eq!(nm.classify(&[0.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn single_term_reduces_to_euclidean() {
        let nm = cat_norm();
        let x = [0.3, -1.7];
        let xm = nm.splitting().project_minus(&x);
        assert!((nm.norm_star(&xm) - norm2(&xm)).abs() < 1e-12);
        let xp = nm.splitting().project_plus(&x);
        assert!((nm.norm_star(&xp) - norm2(&xp)).abs() < 1e-12);
    }

    #[test]
    fn cat_classification() {
        let nm = cat_norm();
        let m = [1.0, 0.0];
        let minus = nm.norm_minus(&m);
        let plus = nm.norm_plus(&m);
        let expect = if plus >= minus { OrbitKind::Expanding } else { OrbitKind::Contracting };
        assert_eq!(nm.classify(&m).unwrap(), expect);
        let one_one = to_big(&[1, 1]);
        assert!(nm.classify_big(&one_one).is_ok());
    }
}
