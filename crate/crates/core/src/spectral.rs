//! Characteristic polynomials, complex spectra, and the stable/unstable
//! splitting `C^p = E_- (+) E_+` of a hyperbolic integer matrix.
//!
//! The splitting is built from the real factorisation `chi = p_s * p_u` of the
//! characteristic polynomial into its stable and unstable parts. Solving the
//! Bezout identity `u p_s + v p_u = 1` gives the projectors
//! `Pi_+ = u(B) p_s(B)` and `Pi_- = v(B) p_u(B)`, both polynomials in `B`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::lattice::{DualMap, IntMatrix};
use crate::scalar::Scalar;

/// Default distance from the unit circle below which an eigenvalue counts as
/// non-hyperbolic.
pub const DEFAULT_BAND: f64 = 1e-8;
/// Default root residual tolerance.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
const ABERTH_MAX_ITER: usize = 2000;

/// Integer polynomial, coefficients in ascending degree order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Trailing zero coefficients are dropped.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPolynomial { coeffs };
        while p.coeffs.len() > 1 && p.coeffs.last().is_some_and(|c| c.is_zero()) {
            p.coeffs.pop();
        }
        if p.coeffs.is_empty() {
            p.coeffs.push(BigInt::zero());
        }
        p
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty")
    }

    pub fn constant(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn neg(&self) -> Self {
        IntPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn mul(&self, other: &IntPolynomial) -> Self {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Sign-normalised monic form; fails unless the leading coefficient is +-1.
    pub fn monic(&self) -> Result<IntPolynomial> {
        let lead = self.leading();
        if lead.is_one() {
            Ok(self.clone())
        } else if (-lead).is_one() {
            Ok(self.neg())
        } else {
            Err(Error::Invalid(format!("leading coefficient {lead} is not +-1")))
        }
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn to_complex<T: Scalar>(&self) -> Vec<Complex<T>> {
        self.coeffs
            .iter()
            .map(|c| Complex::new(T::c(c.to_f64().unwrap_or(f64::NAN)), T::zero()))
            .collect()
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(first && d == 0) {
                continue;
            }
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let show_mag = !mag.is_one() || d == 0;
            match (show_mag, d) {
                (true, 0) => write!(f, "{mag}")?,
                (true, 1) => write!(f, "{mag}X")?,
                (true, _) => write!(f, "{mag}X^{d}")?,
                (false, 1) => write!(f, "X")?,
                (false, _) => write!(f, "X^{d}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// `det(M - X I)` with exact integer coefficients (Faddeev-LeVerrier).
pub fn char_poly(m: &IntMatrix) -> IntPolynomial {
    let n = m.dim();
    let a: Vec<BigInt> = (0..n * n).map(|idx| BigInt::from(m.get(idx / n, idx % n))).collect();
    let matmul = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                if x[i * n + k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += &x[i * n + k] * &y[k * n + j];
                }
            }
        }
        out
    };
    // monic c[n] X^n + ... + c[0] = det(X I - M)
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut mk = vec![BigInt::zero(); n * n];
    for k in 1..=n {
        let mut next = matmul(&a, &mk);
        for i in 0..n {
            next[i * n + i] += &c[n - k + 1];
        }
        mk = next;
        let am = matmul(&a, &mk);
        let tr: BigInt = (0..n).map(|i| am[i * n + i].clone()).sum();
        c[n - k] = -tr / BigInt::from(k as u64);
    }
    let poly = IntPolynomial::new(c);
    if n % 2 == 1 {
        poly.neg()
    } else {
        poly
    }
}

/// Companion matrix: ones on the subdiagonal and last column `-(c_0, ..., c_{p-1})`
/// for the monic normalisation `X^p + c_{p-1} X^{p-1} + ... + c_0`.
pub fn companion_matrix(poly: &IntPolynomial) -> Result<IntMatrix> {
    let monic = poly.monic()?;
    if !monic.constant().abs().is_one() {
        return Err(Error::NotUnimodularPolynomial(monic.constant().to_string()));
    }
    let n = monic.degree();
    let mut rows = vec![vec![0i64; n]; n];
    for i in 1..n {
        rows[i][i - 1] = 1;
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let c = -&monic.coeffs()[i];
        row[n - 1] = c.to_i64().ok_or(Error::Overflow("companion matrix"))?;
    }
    IntMatrix::from_rows(rows)
}

/// One distinct eigenvalue with its multiplicity as a root of the
/// characteristic polynomial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root<T> {
    pub value: Complex<T>,
    pub multiplicity: usize,
}

impl<T: Scalar> Root<T> {
    pub fn modulus(&self) -> T {
        self.value.norm()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    /// Sorted by modulus, then argument.
    pub roots: Vec<Root<T>>,
    /// Number of eigenvalues (with multiplicity) inside the unit disc.
    pub stable_count: usize,
}

impl<T: Scalar> Spectrum<T> {
    pub fn dim(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn is_hyperbolic(&self, band: T) -> bool {
        is_hyperbolic(self, band)
    }

    /// Distance of the closest eigenvalue modulus to 1.
    pub fn unit_gap(&self) -> T {
        self.roots.iter().map(|r| (r.modulus() - T::one()).abs()).fold(T::infinity(), T::min)
    }

    /// True when some eigenvalue is repeated.
    pub fn has_repeated_roots(&self) -> bool {
        self.roots.iter().any(|r| r.multiplicity > 1)
    }

    /// `prod (X - lambda)^k` expanded, ascending coefficients.
    pub fn expand(&self) -> Vec<Complex<T>> {
        let mut poly = vec![Complex::new(T::one(), T::zero())];
        for r in &self.roots {
            for _ in 0..r.multiplicity {
                poly = mul_linear(&poly, r.value);
            }
        }
        poly
    }
}

fn mul_linear<T: Scalar>(poly: &[Complex<T>], root: Complex<T>) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); poly.len() + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i + 1] += c;
        out[i] -= c * root;
    }
    out
}

fn horner<T: Scalar>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
}

fn derivative<T: Scalar>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(d, &c)| c * T::from_usize_lossy(d))
        .collect()
}

fn abs_scale<T: Scalar>(coeffs: &[Complex<T>], r: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, c| acc * r + c.norm())
}

/// All complex roots of `poly` by Aberth-Ehrlich simultaneous iteration,
/// grouped into clusters (multiple roots) and symmetrised under conjugation.
///
/// Each approximation `z` carries the inclusion disc of radius
/// `n |P(z) / P'(z)|` (at least `sqrt(tol)`), which contains a root of `P`.
/// Overlapping discs are merged; a merged root of multiplicity `k` is polished
/// by Newton's method on the `(k-1)`-th derivative, where it is simple.
pub fn roots<T: Scalar>(poly: &IntPolynomial, tol: T) -> Result<Spectrum<T>> {
    let n = poly.degree();
    if n == 0 {
        return Err(Error::Invalid("constant polynomial has no roots".into()));
    }
    let lead = poly.leading().to_f64().unwrap_or(f64::NAN);
    let coeffs: Vec<Complex<T>> = poly.to_complex::<T>().into_iter().map(|c| c / T::c(lead)).collect();
    let raw = aberth(&coeffs)?;
    let clusters = cluster(&coeffs, &raw, tol.sqrt());

    let mut found: Vec<Root<T>> = Vec::with_capacity(clusters.len());
    for members in clusters {
        let k = members.len();
        let mean = members.iter().fold(Complex::new(T::zero(), T::zero()), |a, &z| a + z)
            / T::from_usize_lossy(k);
        let spread = members.iter().map(|&z| (z - mean).norm()).fold(tol.sqrt(), T::max);
        found.push(Root { value: polish(&coeffs, mean, k, spread), multiplicity: k });
    }
    symmetrize(&mut found, tol.sqrt())?;

    for r in &found {
        let resid = horner(&coeffs, r.value).norm();
        let scale = abs_scale(&coeffs, r.modulus()).max(T::one());
        if resid > tol * scale {
            return Err(Error::NoConvergence(ABERTH_MAX_ITER));
        }
    }
    found.sort_by(|a, b| {
        a.modulus()
            .partial_cmp(&b.modulus())
            .unwrap_or(Ordering::Equal)
            .then(a.value.arg().partial_cmp(&b.value.arg()).unwrap_or(Ordering::Equal))
    });
    let stable_count = found.iter().filter(|r| r.modulus() < T::one()).map(|r| r.multiplicity).sum();
    Ok(Spectrum { roots: found, stable_count })
}

fn aberth<T: Scalar>(coeffs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let n = coeffs.len() - 1;
    let dcoeffs = derivative(coeffs);
    let radius = T::one() + coeffs[..n].iter().map(|c| c.norm()).fold(T::zero(), T::max);
    let offset = T::c(0.4);
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let angle = T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(n) + offset;
            Complex::from_polar(radius, angle)
        })
        .collect();
    let eps = T::epsilon();
    let slack = T::c(8.0) * T::from_usize_lossy(n + 1);
    for _ in 0..ABERTH_MAX_ITER {
        let mut done = true;
        for i in 0..n {
            let zi = z[i];
            let pz = horner(coeffs, zi);
            if pz.norm() <= slack * eps * abs_scale(coeffs, zi.norm()) {
                continue;
            }
            let dpz = horner(&dcoeffs, zi);
            let ratio = pz / dpz;
            let repulsion = (0..n)
                .filter(|&j| j != i)
                .fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + (zi - z[j]).inv());
            let step = ratio / (Complex::new(T::one(), T::zero()) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] = zi - step;
            if step.norm() > T::c(2.0) * eps * zi.norm().max(T::one()) {
                done = false;
            }
        }
        if done {
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(ABERTH_MAX_ITER))
}

fn cluster<T: Scalar>(coeffs: &[Complex<T>], z: &[Complex<T>], floor: T) -> Vec<Vec<Complex<T>>> {
    let n = z.len();
    let dcoeffs = derivative(coeffs);
    let degree = T::from_usize_lossy(n);
    let radii: Vec<T> = z
        .iter()
        .map(|&zi| {
            let r = degree * (horner(coeffs, zi) / horner(&dcoeffs, zi)).norm();
            if r.is_finite() { r.max(floor) } else { floor }
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() < radii[i] + radii[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex<T>>)> = Vec::new();
    for (i, &zi) in z.iter().enumerate() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(zi),
            None => groups.push((r, vec![zi])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

fn polish<T: Scalar>(coeffs: &[Complex<T>], start: Complex<T>, k: usize, radius: T) -> Complex<T> {
    let mut f = coeffs.to_vec();
    for _ in 1..k {
        f = derivative(&f);
    }
    let df = derivative(&f);
    let mut z = start;
    for _ in 0..50 {
        let d = horner(&df, z);
        if d.norm() == T::zero() {
            break;
        }
        let step = horner(&f, z) / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= T::epsilon() * z.norm().max(T::one()) {
            break;
        }
    }
    if (z - start).norm() < radius {
        z
    } else {
        start
    }
}

fn symmetrize<T: Scalar>(found: &mut [Root<T>], radius: T) -> Result<()> {
    let n = found.len();
    let mut paired = vec![false; n];
    for i in 0..n {
        if paired[i] {
            continue;
        }
        let v = found[i].value;
        if v.im.abs() < radius {
            found[i].value = Complex::new(v.re, T::zero());
            paired[i] = true;
            continue;
        }
        let partner = (0..n)
            .filter(|&j| j != i && !paired[j] && found[j].multiplicity == found[i].multiplicity)
            .min_by(|&a, &b| {
                let da = (found[a].value - v.conj()).norm();
                let db = (found[b].value - v.conj()).norm();
                da.partial_cmp(&db).unwrap_or(Ordering::Equal)
            });
        match partner {
            Some(j) if (found[j].value - v.conj()).norm() < radius => {
                let avg = (v + found[j].value.conj()) * T::c(0.5);
                found[i].value = avg;
                found[j].value = avg.conj();
                paired[i] = true;
                paired[j] = true;
            }
            _ => {
                return Err(Error::Invalid(format!("root {v} has no conjugate partner")));
            }
        }
    }
    Ok(())
}

/// True iff every eigenvalue modulus stays more than `band` away from 1.
pub fn is_hyperbolic<T: Scalar>(s: &Spectrum<T>, band: T) -> bool {
    s.roots.iter().all(|r| (r.modulus() - T::one()).abs() > band)
}

fn ill_conditioned_limit<T: Scalar>() -> T {
    T::c(1e-8).max(T::c(1e3) * T::epsilon())
}

/// Projectors onto the stable and unstable subspaces of a hyperbolic
/// integer matrix, plus orthonormal bases and the restricted actions.
#[derive(Clone, Debug)]
pub struct HyperbolicSplitting<T> {
    matrix: IntMatrix,
    inverse: IntMatrix,
    pub pi_minus: Mat<T>,
    pub pi_plus: Mat<T>,
    pub spectrum: Spectrum<T>,
    /// Spectral radius of `B` on `E_-`.
    pub rho_minus: T,
    /// Spectral radius of `B^{-1}` on `E_+`.
    pub rho_plus_inv: T,
    stable_basis: Mat<T>,
    unstable_basis: Mat<T>,
    stable_action: Mat<T>,
    unstable_inverse_action: Mat<T>,
}

/// Entrywise residuals of the projector identities.
#[derive(Clone, Copy, Debug)]
pub struct SplittingResiduals<T> {
    pub resolution: T,
    pub idempotent_minus: T,
    pub idempotent_plus: T,
    pub cross: T,
    pub commute_minus: T,
    pub commute_plus: T,
}

impl<T: Scalar> SplittingResiduals<T> {
    pub fn max(&self) -> T {
        [
            self.resolution,
            self.idempotent_minus,
            self.idempotent_plus,
            self.cross,
            self.commute_minus,
            self.commute_plus,
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }
}

fn residuals<T: Scalar>(b: &Mat<T>, pm: &Mat<T>, pp: &Mat<T>) -> SplittingResiduals<T> {
    let id = Mat::identity(b.rows());
    SplittingResiduals {
        resolution: pm.add(pp).sub(&id).max_abs(),
        idempotent_minus: pm.mul(pm).sub(pm).max_abs(),
        idempotent_plus: pp.mul(pp).sub(pp).max_abs(),
        cross: pm.mul(pp).max_abs(),
        commute_minus: b.mul(pm).sub(&pm.mul(b)).max_abs(),
        commute_plus: b.mul(pp).sub(&pp.mul(b)).max_abs(),
    }
}

/// Real coefficients of `prod (X - lambda)^k` over the roots selected by `keep`.
fn real_factor<T: Scalar>(s: &Spectrum<T>, keep: impl Fn(&Root<T>) -> bool) -> Vec<T> {
    let mut poly = vec![Complex::new(T::one(), T::zero())];
    for r in s.roots.iter().filter(|r| keep(r)) {
        for _ in 0..r.multiplicity {
            poly = mul_linear(&poly, r.value);
        }
    }
    poly.into_iter().map(|c| c.re).collect()
}

/// Solves `u a + v b = 1` with `deg u < deg b`, `deg v < deg a` through the
/// Sylvester system.
fn bezout<T: Scalar>(a: &[T], b: &[T]) -> Option<(Vec<T>, Vec<T>)> {
    let da = a.len() - 1;
    let db = b.len() - 1;
    let n = da + db;
    if n == 0 {
        return Some((vec![T::one() / a[0]], vec![]));
    }
    let mut sys = Mat::zeros(n, n);
    for j in 0..db {
        for (i, &c) in a.iter().enumerate() {
            sys[(i + j, j)] = c;
        }
    }
    for j in 0..da {
        for (i, &c) in b.iter().enumerate() {
            sys[(i + j, db + j)] = c;
        }
    }
    let mut rhs = vec![T::zero(); n];
    rhs[0] = T::one();
    let x = sys.solve(&rhs)?;
    Some((x[..db].to_vec(), x[db..].to_vec()))
}

fn poly_at_matrix<T: Scalar>(coeffs: &[T], m: &Mat<T>) -> Mat<T> {
    let n = m.rows();
    let mut acc = Mat::zeros(n, n);
    for &c in coeffs.iter().rev() {
        acc = acc.mul(m).add(&Mat::identity(n).scale(c));
    }
    acc
}

/// Splitting for an arbitrary unimodular hyperbolic integer matrix whose
/// spectrum `s` has already been computed.
pub fn splitting_of<T: Scalar>(matrix: &IntMatrix, s: &Spectrum<T>) -> Result<HyperbolicSplitting<T>> {
    let p = matrix.dim();
    if s.dim() != p {
        return Err(Error::DimensionMismatch { expected: p, found: s.dim() });
    }
    if !is_hyperbolic(s, T::c(DEFAULT_BAND)) {
        return Err(Error::NotHyperbolic(s.unit_gap().as_f64() + 1.0));
    }
    let inverse = matrix.inverse_unimodular()?;
    let b = Mat::<T>::from_int(matrix);
    let p_s = real_factor(s, |r| r.modulus() < T::one());
    let p_u = real_factor(s, |r| r.modulus() > T::one());
    let (u, v) = bezout(&p_s, &p_u).ok_or(Error::IllConditioned(f64::INFINITY))?;

    let pi_plus_raw = poly_at_matrix(&u, &b).mul(&poly_at_matrix(&p_s, &b));
    let pi_minus_raw = poly_at_matrix(&v, &b).mul(&poly_at_matrix(&p_u, &b));
    let limit = ill_conditioned_limit::<T>();
    let raw = residuals(&b, &pi_minus_raw, &pi_plus_raw).max();
    if raw.is_nan() || raw > limit {
        return Err(Error::IllConditioned(raw.as_f64()));
    }

    // Newton iteration for idempotents; stays a polynomial in B
    let mut pi_minus = pi_minus_raw;
    for _ in 0..2 {
        let sq = pi_minus.mul(&pi_minus);
        pi_minus = sq.scale(T::c(3.0)).sub(&sq.mul(&pi_minus).scale(T::c(2.0)));
    }
    let pi_plus = Mat::identity(p).sub(&pi_minus);
    let resid = residuals(&b, &pi_minus, &pi_plus).max();
    if resid.is_nan() || resid > limit {
        return Err(Error::IllConditioned(resid.as_f64()));
    }

    let q = s.stable_count;
    let (stable_basis, rest_minus) = pi_minus.orthonormal_range(q);
    let (unstable_basis, rest_plus) = pi_plus.orthonormal_range(p - q);
    let rank_resid = rest_minus.max(rest_plus);
    if rank_resid.is_nan() || rank_resid > limit {
        return Err(Error::IllConditioned(rank_resid.as_f64()));
    }
    let b_inv = Mat::<T>::from_int(&inverse);
    let stable_action = stable_basis.transpose().mul(&b).mul(&stable_basis);
    let unstable_inverse_action = unstable_basis.transpose().mul(&b_inv).mul(&unstable_basis);

    let rho_minus = s.roots.iter().filter(|r| r.modulus() < T::one()).map(|r| r.modulus()).fold(T::zero(), T::max);
    let rho_plus_inv = s
        .roots
        .iter()
        .filter(|r| r.modulus() > T::one())
        .map(|r| T::one() / r.modulus())
        .fold(T::zero(), T::max);

    Ok(HyperbolicSplitting {
        matrix: matrix.clone(),
        inverse,
        pi_minus,
        pi_plus,
        spectrum: s.clone(),
        rho_minus,
        rho_plus_inv,
        stable_basis,
        unstable_basis,
        stable_action,
        unstable_inverse_action,
    })
}

/// Splitting of the dual map `B`.
pub fn splitting<T: Scalar>(b: &DualMap, s: &Spectrum<T>) -> Result<HyperbolicSplitting<T>> {
    splitting_of(b.matrix(), s)
}

impl<T: Scalar> HyperbolicSplitting<T> {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &IntMatrix {
        &self.inverse
    }

    pub fn stable_dim(&self) -> usize {
        self.stable_basis.cols()
    }

    pub fn unstable_dim(&self) -> usize {
        self.unstable_basis.cols()
    }

    /// Orthonormal basis (columns) of `range(Pi_-)`.
    pub fn stable_basis(&self) -> &Mat<T> {
        &self.stable_basis
    }

    /// Orthonormal basis (columns) of `range(Pi_+)`.
    pub fn unstable_basis(&self) -> &Mat<T> {
        &self.unstable_basis
    }

    /// `B` restricted to `E_-` in the coordinates of [`Self::stable_basis`].
    pub fn stable_action(&self) -> &Mat<T> {
        &self.stable_action
    }

    /// `B^{-1}` restricted to `E_+` in the coordinates of [`Self::unstable_basis`].
    pub fn unstable_inverse_action(&self) -> &Mat<T> {
        &self.unstable_inverse_action
    }

    /// Euclidean operator norm of `B^k` on `E_-`.
    pub fn stable_power_norm(&self, k: usize) -> T {
        self.stable_action.pow(k).op_norm2()
    }

    /// Euclidean operator norm of `B^{-k}` on `E_+`.
    pub fn unstable_inverse_power_norm(&self, k: usize) -> T {
        self.unstable_inverse_action.pow(k).op_norm2()
    }

    pub fn residuals(&self) -> SplittingResiduals<T> {
        residuals(&Mat::from_int(&self.matrix), &self.pi_minus, &self.pi_plus)
    }

    /// Splitting of `B^{-1}`: the same subspaces with their roles exchanged.
    pub fn swapped(&self) -> HyperbolicSplitting<T> {
        let roots: Vec<Root<T>> = self
            .spectrum
            .roots
            .iter()
            .map(|r| Root { value: r.value.inv(), multiplicity: r.multiplicity })
            .rev()
            .collect();
        let stable_count = self.dim() - self.spectrum.stable_count;
        HyperbolicSplitting {
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
            pi_minus: self.pi_plus.clone(),
            pi_plus: self.pi_minus.clone(),
            spectrum: Spectrum { roots, stable_count },
            rho_minus: self.rho_plus_inv,
            rho_plus_inv: self.rho_minus,
            stable_basis: self.unstable_basis.clone(),
            unstable_basis: self.stable_basis.clone(),
            stable_action: self.unstable_inverse_action.clone(),
            unstable_inverse_action: self.stable_action.clone(),
        }
    }

    pub fn project_minus(&self, x: &[T]) -> Vec<T> {
        self.pi_minus.mul_vec(x)
    }

    pub fn project_plus(&self, x: &[T]) -> Vec<T> {
        self.pi_plus.mul_vec(x)
    }
}

/// Spectrum and splitting of an integer matrix in one step.
pub fn analyze<T: Scalar>(matrix: &IntMatrix, band: T) -> Result<HyperbolicSplitting<T>> {
    let s = roots::<T>(&char_poly(matrix), T::c(DEFAULT_ROOT_TOL).max(T::epsilon() * T::c(16.0)))?;
    if !is_hyperbolic(&s, band) {
        return Err(Error::NotHyperbolic(nearest_unit_modulus(&s).as_f64()));
    }
    splitting_of(matrix, &s)
}

fn nearest_unit_modulus<T: Scalar>(s: &Spectrum<T>) -> T {
    s.roots
        .iter()
        .map(|r| r.modulus())
        .min_by(|a, b| (*a - T::one()).abs().partial_cmp(&(*b - T::one()).abs()).unwrap_or(Ordering::Equal))
        .unwrap_or(T::nan())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn char_poly_examples() {
        let cubic = m(vec![vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 0]]);
        assert_eq!(char_poly(&cubic), IntPolynomial::from_i64(&[1, 1, 1, -1]));
        assert_eq!(char_poly(&IntMatrix::identity(2)), IntPolynomial::from_i64(&[1, -2, 1]));
        let cat = m(vec![vec![1, 1], vec![1, 2]]);
        assert_eq!(char_poly(&cat), IntPolynomial::from_i64(&[1, -3, 1]));
    }

    #[test]
    fn companion_examples() {
        let q = IntPolynomial::from_i64(&[1, 2, 3, 0, -1, -2, 1]);
        let c = companion_matrix(&q).unwrap();
        let expected = m(vec![
            vec![0, 0, 0, 0, 0, -1],
            vec![1, 0, 0, 0, 0, -2],
            vec![0, 1, 0, 0, 0, -3],
            vec![0, 0, 1, 0, 0, 0],
            vec![0, 0, 0, 1, 0, 1],
            vec![0, 0, 0, 0, 1, 2],
        ]);
        assert_eq!(c, expected);
        assert_eq!(companion_matrix(&IntPolynomial::from_i64(&[-1, 1])).unwrap(), m(vec![vec![1]]));
        assert_eq!(
            companion_matrix(&IntPolynomial::from_i64(&[1, -3, 1])).unwrap(),
            m(vec![vec![0, -1], vec![1, 3]])
        );
        assert!(matches!(
            companion_matrix(&IntPolynomial::from_i64(&[2, 0, 1])),
            Err(Error::NotUnimodularPolynomial(_))
        ));
        // leading -1 normalises by sign
        assert_eq!(companion_matrix(&IntPolynomial::from_i64(&[-1, 3, -1])).unwrap(), m(vec![vec![0, -1], vec![1, 3]]));
    }

    #[test]
    fn display_polynomial() {
        assert_eq!(IntPolynomial::from_i64(&[1, 1, 1, -1]).to_string(), "-X^3 + X^2 + X + 1");
        assert_eq!(IntPolynomial::from_i64(&[0]).to_string(), "0");
    }

    #[test]
    fn cat_roots() {
        let s = roots::<f64>(&IntPolynomial::from_i64(&[1, -3, 1]), 1e-12).unwrap();
        let sq5 = 5f64.sqrt();
        assert_eq!(s.roots.len(), 2);
        assert!((s.roots[0].value.re - (3.0 - sq5) / 2.0).abs() < 1e-12);
        assert!((s.roots[1].value.re - (3.0 + sq5) / 2.0).abs() < 1e-12);
        assert_eq!(s.stable_count, 1);
        assert!(s.is_hyperbolic(1e-8));
    }

    #[test]
    fn rotation_is_not_hyperbolic() {
        let rot = m(vec![vec![0, -1], vec![1, 0]]);
        let s = roots::<f64>(&char_poly(&rot), 1e-12).unwrap();
        assert!(!is_hyperbolic(&s, 1e-8));
        assert!(matches!(analyze::<f64>(&rot, 1e-8), Err(Error::NotHyperbolic(_))));
    }

    #[test]
    fn bezout_identity() {
        // (X - 2) u + (X - 3) v = 1 -> u = 1, v = -1
        let (u, v) = bezout(&[-2.0f64, 1.0], &[-3.0, 1.0]).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-14 && (v[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn cat_splitting_matches_eigenline() {
        let b = m(vec![vec![2, -1], vec![-1, 1]]);
        let sp = analyze::<f64>(&b, 1e-8).unwrap();
        assert!(sp.residuals().max() < 1e-10);
        assert_eq!((sp.stable_dim(), sp.unstable_dim()), (1, 1));
        // B's stable eigenvalue (3 - sqrt5)/2 has eigenvector (1, (1 + sqrt5)/2)
        let lam = (3.0 - 5f64.sqrt()) / 2.0;
        let v = [1.0, 2.0 - lam];
        let bv = sp.project_minus(&v);
        assert!((bv[0] - v[0]).abs() < 1e-12 && (bv[1] - v[1]).abs() < 1e-12);
        assert!((sp.rho_minus - lam).abs() < 1e-12);
    }

    #[test]
    fn f32_splitting_works() {
        let b = m(vec![vec![2, -1], vec![-1, 1]]);
        let sp = analyze::<f32>(&b, 1e-4).unwrap();
        assert!(sp.residuals().max() < 1e-4);
    }
}
