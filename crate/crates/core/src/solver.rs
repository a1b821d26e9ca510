//! Obstruction functionals and the solution operator of `f - f o gamma = g`.
//!
//! For a trigonometric polynomial `g` every orbit sum is finite: once a
//! forward iterate `B^k m` is expanding and lies outside the adapted-norm ball
//! containing `supp(g)`, all later iterates stay outside it, and symmetrically
//! backwards for contracting iterates. The walks below stop at those
//! frontiers, so every functional is evaluated exactly up to the final
//! floating-point phase products.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::adapted_norm::{AdaptedNorm, OrbitKind};
use crate::error::{Error, Result};
use crate::fourier::{Freq, FourierSeries};
use crate::lattice::{big_to_real, rat_dot_big, to_big, to_small, unit_phase, AffineTorusMap, BigVec, DualMap, RatVec};
use crate::scalar::Scalar;

/// Default tolerance for `|Phi| <= tol` and for the solution residual.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default cap on the number of lattice points in the enumeration box.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;
/// Orbit walks longer than this abort.
pub const MAX_WALK: usize = 100_000;
/// Continuity orders reported by [`solve`].
pub const DEFAULT_CONTINUITY_ORDERS: [u32; 3] = [0, 1, 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiMode {
    /// `sum_{k >= 0}`
    Plus,
    /// `-sum_{k < 0}`
    Minus,
    /// `sum_{k in Z}`, equal to `Plus - Minus`.
    Total,
}

/// `max |s|_*` over the nonzero support of `g`; `None` when that is empty.
pub fn support_radius<T: Scalar>(g: &FourierSeries<T>, nm: &AdaptedNorm<T>) -> Option<T> {
    g.support()
        .filter(|m| m.iter().any(|&v| v != 0))
        .map(|m| nm.norm_star(&m.iter().map(|&v| T::c(v as f64)).collect::<Vec<_>>()))
        .reduce(T::max)
}

fn frontier<T: Scalar>(radius: T) -> T {
    radius * (T::one() + T::c(1e-9).max(T::c(64.0) * T::epsilon()))
}

/// One point of an orbit: `k`, `B^k m` and `b_k`.
struct OrbitPoint {
    k: i64,
    point: BigVec,
    shift: RatVec,
}

/// Iterates `B^k m` together with `b_k` in one direction, stopping at the
/// first point whose norm exceeds `radius` while moving away from the ball.
struct OrbitWalk<'a, T> {
    map: &'a AffineTorusMap,
    dual: &'a DualMap,
    nm: &'a AdaptedNorm<T>,
    radius: T,
    forward: bool,
    next: Option<OrbitPoint>,
    steps: usize,
}

impl<'a, T: Scalar> OrbitWalk<'a, T> {
    fn forward(map: &'a AffineTorusMap, dual: &'a DualMap, nm: &'a AdaptedNorm<T>, m: &[BigInt], radius: T) -> Self {
        let start = OrbitPoint { k: 0, point: m.to_vec(), shift: vec![BigRational::zero(); m.len()] };
        OrbitWalk { map, dual, nm, radius: frontier(radius), forward: true, next: Some(start), steps: 0 }
    }

    /// Starts at `k = -1`.
    fn backward(map: &'a AffineTorusMap, dual: &'a DualMap, nm: &'a AdaptedNorm<T>, m: &[BigInt], radius: T) -> Self {
        let zero = vec![BigRational::zero(); m.len()];
        let start = OrbitPoint { k: -1, point: dual.inverse().mul_big(m), shift: map.step_backward(&zero) };
        OrbitWalk { map, dual, nm, radius: frontier(radius), forward: false, next: Some(start), steps: 0 }
    }

    fn step(&mut self) -> Result<Option<(OrbitPoint, T)>> {
        let Some(cur) = self.next.take() else { return Ok(None) };
        if self.steps >= MAX_WALK {
            return Err(Error::OrbitWalkCap(MAX_WALK));
        }
        self.steps += 1;
        let x = big_to_real::<T>(&cur.point);
        let (minus, plus) = (self.nm.norm_minus(&x), self.nm.norm_plus(&x));
        let norm = minus.max(plus);
        let leaving = match self.nm.classify_split(minus, plus) {
            OrbitKind::Expanding => self.forward,
            OrbitKind::Contracting => !self.forward,
        };
        if leaving && norm > self.radius {
            return Ok(None);
        }
        let next = if self.forward {
            OrbitPoint { k: cur.k + 1, point: self.dual.matrix().mul_big(&cur.point), shift: self.map.step_forward(&cur.shift) }
        } else {
            OrbitPoint { k: cur.k - 1, point: self.dual.inverse().mul_big(&cur.point), shift: self.map.step_backward(&cur.shift) }
        };
        self.next = Some(next);
        Ok(Some((cur, norm)))
    }
}

fn half_sum<T: Scalar>(
    g: &FourierSeries<T>,
    mut walk: OrbitWalk<'_, T>,
) -> Result<Complex<T>> {
    let mut acc = Complex::new(T::zero(), T::zero());
    while let Some((pt, _)) = walk.step()? {
        if let Some(c) = g.lookup_big(&pt.point) {
            acc += c * unit_phase::<T>(&rat_dot_big(&pt.shift, &pt.point));
        }
    }
    Ok(acc)
}

/// Orbit functional at `m != 0`: the forward half sum `Phi^+_m(g)`, the
/// negated backward half sum `Phi^-_m(g)`, or the full sum `Phi_m(g)`.
pub fn phi<T: Scalar>(
    g: &FourierSeries<T>,
    map: &AffineTorusMap,
    nm: &AdaptedNorm<T>,
    m: &[i64],
    mode: PhiMode,
) -> Result<Complex<T>> {
    if m.len() != g.dim() || map.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: m.len().min(map.dim()) });
    }
    if m.iter().all(|&v| v == 0) {
        return Err(Error::ZeroFrequency);
    }
    let Some(radius) = support_radius(g, nm) else {
        return Ok(Complex::new(T::zero(), T::zero()));
    };
    let dual = map.dual();
    phi_with(g, map, &dual, nm, &to_big(m), radius, mode)
}

fn phi_with<T: Scalar>(
    g: &FourierSeries<T>,
    map: &AffineTorusMap,
    dual: &DualMap,
    nm: &AdaptedNorm<T>,
    m: &[BigInt],
    radius: T,
    mode: PhiMode,
) -> Result<Complex<T>> {
    let plus = || half_sum(g, OrbitWalk::forward(map, dual, nm, m, radius));
    let minus = || half_sum(g, OrbitWalk::backward(map, dual, nm, m, radius)).map(|s| -s);
    Ok(match mode {
        PhiMode::Plus => plus()?,
        PhiMode::Minus => minus()?,
        PhiMode::Total => plus()? - minus()?,
    })
}

/// `Phi_0(g)`, the mean of `g`.
pub fn phi_zero<T: Scalar>(g: &FourierSeries<T>) -> Complex<T> {
    g.mean()
}

/// All orbit points of `m` between the backward and forward frontiers,
/// together with their adapted norms.
fn orbit_segment<T: Scalar>(
    map: &AffineTorusMap,
    dual: &DualMap,
    nm: &AdaptedNorm<T>,
    m: &[BigInt],
    radius: T,
) -> Result<Vec<(BigVec, T)>> {
    let mut out = Vec::new();
    let mut back = OrbitWalk::backward(map, dual, nm, m, radius);
    while let Some((pt, norm)) = back.step()? {
        out.push((pt.point, norm));
    }
    out.reverse();
    let mut fwd = OrbitWalk::forward(map, dual, nm, m, radius);
    while let Some((pt, norm)) = fwd.step()? {
        out.push((pt.point, norm));
    }
    Ok(out)
}

/// One representative per `B`-orbit meeting `supp(g) \ {0}`: the visited
/// orbit point of smallest adapted norm, ties broken lexicographically.
pub fn orbit_representatives<T: Scalar>(
    g: &FourierSeries<T>,
    map: &AffineTorusMap,
    nm: &AdaptedNorm<T>,
) -> Result<Vec<Freq>> {
    let Some(radius) = support_radius(g, nm) else { return Ok(Vec::new()) };
    let dual = map.dual();
    let mut covered: BTreeSet<Freq> = BTreeSet::new();
    let mut reps = Vec::new();
    for s in g.support().filter(|m| m.iter().any(|&v| v != 0)) {
        if covered.contains(s) {
            continue;
        }
        let seg = orbit_segment(map, &dual, nm, &to_big(s), radius)?;
        let mut best: Option<(T, Freq)> = None;
        for (pt, norm) in seg {
            let small = to_small(&pt).ok_or(Error::Overflow("orbit representative"))?;
            let better = match &best {
                None => true,
                Some((bn, bm)) => norm < *bn || (norm == *bn && small < *bm),
            };
            if g.coeff(&small) != Complex::new(T::zero(), T::zero()) {
                covered.insert(small.clone());
            }
            if better {
                best = Some((norm, small));
            }
        }
        covered.insert(s.clone());
        if let Some((_, m)) = best {
            reps.push(m);
        }
    }
    Ok(reps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitCheck<T> {
    pub representative: Freq,
    pub phi: Complex<T>,
    pub modulus: T,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionReport<T> {
    pub phi_zero: Complex<T>,
    pub orbit_checks: Vec<OrbitCheck<T>>,
    pub tol: T,
    pub solvable: bool,
}

impl<T: Scalar> ObstructionReport<T> {
    pub fn mean_passes(&self) -> bool {
        self.phi_zero.norm() <= self.tol
    }

    pub fn violations(&self) -> impl Iterator<Item = &OrbitCheck<T>> {
        self.orbit_checks.iter().filter(|c| !c.pass)
    }
}

impl<T: Scalar> fmt::Display for ObstructionReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.mean_passes() {
            parts.push(format!("Phi_0 = {} (|.| = {:e})", self.phi_zero, self.phi_zero.norm().as_f64()));
        }
        for c in self.violations() {
            parts.push(format!("Phi_{:?} = {} (|.| = {:e})", c.representative, c.phi, c.modulus.as_f64()));
        }
        if parts.is_empty() {
            write!(f, "all obstructions vanish within {:e}", self.tol.as_f64())
        } else {
            write!(f, "{}", parts.join("; "))
        }
    }
}

/// Evaluates `Phi_0` and `Phi_m` at every orbit representative.
pub fn check_obstructions<T: Scalar>(
    g: &FourierSeries<T>,
    map: &AffineTorusMap,
    nm: &AdaptedNorm<T>,
    tol: T,
) -> Result<ObstructionReport<T>> {
    let reps = orbit_representatives(g, map, nm)?;
    let phi_zero = phi_zero(g);
    let dual = map.dual();
    let radius = support_radius(g, nm);
    let orbit_checks = reps
        .into_par_iter()
        .map(|rep| {
            let value = match radius {
                Some(r) => phi_with(g, map, &dual, nm, &to_big(&rep), r, PhiMode::Total)?,
                None => Complex::new(T::zero(), T::zero()),
            };
            let modulus = value.norm();
            Ok(OrbitCheck { representative: rep, phi: value, modulus, pass: modulus <= tol })
        })
        .collect::<Result<Vec<_>>>()?;
    let solvable = phi_zero.norm() <= tol && orbit_checks.iter().all(|c| c.pass);
    Ok(ObstructionReport { phi_zero, orbit_checks, tol, solvable })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Enumeration {
    /// Walk the orbits of `supp(g)` and keep the points inside the ball.
    OrbitWalk,
    /// Scan the integer box `|m|_1 <= ceil(mu R)` and filter by adapted norm.
    Box { cap: u128 },
}

#[derive(Clone, Debug)]
pub struct SolveOptions<T> {
    pub tol: T,
    pub enumeration: Enumeration,
    pub continuity_orders: Vec<u32>,
}

impl<T: Scalar> Default for SolveOptions<T> {
    fn default() -> Self {
        SolveOptions {
            tol: T::c(DEFAULT_TOL),
            enumeration: Enumeration::OrbitWalk,
            continuity_orders: DEFAULT_CONTINUITY_ORDERS.to_vec(),
        }
    }
}

impl<T: Scalar> SolveOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        SolveOptions { tol, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityRow<T> {
    pub r: u32,
    /// `|f|_{1,r}`
    pub lhs: T,
    /// `(mu/eta)^{r+2} S_2(M) |g|_{1,r+2}` with the lattice sum cut at the box radius.
    pub rhs_original: T,
    /// `(mu/eta)^{r+p+1} S_{p+1} |g|_{1,r+p+1}`.
    pub rhs_corrected: T,
    pub holds_original: bool,
    pub holds_corrected: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult<T> {
    pub f: FourierSeries<T>,
    /// `|delta(f) - g|_{1,0}`
    pub residual_norm: T,
    pub search_radius: T,
    pub candidate_count: usize,
    pub continuity: Vec<ContinuityRow<T>>,
    /// `|.|_{1,0}` of modes dropped when `g` came from sampled data.
    pub truncation_tail: Option<T>,
}

#[derive(Clone, Debug)]
pub enum SolveError<T> {
    Obstructed(ObstructionReport<T>),
    Failed(Error),
}

impl<T: Scalar> fmt::Display for SolveError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Obstructed(r) => write!(f, "{}", Error::ObstructionViolated(r.to_string())),
            SolveError::Failed(e) => write!(f, "{e}"),
        }
    }
}

impl<T: Scalar> std::error::Error for SolveError<T> {}

impl<T> From<Error> for SolveError<T> {
    fn from(e: Error) -> Self {
        SolveError::Failed(e)
    }
}

/// Number of `m in Z^p` with `|m|_1 = j`.
pub fn l1_shell_count(p: usize, j: u64) -> u128 {
    if j == 0 {
        return 1;
    }
    let binom = |n: u64, k: u64| -> u128 {
        if k > n {
            return 0;
        }
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    };
    (1..=p as u64).map(|i| (1u128 << i) * binom(p as u64, i) * binom(j - 1, i - 1)).sum()
}

/// Number of `m in Z^p` with `|m|_1 <= radius`.
pub fn l1_ball_count(p: usize, radius: u64) -> u128 {
    (0..=radius).map(|j| l1_shell_count(p, j)).sum()
}

/// `sum_{0 < |m|_1 <= max_shell} |m|_1^{-s}` over `Z^p`.
pub fn lattice_zeta_truncated(p: usize, s: u32, max_shell: u64) -> f64 {
    (1..=max_shell).map(|j| l1_shell_count(p, j) as f64 / (j as f64).powi(s as i32)).sum()
}

/// `sum_{m != 0} |m|_1^{-s}` over `Z^p`, which converges for `s > p`.
///
/// Shells up to `J` are summed directly; the rest is the integral of the
/// shell-count polynomial from `J + 1/2`.
pub fn lattice_zeta(p: usize, s: u32) -> f64 {
    assert!(s as usize > p, "lattice zeta diverges for s <= p");
    const SHELLS: u64 = 4096;
    let head: f64 = lattice_zeta_truncated(p, s, SHELLS);
    // shell count as a polynomial in j: sum_i 2^i C(p,i) C(j-1, i-1)
    let mut poly = vec![0.0f64; p];
    for i in 1..=p {
        let mut term = vec![1.0f64];
        for t in 1..i {
            // multiply by (j - t) / t
            let mut next = vec![0.0; term.len() + 1];
            for (d, &c) in term.iter().enumerate() {
                next[d + 1] += c / t as f64;
                next[d] -= c * t as f64 / t as f64;
            }
            term = next;
        }
        let weight = 2f64.powi(i as i32) * l1_binom(p, i);
        for (d, &c) in term.iter().enumerate() {
            poly[d] += weight * c;
        }
    }
    let x = SHELLS as f64 + 0.5;
    let tail: f64 = poly
        .iter()
        .enumerate()
        .map(|(d, &a)| {
            let e = s as f64 - d as f64 - 1.0;
            a * x.powf(-e) / e
        })
        .sum();
    head + tail
}

fn l1_binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn box_radius<T: Scalar>(nm: &AdaptedNorm<T>, radius: T) -> u64 {
    (nm.mu * radius).ceil().to_u64().unwrap_or(u64::MAX)
}

/// Continuity estimates for `f = L(g)`.
pub fn continuity_report<T: Scalar>(
    f: &FourierSeries<T>,
    g: &FourierSeries<T>,
    nm: &AdaptedNorm<T>,
    orders: &[u32],
) -> Vec<ContinuityRow<T>> {
    let p = nm.dim();
    let ratio = nm.mu / nm.eta;
    let max_shell = support_radius(g, nm).map(|r| box_radius(nm, r)).unwrap_or(0);
    let s2 = T::c(lattice_zeta_truncated(p, 2, max_shell));
    let sp = T::c(lattice_zeta(p, p as u32 + 1));
    orders
        .iter()
        .map(|&r| {
            let lhs = f.seminorm_1r(r);
            let rhs_original = ratio.powi(r as i32 + 2) * s2 * g.seminorm_1r(r + 2);
            let rhs_corrected = ratio.powi((r as usize + p + 1) as i32) * sp * g.seminorm_1r(r + p as u32 + 1);
            ContinuityRow {
                r,
                lhs,
                rhs_original,
                rhs_corrected,
                holds_original: lhs <= rhs_original,
                holds_corrected: lhs <= rhs_corrected,
            }
        })
        .collect()
}

fn enumerate_box(p: usize, radius: i64, visit: &mut impl FnMut(&[i64])) {
    fn rec(prefix: &mut Vec<i64>, p: usize, budget: i64, visit: &mut impl FnMut(&[i64])) {
        if prefix.len() == p {
            visit(prefix);
            return;
        }
        for v in -budget..=budget {
            prefix.push(v);
            rec(prefix, p, budget - v.abs(), visit);
            prefix.pop();
        }
    }
    rec(&mut Vec::with_capacity(p), p, radius, visit);
}

fn candidates<T: Scalar>(
    g: &FourierSeries<T>,
    map: &AffineTorusMap,
    dual: &DualMap,
    nm: &AdaptedNorm<T>,
    radius: T,
    how: Enumeration,
) -> Result<Vec<Freq>> {
    let cut = frontier(radius);
    match how {
        Enumeration::OrbitWalk => {
            let mut set = BTreeSet::new();
            for s in g.support().filter(|m| m.iter().any(|&v| v != 0)) {
                if set.contains(s) {
                    continue;
                }
                for (pt, norm) in orbit_segment(map, dual, nm, &to_big(s), radius)? {
                    if norm <= cut {
                        set.insert(to_small(&pt).ok_or(Error::Overflow("candidate frequency"))?);
                    }
                }
            }
            Ok(set.into_iter().collect())
        }
        Enumeration::Box { cap } => {
            let m_box = box_radius(nm, radius);
            let count = l1_ball_count(nm.dim(), m_box);
            if count > cap {
                return Err(Error::EnumerationOverflow { count, cap });
            }
            let mut out = Vec::new();
            enumerate_box(nm.dim(), m_box as i64, &mut |m| {
                if m.iter().any(|&v| v != 0) {
                    let x: Vec<T> = m.iter().map(|&v| T::c(v as f64)).collect();
                    if nm.norm_star(&x) <= cut {
                        out.push(m.to_vec());
                    }
                }
            });
            out.sort();
            Ok(out)
        }
    }
}

/// The solution operator: checks the obstructions, then sets
/// `f(m) = Phi^+_m(g)` on expanding `m` and `Phi^-_m(g)` on contracting `m`,
/// with `f(0) = 0`.
pub fn solve<T: Scalar>(
    g: &FourierSeries<T>,
    map: &AffineTorusMap,
    nm: &AdaptedNorm<T>,
    opts: &SolveOptions<T>,
) -> Result<SolveResult<T>, SolveError<T>> {
    if g.dim() != map.dim() || nm.dim() != map.dim() {
        return Err(Error::DimensionMismatch { expected: map.dim(), found: g.dim() }.into());
    }
    let report = check_obstructions(g, map, nm, opts.tol)?;
    if !report.solvable {
        return Err(SolveError::Obstructed(report));
    }
    let p = g.dim();
    let Some(radius) = support_radius(g, nm) else {
        return Ok(SolveResult {
            f: FourierSeries::zero(p),
            residual_norm: T::zero(),
            search_radius: T::zero(),
            candidate_count: 0,
            continuity: continuity_report(&FourierSeries::zero(p), g, nm, &opts.continuity_orders),
            truncation_tail: None,
        });
    };
    let dual = map.dual();
    let cands = candidates(g, map, &dual, nm, radius, opts.enumeration)?;
    let coeffs = cands
        .par_iter()
        .map(|m| {
            let big = to_big(m);
            let mode = match nm.classify_big(&big)? {
                OrbitKind::Expanding => PhiMode::Plus,
                OrbitKind::Contracting => PhiMode::Minus,
            };
            phi_with(g, map, &dual, nm, &big, radius, mode)
        })
        .collect::<Result<Vec<_>>>()?;
    let f = FourierSeries::from_terms(p, cands.iter().cloned().zip(coeffs))?;
    let residual_norm = f.coboundary(map)?.try_sub(g)?.seminorm_1r(0);
    if residual_norm.is_nan() || residual_norm > opts.tol {
        return Err(Error::ResidualTooLarge { residual: residual_norm.as_f64(), tol: opts.tol.as_f64() }.into());
    }
    let continuity = continuity_report(&f, g, nm, &opts.continuity_orders);
    Ok(SolveResult {
        f,
        residual_norm,
        search_radius: radius,
        candidate_count: cands.len(),
        continuity,
        truncation_tail: None,
    })
}

/// [`solve`] for data ingested from samples; the discarded tail is reported
/// alongside the residual rather than folded into it.
pub fn solve_sampled<T: Scalar>(
    sampled: &crate::fourier::SampledSeries<T>,
    map: &AffineTorusMap,
    nm: &AdaptedNorm<T>,
    opts: &SolveOptions<T>,
) -> Result<SolveResult<T>, SolveError<T>> {
    let mut res = solve(&sampled.series, map, nm, opts)?;
    res.truncation_tail = Some(sampled.tail);
    Ok(res)
}

/// `|delta(f) - g|_{1,0}`.
pub fn residual<T: Scalar>(f: &FourierSeries<T>, g: &FourierSeries<T>, map: &AffineTorusMap) -> Result<T> {
    Ok(f.coboundary(map)?.try_sub(g)?.seminorm_1r(0))
}
