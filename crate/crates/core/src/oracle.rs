//! Round-trip checks: random `h`, `g = delta(h)`, solve, compare with `h`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fixtures::random_unimodular;
use crate::fourier::FourierSeries;
use crate::lattice::AffineTorusMap;
use crate::solver::{SolveError, SolveOptions, SolveResult};
use crate::system::HyperbolicSystem;

pub const MAX_TERMS: usize = 6;

/// Random mean-zero series with at most [`MAX_TERMS`] terms in `[-radius, radius]^p`.
pub fn random_series(rng: &mut impl Rng, p: usize, radius: i64) -> FourierSeries<f64> {
    let count = rng.gen_range(1..=MAX_TERMS);
    let mut h = FourierSeries::zero(p);
    while h.len() < count {
        let m: Vec<i64> = (0..p).map(|_| rng.gen_range(-radius..=radius)).collect();
        if m.iter().all(|&v| v == 0) {
            continue;
        }
        let c = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        h.add_term(m, c).expect("dimension matches");
    }
    h
}

/// Zero or a random vector of rationals with small denominators.
pub fn random_translation(rng: &mut impl Rng, p: usize) -> Vec<BigRational> {
    let zero = rng.gen_bool(0.5);
    (0..p)
        .map(|_| {
            if zero {
                BigRational::from_integer(BigInt::from(0))
            } else {
                let den = rng.gen_range(1..=12i64);
                BigRational::new(rng.gen_range(-2 * den..=2 * den).into(), den.into())
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct OracleCase {
    pub seed: u64,
    pub system: HyperbolicSystem<f64>,
    pub h: FourierSeries<f64>,
    pub g: FourierSeries<f64>,
}

/// Deterministic case for `seed`: random hyperbolic `A`, translation and `h`.
pub fn case(p: usize, radius: i64, seed: u64) -> Result<OracleCase> {
    let a = random_unimodular(p, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let b = random_translation(&mut rng, p);
    let map = AffineTorusMap::new(a, b)?;
    let system = HyperbolicSystem::with_default_band(map)?;
    let h = random_series(&mut rng, p, radius);
    let g = h.coboundary(&system.map)?;
    Ok(OracleCase { seed, system, h, g })
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub seed: u64,
    pub max_deviation: f64,
    pub residual: f64,
    pub continuity_holds: bool,
    pub result: Option<SolveResult<f64>>,
    pub error: Option<String>,
}

impl OracleOutcome {
    pub fn passed(&self, tol: f64) -> bool {
        self.error.is_none() && self.max_deviation < tol && self.residual < tol && self.continuity_holds
    }
}

pub fn run_case(c: &OracleCase, tol: f64) -> OracleOutcome {
    match c.system.solve(&c.g, &SolveOptions::with_tol(tol)) {
        Ok(res) => OracleOutcome {
            seed: c.seed,
            max_deviation: res.f.max_coeff_diff(&c.h),
            residual: res.residual_norm,
            continuity_holds: res.continuity.iter().all(|r| r.holds_corrected),
            result: Some(res),
            error: None,
        },
        Err(e) => OracleOutcome {
            seed: c.seed,
            max_deviation: f64::INFINITY,
            residual: f64::INFINITY,
            continuity_holds: false,
            result: None,
            error: Some(match e {
                SolveError::Obstructed(r) => format!("reported obstructed: {r}"),
                SolveError::Failed(e) => e.to_string(),
            }),
        },
    }
}

/// Runs seeds `0..seeds`.
pub fn run(p: usize, radius: i64, seeds: u64, tol: f64) -> Vec<OracleOutcome> {
    (0..seeds)
        .map(|seed| match case(p, radius, seed) {
            Ok(c) => run_case(&c, tol),
            Err(e) => OracleOutcome {
                seed,
                max_deviation: f64::INFINITY,
                residual: f64::INFINITY,
                continuity_holds: false,
                result: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}
