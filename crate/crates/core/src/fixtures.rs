//! Named example matrices and a random hyperbolic generator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::IntMatrix;
use crate::spectral::{analyze, companion_matrix, IntPolynomial};

/// Spectral gap required of generated matrices.
pub const GENERATOR_MARGIN: f64 = 1e-2;
const GENERATOR_ATTEMPTS: usize = 10_000;

/// Ascending coefficients of `X^6 - 2X^5 - X^4 + 3X^2 + 2X + 1`.
pub const COMPANION_Q_COEFFS: [i64; 7] = [1, 2, 3, 0, -1, -2, 1];

/// Fixtures accepted by [`by_name`].
pub const NAMES: [&str; 5] = ["cat", "fib", "cubic3", "companionQ", "rot2"];

fn rows(r: Vec<Vec<i64>>) -> IntMatrix {
    IntMatrix::from_rows(r).expect("fixture rows are square")
}

/// Arnold's cat map.
pub fn cat() -> IntMatrix {
    rows(vec![vec![1, 1], vec![1, 2]])
}

pub fn fib() -> IntMatrix {
    rows(vec![vec![1, 1], vec![1, 0]])
}

/// Characteristic polynomial `-X^3 + X^2 + X + 1`: one real root in
/// `(3/2, 2)` and a conjugate pair inside the unit circle.
pub fn cubic3() -> IntMatrix {
    rows(vec![vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 0]])
}

pub fn companion_q_polynomial() -> IntPolynomial {
    IntPolynomial::from_i64(&COMPANION_Q_COEFFS)
}

/// Companion matrix of the square of the `cubic3` characteristic
/// polynomial: hyperbolic, not diagonalizable.
pub fn companion_q() -> IntMatrix {
    companion_matrix(&companion_q_polynomial()).expect("constant term is 1")
}

/// Quarter turn; not hyperbolic.
pub fn rot2() -> IntMatrix {
    rows(vec![vec![0, -1], vec![1, 0]])
}

pub fn by_name(name: &str) -> Option<IntMatrix> {
    match name {
        "cat" => Some(cat()),
        "fib" => Some(fib()),
        "cubic3" => Some(cubic3()),
        "companionQ" => Some(companion_q()),
        "rot2" => Some(rot2()),
        _ => None,
    }
}

/// All hyperbolic named fixtures.
pub fn hyperbolic() -> Vec<(&'static str, IntMatrix)> {
    vec![("cat", cat()), ("fib", fib()), ("cubic3", cubic3()), ("companionQ", companion_q())]
}

/// A hyperbolic matrix in `GL(p, Z)` built from random elementary row
/// operations applied to the identity; deterministic in `seed`.
pub fn random_unimodular(p: usize, seed: u64) -> Result<IntMatrix> {
    if p < 2 {
        return Err(Error::Invalid("random unimodular matrices need p >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATOR_ATTEMPTS {
        let mut m: Vec<Vec<i64>> = (0..p).map(|i| (0..p).map(|j| i64::from(i == j)).collect()).collect();
        let ops = rng.gen_range(2 * p..=3 * p);
        for _ in 0..ops {
            let i = rng.gen_range(0..p);
            let mut j = rng.gen_range(0..p - 1);
            if j >= i {
                j += 1;
            }
            let c = *[-2i64, -1, 1, 2].choose(&mut rng).expect("nonempty");
            let source = m[j].clone();
            for (dst, src) in m[i].iter_mut().zip(source) {
                *dst += c * src;
            }
        }
        if rng.gen_bool(0.5) {
            m.swap(0, 1);
        }
        let candidate = IntMatrix::from_rows(m)?;
        if analyze::<f64>(&candidate, GENERATOR_MARGIN).is_ok() {
            return Ok(candidate);
        }
    }
    Err(Error::NoConvergence(GENERATOR_ATTEMPTS))
}
