#![allow(dead_code)]

use toruscohom::fixtures;
use toruscohom::lattice::{parse_rational, AffineTorusMap, IntMatrix};
use toruscohom::{HyperbolicSystem, System};

/// Named fixtures plus a few generated matrices.
pub fn matrices() -> Vec<(String, IntMatrix)> {
    let mut out: Vec<(String, IntMatrix)> =
        fixtures::hyperbolic().into_iter().map(|(n, a)| (n.to_string(), a)).collect();
    for (p, seed) in [(2, 1u64), (3, 2), (3, 7), (4, 3)] {
        out.push((format!("random p={p} seed={seed}"), fixtures::random_unimodular(p, seed).unwrap()));
    }
    out
}

pub fn system(a: &IntMatrix, b: &[&str]) -> System {
    let b = b.iter().map(|s| parse_rational(s).unwrap()).collect();
    HyperbolicSystem::with_default_band(AffineTorusMap::new(a.clone(), b).unwrap()).unwrap()
}

pub fn linear_system(a: &IntMatrix) -> System {
    let zeros = vec!["0"; a.dim()];
    system(a, &zeros)
}
