mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toruscohom::adapted_norm::{build_adapted_norm, OrbitKind};
use toruscohom::dense::norm2;
use toruscohom::lattice::to_big;
use toruscohom::Norm;

fn norms() -> Vec<(String, Norm)> {
    common::matrices().into_iter().map(|(n, a)| (n, common::linear_system(&a).norm)).collect()
}

fn sample(rng: &mut impl Rng, p: usize) -> Vec<f64> {
    (0..p).map(|_| rng.gen_range(-10.0..10.0)).collect()
}

#[test]
fn norm_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, nm) in norms() {
        let p = nm.dim();
        assert_eq!(nm.norm_star(&vec![0.0; p]), 0.0);
        for _ in 0..500 {
            let (x, y) = (sample(&mut rng, p), sample(&mut rng, p));
            let t: f64 = rng.gen_range(-5.0..5.0);
            let nx = nm.norm_star(&x);
            assert!(nx > 0.0, "{name}");
            let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
            assert!((nm.norm_star(&tx) - t.abs() * nx).abs() <= 1e-12 * (1.0 + t.abs() * nx), "{name}");
            let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            assert!(nm.norm_star(&s) <= (nx + nm.norm_star(&y)) * (1.0 + 1e-12), "{name}");
        }
    }
}

#[test]
fn contraction_constants_below_one() {
    for (name, nm) in norms() {
        assert!(nm.theta_minus < 1.0 && nm.theta_plus_inv < 1.0, "{name}: {} {}", nm.theta_minus, nm.theta_plus_inv);
        assert!(nm.eta > 0.0 && nm.eta <= nm.mu, "{name}");
    }
}

#[test]
fn max_property_and_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, nm) in norms() {
        let sp = nm.splitting();
        for _ in 0..2000 {
            let x = sample(&mut rng, nm.dim());
            let whole = nm.norm_star(&x);
            let parts = nm.norm_star(&sp.project_minus(&x)).max(nm.norm_star(&sp.project_plus(&x)));
            assert!((whole - parts).abs() <= 1e-10 * (1.0 + whole), "{name}");
            assert!(nm.sandwich_holds(&x), "{name}");
        }
        for i in 0..nm.dim() {
            let mut e = vec![0.0; nm.dim()];
            e[i] = 1.0;
            assert!(nm.sandwich_holds(&e), "{name}");
        }
    }
}

#[test]
fn inverse_gives_same_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, nm) in norms() {
        let other = build_adapted_norm(&nm.splitting().swapped()).unwrap();
        assert_eq!(other.n, nm.n, "{name}");
        for _ in 0..500 {
            let x = sample(&mut rng, nm.dim());
            let (a, b) = (nm.norm_star(&x), other.norm_star(&x));
            assert!((a - b).abs() <= 1e-10 * (1.0 + a), "{name}: {a} vs {b}");
        }
    }
}

#[test]
fn lattice_points_have_both_components() {
    for (name, nm) in norms() {
        let p = nm.dim();
        let sp = nm.splitting();
        // |m|_inf <= 10 is 21^p points; sample the box for p > 3
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points: Vec<Vec<i64>> = if p <= 3 {
            let mut all = vec![vec![]];
            for _ in 0..p {
                all = all.into_iter().flat_map(|v: Vec<i64>| (-10..=10).map(move |x| [v.clone(), vec![x]].concat())).collect();
            }
            all
        } else {
            (0..20000).map(|_| (0..p).map(|_| rng.gen_range(-10..=10)).collect()).collect()
        };
        for m in points.into_iter().filter(|m| m.iter().any(|&v| v != 0)) {
            let x: Vec<f64> = m.iter().map(|&v| v as f64).collect();
            assert!(norm2(&sp.project_minus(&x)) > 1e-9, "{name} {m:?}");
            assert!(norm2(&sp.project_plus(&x)) > 1e-9, "{name} {m:?}");
        }
    }
}

fn monotone(nm: &Norm, m: &[i64]) -> bool {
    let dual = nm.splitting();
    let kind = nm.classify_big(&to_big(m)).unwrap();
    let (step, _) = match kind {
        OrbitKind::Expanding => (dual.matrix(), ()),
        OrbitKind::Contracting => (dual.inverse(), ()),
    };
    let mut cur = to_big(m);
    let mut last = nm.norm_star_big(&cur);
    for _ in 0..20 {
        cur = step.mul_big(&cur);
        let next = nm.norm_star_big(&cur);
        if next <= last || next.is_nan() {
            return false;
        }
        last = next;
    }
    true
}

proptest! {
    #[test]
    fn classified_orbits_grow(i in 0usize..8, m in proptest::collection::vec(-10i64..=10, 4)) {
        let all = norms();
        let (name, nm) = &all[i % all.len()];
        let m = &m[..nm.dim().min(4)];
        prop_assume!(m.len() == nm.dim() && m.iter().any(|&v| v != 0));
        prop_assert!(monotone(nm, m), "{} {:?}", name, m);
    }
}

#[test]
fn cat_classification_matches_components() {
    let nm = common::linear_system(&toruscohom::fixtures::cat()).norm;
    for m in [[1i64, 0], [0, 1], [1, 1], [2, -1], [-3, 5]] {
        let x = [m[0] as f64, m[1] as f64];
        let expect = if nm.norm_plus(&x) >= nm.norm_minus(&x) { OrbitKind::Expanding } else { OrbitKind::Contracting };
        assert_eq!(nm.classify(&x).unwrap(), expect);
        assert!(monotone(&nm, &m));
    }
}
