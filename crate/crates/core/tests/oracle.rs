mod common;

use proptest::prelude::*;
use qsylv_core::chain::{generate_with, mixed_instance, random_qmatrix, solve_chain, DimSpec, GenMode, GenSpec};
use qsylv_core::oracle::{linearize, oracle, vectorize, DEFAULT_ORACLE_TOL};
use qsylv_core::{ChainSystem, Equation, QMatrix, RankPolicy};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linearization_reproduces_left_side(seed in any::<u64>(), k in 1usize..4) {
        let g = generate_with(&GenSpec { dims: DimSpec::Range(0, 3), k, seed, mode: GenMode::Decoupled, rank_cap: None });
        let mut r = common::rng(seed);
        let xs: Vec<QMatrix> = g.system.unknown_shapes().iter().map(|&(p, q)| random_qmatrix(&mut r, p, q)).collect();
        let lin = linearize(&g.system).unwrap();
        let image = lin.apply(&vectorize(&xs));
        let expected = vectorize(&g.system.apply(&xs).unwrap());
        for (a, b) in image.iter().zip(&expected) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn solutions_satisfy_linearization() {
    for seed in 0..60 {
        let (g, _) = mixed_instance(seed, 3, 3);
        let Ok(sol) = solve_chain(&g.system, &RankPolicy::default()) else {
            continue;
        };
        let lin = linearize(&g.system).unwrap();
        assert!(oracle(&g.system, DEFAULT_ORACLE_TOL).unwrap().consistent);
        let image = lin.apply(&vectorize(&sol.x));
        let err = image
            .iter()
            .zip(&lin.e)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-7, "seed {seed}: {err}");
    }
}

#[test]
fn zero_coefficients_with_rhs_are_inconsistent() {
    let z = || QMatrix::zeros(2, 2);
    let sys = ChainSystem::new(vec![Equation::new(z(), z(), z(), z(), QMatrix::identity(2))]).unwrap();
    let v = oracle(&sys, DEFAULT_ORACLE_TOL).unwrap();
    assert!(!v.consistent);
    assert_eq!(v.rank, 0);
}
