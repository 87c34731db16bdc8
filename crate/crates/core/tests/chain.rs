mod common;

use qsylv_core::chain::{
    build_condition, check_chain, conditions, generate, generate_with, mixed_instance, one_sided_chain, random_qmatrix,
    reduce, solve_chain, ChainSystem, ConditionId, ConditionKind, DimSpec, Equation, GenMode, GenSpec, RESIDUAL_TOL,
};
use qsylv_core::oracle::{oracle_consistent, DEFAULT_ORACLE_TOL};
use qsylv_core::{Error, Inconsistency, QMatrix, RankPolicy};

fn pol() -> RankPolicy {
    RankPolicy::default()
}

fn consistent(k: usize, seed: u64) -> ChainSystem {
    generate(DimSpec::Range(1, 3), k, seed, GenMode::Consistent)
}

#[test]
fn certificate_size() {
    for k in 1..=6 {
        assert_eq!(conditions(k).len(), 2 * k * (k + 1));
    }
    let report = check_chain(&consistent(3, 1), &pol()).unwrap();
    assert_eq!(report.entries.len(), 24);
}

#[test]
fn single_equation_blocks() {
    let mut r = common::rng(2);
    let eq = Equation::new(
        random_qmatrix(&mut r, 2, 3),
        random_qmatrix(&mut r, 2, 2),
        random_qmatrix(&mut r, 2, 1),
        random_qmatrix(&mut r, 2, 2),
        random_qmatrix(&mut r, 2, 2),
    );
    let sys = ChainSystem::new(vec![eq.clone()]).unwrap();
    let (lhs, parts) = build_condition(&sys, ConditionId::single(ConditionKind::RowBlock, 1)).unwrap();
    let expected = eq.a.hstack(&eq.e).unwrap().hstack(&eq.c).unwrap();
    assert_eq!(lhs, expected);
    assert_eq!(parts[0], eq.a.hstack(&eq.c).unwrap());
    assert_eq!(parts[1].shape(), (0, 2));

    let (lhs, parts) = build_condition(&sys, ConditionId::single(ConditionKind::CornerAd, 1)).unwrap();
    let top = eq.a.hstack(&eq.e).unwrap();
    let bottom = QMatrix::zeros(2, 3).hstack(&eq.d).unwrap();
    assert_eq!(lhs, top.vstack(&bottom).unwrap());
    assert_eq!(parts, vec![eq.a.clone(), eq.d.clone()]);
}

#[test]
fn forward_constructed_chains_pass_and_solve() {
    for k in 1..=5 {
        for seed in 0..12 {
            let sys = consistent(k, seed);
            let report = check_chain(&sys, &pol()).unwrap();
            assert_eq!(report.entries.len(), 2 * k * (k + 1));
            assert!(report.overall, "k {k} seed {seed}: {report}");
            let sol = solve_chain(&sys, &pol()).unwrap();
            assert!(sol.max_residual <= RESIDUAL_TOL);
            assert_eq!(sol.x.len(), k + 1);
        }
    }
}

#[test]
fn certificate_agrees_with_oracle_on_mixed_instances() {
    let mut inconsistent = 0;
    for seed in 0..250 {
        let (g, _) = mixed_instance(seed, 4, 3);
        let report = check_chain(&g.system, &pol()).unwrap();
        let oracle = oracle_consistent(&g.system, DEFAULT_ORACLE_TOL).unwrap();
        assert_eq!(report.overall, oracle, "seed {seed}");
        let solved = solve_chain(&g.system, &pol());
        assert_eq!(solved.is_ok(), report.overall, "seed {seed}: {:?}", solved.err());
        inconsistent += usize::from(!oracle);
    }
    assert!(inconsistent > 20, "the mix should contain inconsistent instances");
}

#[test]
fn reduction_preserves_consistency() {
    let mut reduced = 0;
    for seed in 0..300 {
        let (g, _) = mixed_instance(seed, 4, 3);
        if g.system.k() < 2 {
            continue;
        }
        let Ok((hat, ctx)) = reduce(&g.system, &pol()) else {
            continue;
        };
        reduced += 1;
        assert_eq!(hat.k(), g.system.k() - 1);
        let facts = ctx.facts(&g.system).unwrap();
        assert!(facts.within(1e-10), "seed {seed}: {facts:?}");
        assert_eq!(
            oracle_consistent(&g.system, DEFAULT_ORACLE_TOL).unwrap(),
            oracle_consistent(&hat, DEFAULT_ORACLE_TOL).unwrap(),
            "seed {seed}"
        );
    }
    assert!(reduced >= 60);
}

#[test]
fn reduced_chain_of_consistent_system_passes() {
    let sys = consistent(2, 21);
    let (hat, _) = reduce(&sys, &pol()).unwrap();
    assert!(check_chain(&hat, &pol()).unwrap().overall);
}

#[test]
fn perturbed_chain_is_reported_inconsistent() {
    let sys = generate(DimSpec::Fixed(2), 2, 7, GenMode::Perturbed);
    let report = check_chain(&sys, &pol()).unwrap();
    assert_eq!(report.overall, oracle_consistent(&sys, DEFAULT_ORACLE_TOL).unwrap());
    if !report.overall {
        assert!(matches!(solve_chain(&sys, &pol()), Err(Error::Inconsistent(_))));
    }
}

#[test]
fn inconsistent_top_level_names_condition() {
    let z = || QMatrix::zeros(2, 2);
    let sys = ChainSystem::new(vec![
        Equation::new(z(), z(), z(), z(), z()),
        Equation::new(z(), z(), z(), z(), QMatrix::identity(2)),
    ])
    .unwrap();
    let err = solve_chain(&sys, &pol()).unwrap_err();
    assert_eq!(
        err,
        Error::Inconsistent(Inconsistency::Condition(ConditionId::single(
            ConditionKind::RowBlock,
            2
        )))
    );
}

#[test]
fn coupled_inconsistency_surfaces_in_reduced_chain() {
    // X_2 = I from the first equation and X_2 = 0 from the second.
    let i = || QMatrix::identity(1);
    let z = || QMatrix::zeros(1, 1);
    let sys = ChainSystem::new(vec![
        Equation::new(z(), z(), i(), i(), i()),
        Equation::new(i(), i(), z(), z(), z()),
    ])
    .unwrap();
    let report = check_chain(&sys, &pol()).unwrap();
    assert!(!report.overall);
    assert!(report.entries[..8].iter().all(|e| e.holds));
    let err = solve_chain(&sys, &pol()).unwrap_err();
    assert_eq!(err, Error::Inconsistent(Inconsistency::Level { level: 1, equation: 1 }));
}

#[test]
fn one_sided_rejects_mismatched_d() {
    let a = vec![QMatrix::identity(2), QMatrix::identity(2)];
    let d = vec![QMatrix::zeros(2, 3), QMatrix::zeros(3, 3)];
    let e = vec![QMatrix::zeros(2, 3), QMatrix::zeros(2, 3)];
    assert_eq!(one_sided_chain(a, d, e).unwrap_err(), Error::Dim("r_2 != u_1".into()));
}

#[test]
fn one_sided_consistent_chain() {
    for seed in 0..10 {
        let mut r = common::rng(100 + seed);
        let a = vec![random_qmatrix(&mut r, 2, 2), random_qmatrix(&mut r, 2, 2)];
        let d = vec![random_qmatrix(&mut r, 3, 3), random_qmatrix(&mut r, 3, 3)];
        let x: Vec<QMatrix> = (0..3).map(|_| random_qmatrix(&mut r, 2, 3)).collect();
        let e = vec![
            a[0].mul(&x[0]).add(&x[1].mul(&d[0])),
            a[1].mul(&x[1]).add(&x[2].mul(&d[1])),
        ];
        let sys = one_sided_chain(a, d, e).unwrap();
        let sol = solve_chain(&sys, &pol()).unwrap();
        assert!(sol.max_residual <= RESIDUAL_TOL);
    }
}

#[test]
fn generation_is_deterministic() {
    let spec = GenSpec {
        dims: DimSpec::Range(0, 3),
        k: 3,
        seed: 42,
        mode: GenMode::Decoupled,
        rank_cap: Some(1),
    };
    let a = generate_with(&spec);
    let b = generate_with(&spec);
    assert_eq!(a.system, b.system);
    assert_eq!(a.unknowns, b.unknowns);
}

#[test]
fn identity_chain_solution() {
    let rhs: Vec<QMatrix> = (0..4).map(|s| common::sample(s, 3, 3)).collect();
    let eqs = rhs
        .iter()
        .map(|e| {
            Equation::new(
                QMatrix::identity(3),
                QMatrix::identity(3),
                QMatrix::zeros(3, 3),
                QMatrix::zeros(3, 3),
                e.clone(),
            )
        })
        .collect();
    let sol = solve_chain(&ChainSystem::new(eqs).unwrap(), &pol()).unwrap();
    for (x, e) in sol.x.iter().zip(&rhs) {
        assert!(x.distance(e) < 1e-12);
    }
    assert!(sol.x[4].is_zero());
}
