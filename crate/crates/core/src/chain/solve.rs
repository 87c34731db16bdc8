use alloc::vec::Vec;

use super::{check_equation, reduce::reduce_unchecked, ChainSystem};
use crate::error::{Error, Inconsistency, Result};
use crate::matrix::QMatrix;
use crate::numlin::RankPolicy;
use crate::single::{two_block_particular, SingleContext};

/// Largest accepted per-equation relative residual.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ChainSolution {
    /// `X_1..X_{k+1}`.
    pub x: Vec<QMatrix>,
    /// `‖LHS_i − E_i‖_F / (1 + ‖E_i‖_F)` per equation.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Constructs one solution with every free parameter set to zero.
///
/// Inconsistency found at the top level names the failing rank equality;
/// inconsistency that only shows up in a reduced chain names the reduction
/// level (1 for the first reduced chain) and the equation inside it.
pub fn solve_chain(system: &ChainSystem, policy: &RankPolicy) -> Result<ChainSolution> {
    let x = solve_level(system, policy, 0)?;
    let residuals = system.residuals(&x)?;
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    if max_residual.is_nan() || max_residual > RESIDUAL_TOL {
        return Err(Error::Residual { max_residual });
    }
    Ok(ChainSolution {
        x,
        residuals,
        max_residual,
    })
}

fn solve_level(system: &ChainSystem, policy: &RankPolicy, level: usize) -> Result<Vec<QMatrix>> {
    for i in 1..=system.k() {
        if let Some(fail) = check_equation(system, i, policy)?.into_iter().find(|e| !e.holds) {
            let why = if level == 0 {
                Inconsistency::Condition(fail.id)
            } else {
                Inconsistency::Level { level, equation: i }
            };
            return Err(Error::Inconsistent(why));
        }
    }

    let eqs = system.equations();
    if system.k() == 1 {
        let ctx = SingleContext::new(&eqs[0], policy)?;
        return Ok(alloc::vec![
            ctx.particular_first(&eqs[0].e)?,
            ctx.particular_second(&eqs[0].e)?
        ]);
    }

    let (hatted, ctx) = reduce_unchecked(system, policy)?;
    let y = solve_level(&hatted, policy, level + 1)?;
    let k = system.k();

    // (L_M L_S)-slot and R_D-slot parameters of equation j, and the
    // L_A-slot and R_B-slot parameters of equation j + 1.
    let mut lm_slot: Vec<QMatrix> = Vec::with_capacity(k);
    let mut rd_slot: Vec<QMatrix> = Vec::with_capacity(k);
    let mut la_slot: Vec<QMatrix> = Vec::with_capacity(k);
    let mut rb_slot: Vec<QMatrix> = Vec::with_capacity(k);
    let (q1, r1) = eqs[0].first_unknown();
    la_slot.push(QMatrix::zeros(q1, r1));
    rb_slot.push(QMatrix::zeros(q1, r1));
    for j in 0..k - 1 {
        let g = ctx.coupling_rhs(j, &y[j], &y[j + 1])?;
        let step = &ctx.steps[j];
        let (u, v) = two_block_particular(&step.p, &step.q, &g)?;
        let (t, uu) = eqs[j].second_unknown();
        lm_slot.push(u.submatrix(0, 0, t, u.cols()));
        la_slot.push(u.submatrix(t, 0, u.rows() - t, u.cols()));
        rd_slot.push(v.submatrix(0, 0, v.rows(), uu));
        rb_slot.push(v.submatrix(0, uu, v.rows(), v.cols() - uu));
    }
    let (tk, uk) = eqs[k - 1].second_unknown();
    lm_slot.push(QMatrix::zeros(tk, uk));
    rd_slot.push(QMatrix::zeros(tk, uk));

    let mut x = Vec::with_capacity(k + 1);
    let c0 = &ctx.contexts[0];
    x.push(c0.first(&eqs[0].e, &y[0], &la_slot[0], &rb_slot[0])?);
    for i in 0..k {
        x.push(ctx.contexts[i].second(&eqs[i].e, &y[i], &lm_slot[i], &rd_slot[i])?);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{check_chain, generate, one_sided_chain, DimSpec, Equation, GenMode};
    use alloc::vec;

    fn pol() -> RankPolicy {
        RankPolicy::default()
    }

    #[test]
    fn identity_chain_returns_rhs() {
        let rhs: Vec<QMatrix> = (0..3)
            .map(|i| QMatrix::from_real(2, 2, &[1.0 + i as f64, 2.0, -1.0, 0.5]).unwrap())
            .collect();
        let eqs = rhs
            .iter()
            .map(|e| {
                Equation::new(
                    QMatrix::identity(2),
                    QMatrix::identity(2),
                    QMatrix::zeros(2, 2),
                    QMatrix::zeros(2, 2),
                    e.clone(),
                )
            })
            .collect();
        let sys = ChainSystem::new(eqs).unwrap();
        let sol = solve_chain(&sys, &pol()).unwrap();
        for (x, e) in sol.x.iter().zip(&rhs) {
            assert!(x.distance(e) < 1e-14);
        }
        assert!(sol.x[3].is_zero());
    }

    #[test]
    fn forward_constructed_chain_solves() {
        for seed in 0..5 {
            let sys = generate(DimSpec::Range(1, 3), 3, seed, GenMode::Consistent);
            let sol = solve_chain(&sys, &pol()).unwrap();
            assert!(sol.max_residual <= RESIDUAL_TOL);
        }
    }

    #[test]
    fn perturbed_chain_agrees_with_certificate() {
        let sys = generate(DimSpec::Fixed(2), 2, 3, GenMode::Perturbed);
        let report = check_chain(&sys, &pol()).unwrap();
        assert_eq!(solve_chain(&sys, &pol()).is_ok(), report.overall);
    }

    #[test]
    fn one_sided_identity() {
        let e = QMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let sys = one_sided_chain(vec![QMatrix::identity(2)], vec![QMatrix::zeros(2, 2)], vec![e.clone()]).unwrap();
        let sol = solve_chain(&sys, &pol()).unwrap();
        assert!(sol.x[0].distance(&e) < 1e-14);
    }
}
