//! One inductive elimination step.
//!
//! Every equation is replaced by its general solution. Equating the two
//! expressions obtained for each shared unknown `X_{j+1}` gives, for
//! `j = 1..k−1`, a two-block equation
//!
//! ```text
//! P_j·U_j + V_j·Q_j = F_j − L_{M_j}·Y_j·R_{N_j} − A_{j+1}†S_{j+1}·Y_{j+1}·R_{N_{j+1}}D_{j+1}B_{j+1}†
//! ```
//!
//! whose solvability condition `R_P·(…)·L_Q = 0` is a chain of `k − 1`
//! equations in the shared parameters `Y_1..Y_k`.

use alloc::vec::Vec;

use super::{check_equation, ChainSystem, Equation};
use crate::error::{Error, Result};
use crate::matrix::{product, QMatrix};
use crate::numlin::{clean_difference, clean_product, rank, RankPolicy};
use crate::single::{Factored, SingleContext};

/// Coupling data between equations `j` and `j + 1`.
#[derive(Clone, Debug)]
pub struct ReductionStep {
    /// `P_j = [L_{M_j}L_{S_j}, −L_{A_{j+1}}]`.
    pub p: Factored,
    /// `Q_j = [R_{D_j}; −R_{B_{j+1}}]`.
    pub q: Factored,
    /// Particular value of `X_{j+1}` from equation `j + 1`.
    pub x_next: QMatrix,
    /// Particular value of `X_{j+1}` from equation `j`.
    pub x_prev: QMatrix,
    /// `F_j = x_next − x_prev`.
    pub f: QMatrix,
    /// `A_{j+1}†·S_{j+1}`.
    pub coupling_left: QMatrix,
    /// `R_{N_{j+1}}·D_{j+1}·B_{j+1}†`.
    pub coupling_right: QMatrix,
    /// The reduced equation `Â·Y_j·B̂ + Ĉ·Y_{j+1}·D̂ = Ê`.
    pub hatted: Equation,
}

/// Everything needed to lift a solution of the reduced chain back.
#[derive(Clone, Debug)]
pub struct ReductionContext {
    pub policy: RankPolicy,
    /// Per-equation derived matrices, `k` of them.
    pub contexts: Vec<SingleContext>,
    /// Couplings, `k − 1` of them.
    pub steps: Vec<ReductionStep>,
}

/// Numerical evidence for the identities the elimination relies on,
/// maximised over all equations and couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactResiduals {
    /// Largest relative residual of a particular solution pair.
    pub particular: f64,
    /// Largest `‖A_{j+1}A_{j+1}†S_{j+1} − S_{j+1}‖ / (1 + ‖S_{j+1}‖)`.
    pub range_inclusion: f64,
    /// Whether `rank[R_{N_j}; R_{D_j}] = rank(R_{N_j})` for every `j`.
    pub kernel_inclusion: bool,
    /// Largest `‖R_N·D·B†B − R_N·D‖ / (1 + ‖R_N·D‖)`.
    pub row_inclusion: f64,
}

impl FactResiduals {
    /// Whether every identity holds to `tol`.
    pub fn within(&self, tol: f64) -> bool {
        self.particular <= tol && self.range_inclusion <= tol && self.kernel_inclusion && self.row_inclusion <= tol
    }
}

impl ReductionContext {
    pub fn k(&self) -> usize {
        self.contexts.len()
    }

    /// Recomputes the identities on the stored data.
    pub fn facts(&self, system: &ChainSystem) -> Result<FactResiduals> {
        let mut out = FactResiduals {
            particular: 0.0,
            range_inclusion: 0.0,
            kernel_inclusion: true,
            row_inclusion: 0.0,
        };
        for (eq, ctx) in system.equations().iter().zip(&self.contexts) {
            let x = ctx.particular_first(&eq.e)?;
            let x_next = ctx.particular_second(&eq.e)?;
            out.particular = out.particular.max(eq.relative_residual(&x, &x_next)?);
        }
        for ctx in self.contexts.iter().skip(1) {
            let s = &ctx.s.mat;
            let back = product(&[&ctx.a.mat, ctx.a.pinv(), s])?;
            out.range_inclusion = out
                .range_inclusion
                .max(back.sub(s).frobenius_norm() / (1.0 + s.frobenius_norm()));

            let rn_d = ctx.n.right.try_mul(&ctx.d.mat)?;
            let back = product(&[&rn_d, ctx.b.pinv(), &ctx.b.mat])?;
            out.row_inclusion = out
                .row_inclusion
                .max(back.sub(&rn_d).frobenius_norm() / (1.0 + rn_d.frobenius_norm()));
        }
        for ctx in self.contexts.iter().take(self.k().saturating_sub(1)) {
            let stacked = ctx.n.right.vstack(&ctx.d.right)?;
            out.kernel_inclusion &= rank(&stacked, &self.policy)? == rank(&ctx.n.right, &self.policy)?;
        }
        Ok(out)
    }

    /// `G_j = F_j − L_{M_j}·Y_j·R_{N_j} − A_{j+1}†S_{j+1}·Y_{j+1}·R_{N_{j+1}}D_{j+1}B_{j+1}†`.
    pub fn coupling_rhs(&self, j: usize, y: &QMatrix, y_next: &QMatrix) -> Result<QMatrix> {
        let step = &self.steps[j];
        let ctx = &self.contexts[j];
        let own = product(&[&ctx.m.left, y, &ctx.n.right])?;
        let next = product(&[&step.coupling_left, y_next, &step.coupling_right])?;
        step.f.try_sub(&own)?.try_sub(&next)
    }
}

/// Reduces a chain of `k ≥ 2` equations to the `k − 1` equation chain in
/// `Y_1..Y_k`. Each equation must be solvable on its own.
pub fn reduce(system: &ChainSystem, policy: &RankPolicy) -> Result<(ChainSystem, ReductionContext)> {
    if system.k() < 2 {
        return Err(Error::Dim("reduction needs at least two equations".into()));
    }
    for i in 1..=system.k() {
        if check_equation(system, i, policy)?.iter().any(|e| !e.holds) {
            return Err(Error::PerEquationInconsistent { equation: i });
        }
    }
    reduce_unchecked(system, policy)
}

pub(crate) fn reduce_unchecked(system: &ChainSystem, policy: &RankPolicy) -> Result<(ChainSystem, ReductionContext)> {
    let eqs = system.equations();
    let contexts = eqs
        .iter()
        .map(|eq| SingleContext::new(eq, policy))
        .collect::<Result<Vec<_>>>()?;

    let mut steps = Vec::with_capacity(eqs.len() - 1);
    for j in 0..eqs.len() - 1 {
        let (cur, next) = (&contexts[j], &contexts[j + 1]);
        let p = Factored::new(cur.lm_ls.hstack(&next.a.left.neg())?, policy)?;
        let q = Factored::new(cur.d.right.vstack(&next.b.right.neg())?, policy)?;

        let x_next = next.particular_first(&eqs[j + 1].e)?;
        let x_prev = cur.particular_second(&eqs[j].e)?;
        let f = clean_difference(&x_next, &x_prev, policy)?;

        let coupling_left = clean_product(&[next.a.pinv(), &next.s.mat], policy)?;
        let coupling_right = clean_product(&[&next.n.right, &next.d.mat, next.b.pinv()], policy)?;

        let hatted = Equation::new(
            clean_product(&[&p.right, &cur.m.left], policy)?,
            clean_product(&[&cur.n.right, &q.left], policy)?,
            clean_product(&[&p.right, &coupling_left], policy)?,
            clean_product(&[&coupling_right, &q.left], policy)?,
            clean_product(&[&p.right, &f, &q.left], policy)?,
        );
        steps.push(ReductionStep {
            p,
            q,
            x_next,
            x_prev,
            f,
            coupling_left,
            coupling_right,
            hatted,
        });
    }

    let hatted = ChainSystem::new(steps.iter().map(|s| s.hatted.clone()).collect())?;
    Ok((
        hatted,
        ReductionContext {
            policy: *policy,
            contexts,
            steps,
        },
    ))
}
