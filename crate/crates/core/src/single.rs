//! The single equation `A·X₁·B + C·X₂·D = E`: projector and rank
//! solvability criteria, and the explicit general solution.
//!
//! With `M = R_A·C`, `N = D·L_B`, `S = C·L_M`:
//!
//! ```text
//! X₁ = A†EB† − A†CM†EB† − A†SC†EN†DB† − A†S·Y₁·R_N·DB† + L_A·Y₂ + Y₃·R_B
//! X₂ = M†ED† + S†SC†EN† + L_M·L_S·Y₄ + Y₅·R_D + L_M·Y₁·R_N
//! ```

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{check_equation, ChainSystem, Equation, ReportEntry, SingleEquation};
use crate::error::{Error, Inconsistency, Result};
use crate::matrix::{product, QMatrix};
use crate::numlin::{clean_product, left_projector, pinv, right_projector, PinvResult, RankPolicy};

/// A matrix together with its Moore–Penrose inverse and both projectors.
#[derive(Clone, Debug)]
pub struct Factored {
    pub mat: QMatrix,
    pub inv: PinvResult,
    /// `L = I − A†A`.
    pub left: QMatrix,
    /// `R = I − AA†`.
    pub right: QMatrix,
}

impl Factored {
    pub fn new(mat: QMatrix, policy: &RankPolicy) -> Result<Self> {
        let inv = pinv(&mat, policy)?;
        let left = left_projector(&mat, &inv);
        let right = right_projector(&mat, &inv);
        Ok(Self { mat, inv, left, right })
    }

    #[inline]
    pub fn pinv(&self) -> &QMatrix {
        &self.inv.pinv
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.inv.rank
    }
}

/// Derived matrices and cached inverses for one equation.
#[derive(Clone, Debug)]
pub struct SingleContext {
    pub a: Factored,
    pub b: Factored,
    pub c: Factored,
    pub d: Factored,
    /// `M = R_A·C`.
    pub m: Factored,
    /// `N = D·L_B`.
    pub n: Factored,
    /// `S = C·L_M`.
    pub s: Factored,
    /// `L_M·L_S`.
    pub lm_ls: QMatrix,
}

impl SingleContext {
    pub fn new(eq: &SingleEquation, policy: &RankPolicy) -> Result<Self> {
        let a = Factored::new(eq.a.clone(), policy)?;
        let b = Factored::new(eq.b.clone(), policy)?;
        let c = Factored::new(eq.c.clone(), policy)?;
        let d = Factored::new(eq.d.clone(), policy)?;
        let m = Factored::new(clean_product(&[&a.right, &eq.c], policy)?, policy)?;
        let n = Factored::new(clean_product(&[&eq.d, &b.left], policy)?, policy)?;
        let s = Factored::new(clean_product(&[&eq.c, &m.left], policy)?, policy)?;
        let lm_ls = clean_product(&[&m.left, &s.left], policy)?;
        Ok(Self {
            a,
            b,
            c,
            d,
            m,
            n,
            s,
            lm_ls,
        })
    }

    /// `A†EB† − A†CM†EB† − A†SC†EN†DB†`: the first unknown with zero parameters.
    pub fn particular_first(&self, e: &QMatrix) -> Result<QMatrix> {
        let (ap, bp) = (self.a.pinv(), self.b.pinv());
        let t1 = product(&[ap, e, bp])?;
        let t2 = product(&[ap, &self.c.mat, self.m.pinv(), e, bp])?;
        let t3 = product(&[ap, &self.s.mat, self.c.pinv(), e, self.n.pinv(), &self.d.mat, bp])?;
        Ok(t1.sub(&t2).sub(&t3))
    }

    /// `M†ED† + S†SC†EN†`: the second unknown with zero parameters.
    pub fn particular_second(&self, e: &QMatrix) -> Result<QMatrix> {
        let t1 = product(&[self.m.pinv(), e, self.d.pinv()])?;
        let t2 = product(&[self.s.pinv(), &self.s.mat, self.c.pinv(), e, self.n.pinv()])?;
        Ok(t1.add(&t2))
    }

    /// First unknown with `Y₁`, and `Y₂`, `Y₃` entering as `L_A·Y₂ + Y₃·R_B`.
    pub fn first(&self, e: &QMatrix, y1: &QMatrix, y2: &QMatrix, y3: &QMatrix) -> Result<QMatrix> {
        let base = self.particular_first(e)?;
        let coupled = product(&[
            self.a.pinv(),
            &self.s.mat,
            y1,
            &self.n.right,
            &self.d.mat,
            self.b.pinv(),
        ])?;
        let free = self.a.left.try_mul(y2)?.try_add(&y3.try_mul(&self.b.right)?)?;
        base.try_sub(&coupled)?.try_add(&free)
    }

    /// Second unknown with `Y₁`, and `Y₄`, `Y₅` entering as `L_M·L_S·Y₄ + Y₅·R_D`.
    pub fn second(&self, e: &QMatrix, y1: &QMatrix, y4: &QMatrix, y5: &QMatrix) -> Result<QMatrix> {
        let base = self.particular_second(e)?;
        let coupled = product(&[&self.m.left, y1, &self.n.right])?;
        let free = self.lm_ls.try_mul(y4)?.try_add(&y5.try_mul(&self.d.right)?)?;
        base.try_add(&coupled)?.try_add(&free)
    }
}

/// Free parameters of the general solution.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleParams {
    /// `t × u`, shared between both unknowns.
    pub y1: QMatrix,
    /// `q × r`.
    pub y2: QMatrix,
    /// `q × r`.
    pub y3: QMatrix,
    /// `t × u`.
    pub y4: QMatrix,
    /// `t × u`.
    pub y5: QMatrix,
}

impl SingleParams {
    pub fn zeros(eq: &SingleEquation) -> Self {
        let (q, r) = eq.first_unknown();
        let (t, u) = eq.second_unknown();
        Self {
            y1: QMatrix::zeros(t, u),
            y2: QMatrix::zeros(q, r),
            y3: QMatrix::zeros(q, r),
            y4: QMatrix::zeros(t, u),
            y5: QMatrix::zeros(t, u),
        }
    }
}

/// Outcome of the projector criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorCheck {
    pub holds: bool,
    /// Frobenius norms of `R_M R_A E`, `E L_B L_N`, `R_A E L_D`, `R_C E L_B`.
    pub residuals: [f64; 4],
}

/// Solvable iff `R_M R_A E = 0`, `E L_B L_N = 0`, `R_A E L_D = 0` and
/// `R_C E L_B = 0`, each judged against `‖E‖_F`.
pub fn check_single_projector(eq: &SingleEquation, policy: &RankPolicy) -> Result<ProjectorCheck> {
    eq.validate(1)?;
    let ctx = SingleContext::new(eq, policy)?;
    let e = &eq.e;
    let products = [
        product(&[&ctx.m.right, &ctx.a.right, e])?,
        product(&[e, &ctx.b.left, &ctx.n.left])?,
        product(&[&ctx.a.right, e, &ctx.d.left])?,
        product(&[&ctx.c.right, e, &ctx.b.left])?,
    ];
    let scale = e.frobenius_norm();
    let mut residuals = [0.0; 4];
    let mut holds = true;
    for (slot, p) in residuals.iter_mut().zip(&products) {
        *slot = p.frobenius_norm();
        holds &= policy.negligible(*slot, scale, p.rows(), p.cols());
    }
    Ok(ProjectorCheck { holds, residuals })
}

/// The four rank equalities of the equation.
pub fn check_single_rank(eq: &SingleEquation, policy: &RankPolicy) -> Result<Vec<ReportEntry>> {
    let sys = ChainSystem::new(vec![eq.clone()])?;
    check_equation(&sys, 1, policy)
}

/// Builds `(X₁, X₂)` from the general solution at `params`. Fails with
/// `Inconsistent` naming the first violated rank equality.
pub fn solve_single(eq: &SingleEquation, params: &SingleParams, policy: &RankPolicy) -> Result<(QMatrix, QMatrix)> {
    if let Some(fail) = check_single_rank(eq, policy)?.into_iter().find(|e| !e.holds) {
        return Err(Error::Inconsistent(Inconsistency::Condition(fail.id)));
    }
    let ctx = SingleContext::new(eq, policy)?;
    let x1 = ctx.first(&eq.e, &params.y1, &params.y2, &params.y3)?;
    let x2 = ctx.second(&eq.e, &params.y1, &params.y4, &params.y5)?;
    Ok((x1, x2))
}

/// Particular solution `U = P†G`, `V = R_P·G·Q†` of `P·U + V·Q = G`,
/// without the solvability test.
pub(crate) fn two_block_particular(p: &Factored, q: &Factored, g: &QMatrix) -> Result<(QMatrix, QMatrix)> {
    let u = p.pinv().try_mul(g)?;
    let v = product(&[&p.right, g, q.pinv()])?;
    Ok((u, v))
}

/// Solves `P·U + V·Q = G`, which is solvable iff `R_P·G·L_Q = 0`.
pub fn solve_two_block(p: &QMatrix, q: &QMatrix, g: &QMatrix, policy: &RankPolicy) -> Result<(QMatrix, QMatrix)> {
    if p.rows() != g.rows() || q.cols() != g.cols() {
        return Err(Error::DimMismatch {
            op: "two-block equation",
            lhs: (p.rows(), q.cols()),
            rhs: g.shape(),
        });
    }
    let pf = Factored::new(p.clone(), policy)?;
    let qf = Factored::new(q.clone(), policy)?;
    let obstruction = product(&[&pf.right, g, &qf.left])?;
    let residual = obstruction.frobenius_norm();
    if !policy.negligible(residual, g.frobenius_norm(), obstruction.rows(), obstruction.cols()) {
        return Err(Error::Inconsistent(Inconsistency::TwoBlock { residual }));
    }
    two_block_particular(&pf, &qf, g)
}

/// Shorthand for an [`Equation`] used at the single-equation level.
pub fn single(a: QMatrix, b: QMatrix, c: QMatrix, d: QMatrix, e: QMatrix) -> SingleEquation {
    Equation::new(a, b, c, d, e)
}
