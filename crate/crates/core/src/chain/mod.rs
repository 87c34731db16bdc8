//! Coupled two-sided Sylvester chains
//! `A_i X_i B_i + C_i X_{i+1} D_i = E_i`, `i = 1..k`.
//!
//! [`check_chain`] evaluates the full rank certificate; [`reduce`] performs
//! one inductive elimination step and [`solve_chain`] recurses on it to
//! construct a solution.

mod conditions;
pub(crate) mod generate;
mod reduce;
mod solve;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

pub use conditions::{build_condition, conditions, eta_conditions, ConditionId, ConditionKind};
pub use generate::{
    generate, generate_with, mixed_instance, one_sided_chain, random_qmatrix, Coefficient, DimSpec, GenMode, GenSpec,
    Generated,
};
pub use reduce::{reduce, FactResiduals, ReductionContext, ReductionStep};
pub use solve::{solve_chain, ChainSolution, RESIDUAL_TOL};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::numlin::{rank, RankPolicy};

/// One equation `A·X·B + C·X'·D = E` with `A: p×q`, `B: r×s`, `C: p×t`,
/// `D: u×s`, `E: p×s`. The unknowns are `X: q×r` and `X': t×u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub a: QMatrix,
    pub b: QMatrix,
    pub c: QMatrix,
    pub d: QMatrix,
    pub e: QMatrix,
}

impl Equation {
    pub fn new(a: QMatrix, b: QMatrix, c: QMatrix, d: QMatrix, e: QMatrix) -> Self {
        Self { a, b, c, d, e }
    }

    /// Checks the five shape constraints; `index` is 1-based and used only
    /// in messages.
    pub fn validate(&self, index: usize) -> Result<()> {
        let i = index;
        let checks = [
            (self.c.rows() == self.a.rows(), format!("rows(C_{i}) != rows(A_{i})")),
            (self.e.rows() == self.a.rows(), format!("rows(E_{i}) != rows(A_{i})")),
            (self.d.cols() == self.b.cols(), format!("cols(D_{i}) != cols(B_{i})")),
            (self.e.cols() == self.b.cols(), format!("cols(E_{i}) != cols(B_{i})")),
        ];
        match checks.into_iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::Dim(msg)),
            None => Ok(()),
        }
    }

    /// Shape of the first unknown, `q × r`.
    pub fn first_unknown(&self) -> (usize, usize) {
        (self.a.cols(), self.b.rows())
    }

    /// Shape of the second unknown, `t × u`.
    pub fn second_unknown(&self) -> (usize, usize) {
        (self.c.cols(), self.d.rows())
    }

    /// `A·X·B + C·X'·D`.
    pub fn apply(&self, x: &QMatrix, x_next: &QMatrix) -> Result<QMatrix> {
        let left = self.a.try_mul(x)?.try_mul(&self.b)?;
        let right = self.c.try_mul(x_next)?.try_mul(&self.d)?;
        left.try_add(&right)
    }

    /// `‖A·X·B + C·X'·D − E‖_F / (1 + ‖E‖_F)`.
    pub fn relative_residual(&self, x: &QMatrix, x_next: &QMatrix) -> Result<f64> {
        let lhs = self.apply(x, x_next)?;
        Ok(lhs.try_sub(&self.e)?.frobenius_norm() / (1.0 + self.e.frobenius_norm()))
    }
}

/// Single-equation alias used by the lemma-level API.
pub type SingleEquation = Equation;

/// A validated chain of `k ≥ 1` equations sharing consecutive unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSystem {
    equations: Vec<Equation>,
}

/// Confirms every per-equation shape constraint and the coupling
/// `q_{i+1} = t_i`, `r_{i+1} = u_i`.
pub fn validate(equations: &[Equation]) -> Result<()> {
    if equations.is_empty() {
        return Err(Error::Dim("a chain needs at least one equation".into()));
    }
    for (idx, eq) in equations.iter().enumerate() {
        eq.validate(idx + 1)?;
    }
    for (idx, pair) in equations.windows(2).enumerate() {
        let (i, next) = (idx + 1, idx + 2);
        if pair[1].a.cols() != pair[0].c.cols() {
            return Err(Error::Dim(format!("q_{next} != t_{i}")));
        }
        if pair[1].b.rows() != pair[0].d.rows() {
            return Err(Error::Dim(format!("r_{next} != u_{i}")));
        }
    }
    Ok(())
}

impl ChainSystem {
    pub fn new(equations: Vec<Equation>) -> Result<Self> {
        validate(&equations)?;
        Ok(Self { equations })
    }

    /// Number of equations.
    pub fn k(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn equation(&self, i: usize) -> &Equation {
        &self.equations[i]
    }

    pub fn into_equations(self) -> Vec<Equation> {
        self.equations
    }

    /// Shapes of `X_1..X_{k+1}`.
    pub fn unknown_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes: Vec<_> = self.equations.iter().map(Equation::first_unknown).collect();
        shapes.push(self.equations[self.k() - 1].second_unknown());
        shapes
    }

    /// Left-hand sides for candidate unknowns `X_1..X_{k+1}`.
    pub fn apply(&self, xs: &[QMatrix]) -> Result<Vec<QMatrix>> {
        self.check_unknowns(xs)?;
        self.equations
            .iter()
            .enumerate()
            .map(|(i, eq)| eq.apply(&xs[i], &xs[i + 1]))
            .collect()
    }

    /// Per-equation relative residuals `‖LHS_i − E_i‖_F / (1 + ‖E_i‖_F)`.
    pub fn residuals(&self, xs: &[QMatrix]) -> Result<Vec<f64>> {
        self.check_unknowns(xs)?;
        self.equations
            .iter()
            .enumerate()
            .map(|(i, eq)| eq.relative_residual(&xs[i], &xs[i + 1]))
            .collect()
    }

    fn check_unknowns(&self, xs: &[QMatrix]) -> Result<()> {
        if xs.len() != self.k() + 1 {
            return Err(Error::Dim(format!(
                "expected {} unknowns, got {}",
                self.k() + 1,
                xs.len()
            )));
        }
        for (j, (x, shape)) in xs.iter().zip(self.unknown_shapes()).enumerate() {
            if x.shape() != shape {
                return Err(Error::Dim(format!(
                    "X_{} is {}x{}, expected {}x{}",
                    j + 1,
                    x.rows(),
                    x.cols(),
                    shape.0,
                    shape.1
                )));
            }
        }
        Ok(())
    }

    /// Copy with `E_i` replaced by `rhs[i]`.
    pub fn with_rhs(&self, rhs: Vec<QMatrix>) -> Result<Self> {
        let equations = self
            .equations
            .iter()
            .zip(rhs)
            .map(|(eq, e)| Equation { e, ..eq.clone() })
            .collect();
        Self::new(equations)
    }
}

/// One evaluated rank equality.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportEntry {
    pub id: ConditionId,
    pub lhs_rank: usize,
    /// Ranks of the right-hand parts, in printed order.
    pub rhs_ranks: Vec<usize>,
    pub rhs_rank: usize,
    pub holds: bool,
}

/// A complete rank certificate for a system.
#[derive(Clone, Debug, PartialEq)]
pub struct SolvabilityReport {
    pub policy: RankPolicy,
    pub entries: Vec<ReportEntry>,
    pub overall: bool,
}

impl SolvabilityReport {
    pub fn from_entries(policy: RankPolicy, entries: Vec<ReportEntry>) -> Self {
        let overall = entries.iter().all(|e| e.holds);
        Self {
            policy,
            entries,
            overall,
        }
    }

    pub fn first_failure(&self) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| !e.holds)
    }
}

impl fmt::Display for SolvabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "{:<24} lhs={:<3} rhs={:<3} {}",
                alloc::string::ToString::to_string(&e.id),
                e.lhs_rank,
                e.rhs_rank,
                if e.holds { "ok" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "overall: {}",
            if self.overall { "consistent" } else { "inconsistent" }
        )
    }
}

/// Evaluates one condition against `equations` (which must already be a
/// valid chain).
pub fn evaluate_condition(equations: &[Equation], id: ConditionId, policy: &RankPolicy) -> Result<ReportEntry> {
    let attach = |e: Error| match e {
        Error::PairingViolation { above, .. } => Error::PairingViolation {
            above,
            condition: Some(id),
        },
        other => other,
    };
    let (lhs, parts) = conditions::build(equations, id)?;
    let lhs_rank = rank(&lhs, policy).map_err(attach)?;
    let rhs_ranks = parts
        .iter()
        .map(|p| rank(p, policy).map_err(attach))
        .collect::<Result<Vec<_>>>()?;
    let rhs_rank = rhs_ranks.iter().sum();
    Ok(ReportEntry {
        id,
        lhs_rank,
        rhs_ranks,
        rhs_rank,
        holds: lhs_rank == rhs_rank,
    })
}

/// Evaluates every rank equality of the certificate for `system`; the
/// report has exactly `2k(k+1)` entries.
pub fn check_chain(system: &ChainSystem, policy: &RankPolicy) -> Result<SolvabilityReport> {
    let entries = conditions(system.k())
        .into_iter()
        .map(|id| evaluate_condition(system.equations(), id, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(SolvabilityReport::from_entries(*policy, entries))
}

/// The four single-equation conditions for equation `i` (1-based).
pub fn check_equation(system: &ChainSystem, i: usize, policy: &RankPolicy) -> Result<Vec<ReportEntry>> {
    ConditionKind::SINGLE
        .iter()
        .map(|&kind| evaluate_condition(system.equations(), ConditionId::single(kind, i), policy))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion;
    use alloc::vec;

    fn sq(n: usize, v: f64) -> QMatrix {
        QMatrix::from_fn(n, n, |r, c| Quaternion::new(v + r as f64, c as f64 * 0.5, -v, 0.25))
    }

    fn eq(n: usize) -> Equation {
        Equation::new(sq(n, 1.0), sq(n, 2.0), sq(n, 3.0), sq(n, 4.0), sq(n, 5.0))
    }

    #[test]
    fn validate_examples() {
        assert!(ChainSystem::new(vec![eq(1)]).is_ok());
        assert!(ChainSystem::new(vec![eq(2), eq(2), eq(2)]).is_ok());
        let mut second = eq(2);
        second.a = QMatrix::zeros(2, 3);
        let err = ChainSystem::new(vec![eq(2), second]).unwrap_err();
        assert_eq!(err, Error::Dim("q_2 != t_1".into()));
        let mut second = eq(2);
        second.b = QMatrix::zeros(3, 2);
        let err = ChainSystem::new(vec![eq(2), second]).unwrap_err();
        assert_eq!(err, Error::Dim("r_2 != u_1".into()));
        assert!(ChainSystem::new(vec![]).is_err());
        let mut bad = eq(2);
        bad.e = QMatrix::zeros(3, 2);
        assert_eq!(
            ChainSystem::new(vec![bad]).unwrap_err(),
            Error::Dim("rows(E_1) != rows(A_1)".into())
        );
    }

    #[test]
    fn identity_chain_is_consistent() {
        let n = 2;
        let mk = || {
            Equation::new(
                QMatrix::identity(n),
                QMatrix::identity(n),
                QMatrix::zeros(n, n),
                QMatrix::zeros(n, n),
                QMatrix::zeros(n, n),
            )
        };
        let sys = ChainSystem::new(vec![mk(), mk()]).unwrap();
        let report = check_chain(&sys, &RankPolicy::default()).unwrap();
        assert_eq!(report.entries.len(), 12);
        assert!(report.overall);
    }

    #[test]
    fn zero_coefficients_fail_row_block() {
        let n = 2;
        let e = QMatrix::identity(n);
        let sys = ChainSystem::new(vec![Equation::new(
            QMatrix::zeros(n, n),
            QMatrix::zeros(n, n),
            QMatrix::zeros(n, n),
            QMatrix::zeros(n, n),
            e,
        )])
        .unwrap();
        let report = check_chain(&sys, &RankPolicy::default()).unwrap();
        assert!(!report.overall);
        let fail = report.first_failure().unwrap();
        assert_eq!(fail.id, ConditionId::single(ConditionKind::RowBlock, 1));
        assert_eq!((fail.lhs_rank, fail.rhs_rank), (2, 0));
    }
}
