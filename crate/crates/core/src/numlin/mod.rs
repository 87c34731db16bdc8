//! Numerical kernel: ranks, Moore–Penrose inverses and the projectors
//! `L_A = I − A†A`, `R_A = I − AA†`, all computed through the complex
//! adjoint embedding and a Jacobi SVD.

mod adjoint;
mod block;
mod dense;
pub mod svd;

use alloc::vec::Vec;

use num_complex::Complex64;

pub use adjoint::{from_complex_adjoint, to_complex_adjoint, STRUCTURE_TOL};
pub use block::{block_matrix, BlockGrid};
pub use dense::{ComplexMatrix, DenseMatrix, RealMatrix, Scalar};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;

/// Threshold policy for numerical rank decisions.
///
/// A singular value `σ` of an `r × c` matrix counts toward the rank iff
/// `σ > rel_tol · σ_max · max(r, c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankPolicy {
    pub rel_tol: f64,
}

impl Default for RankPolicy {
    fn default() -> Self {
        Self { rel_tol: 1e-10 }
    }
}

impl RankPolicy {
    pub const DEFAULT_REL_TOL: f64 = 1e-10;

    pub fn new(rel_tol: f64) -> Self {
        Self { rel_tol }
    }

    #[inline]
    pub fn threshold(&self, sigma_max: f64, rows: usize, cols: usize) -> f64 {
        self.rel_tol * sigma_max * rows.max(cols).max(1) as f64
    }

    /// Whether a computed quantity of Frobenius norm `norm`, derived from
    /// operands of combined scale `reference`, is indistinguishable from zero.
    #[inline]
    pub fn negligible(&self, norm: f64, reference: f64, rows: usize, cols: usize) -> bool {
        norm <= self.rel_tol * reference * rows.max(cols).max(1) as f64
    }

    fn kept(&self, sigma: &[f64], rows: usize, cols: usize) -> usize {
        let thr = self.threshold(sigma.first().copied().unwrap_or(0.0), rows, cols);
        sigma.iter().take_while(|&&s| s > thr).count()
    }
}

/// Singular values of `χ(A)` (twice as many as `min(rows, cols)`), descending.
pub fn adjoint_singular_values(a: &QMatrix) -> Vec<f64> {
    svd::svd(&to_complex_adjoint(a)).sigma
}

/// Numerical rank of a quaternion matrix under `policy`.
pub fn rank(a: &QMatrix, policy: &RankPolicy) -> Result<usize> {
    if a.is_empty() {
        return Ok(0);
    }
    let sigma = adjoint_singular_values(a);
    let above = policy.kept(&sigma, 2 * a.rows(), 2 * a.cols());
    if !above.is_multiple_of(2) {
        return Err(Error::PairingViolation { above, condition: None });
    }
    Ok(above / 2)
}

/// Moore–Penrose inverse with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct PinvResult {
    pub pinv: QMatrix,
    pub rank: usize,
    /// Smallest adjoint singular value kept, if any.
    pub sigma_min_kept: Option<f64>,
    /// Largest adjoint singular value discarded, if any.
    pub sigma_max_dropped: Option<f64>,
}

pub fn pinv(a: &QMatrix, policy: &RankPolicy) -> Result<PinvResult> {
    let (m, n) = a.shape();
    if a.is_empty() {
        return Ok(PinvResult {
            pinv: QMatrix::zeros(n, m),
            rank: 0,
            sigma_min_kept: None,
            sigma_max_dropped: None,
        });
    }
    let chi = to_complex_adjoint(a);
    let s = svd::svd(&chi);
    let kept = policy.kept(&s.sigma, 2 * m, 2 * n);
    if !kept.is_multiple_of(2) {
        return Err(Error::PairingViolation {
            above: kept,
            condition: None,
        });
    }
    // χ(A)† = V_r Σ_r⁻¹ U_rᴴ
    let inv = ComplexMatrix::from_fn(2 * n, 2 * m, |r, c| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..kept {
            acc += s.v[(r, k)] * s.u[(c, k)].conj() / s.sigma[k];
        }
        acc
    });
    Ok(PinvResult {
        pinv: from_complex_adjoint(&inv)?,
        rank: kept / 2,
        sigma_min_kept: kept.checked_sub(1).map(|k| s.sigma[k]),
        sigma_max_dropped: s.sigma.get(kept).copied(),
    })
}

/// `L_A = I − A†A` from a precomputed inverse. Exactly zero at full column
/// rank and exactly the identity at rank zero.
pub fn left_projector(a: &QMatrix, p: &PinvResult) -> QMatrix {
    let n = a.cols();
    if p.rank == n {
        QMatrix::zeros(n, n)
    } else if p.rank == 0 {
        QMatrix::identity(n)
    } else {
        QMatrix::identity(n).sub(&p.pinv.mul(a))
    }
}

/// `R_A = I − AA†` from a precomputed inverse. Exactly zero at full row rank
/// and exactly the identity at rank zero.
pub fn right_projector(a: &QMatrix, p: &PinvResult) -> QMatrix {
    let m = a.rows();
    if p.rank == m {
        QMatrix::zeros(m, m)
    } else if p.rank == 0 {
        QMatrix::identity(m)
    } else {
        QMatrix::identity(m).sub(&a.mul(&p.pinv))
    }
}

/// `L_A`, `cols × cols`.
pub fn proj_l(a: &QMatrix, policy: &RankPolicy) -> Result<QMatrix> {
    Ok(left_projector(a, &pinv(a, policy)?))
}

/// `R_A`, `rows × rows`.
pub fn proj_r(a: &QMatrix, policy: &RankPolicy) -> Result<QMatrix> {
    Ok(right_projector(a, &pinv(a, policy)?))
}

/// Product of `factors` that snaps to exact zero when its norm is at
/// roundoff level relative to the product of the factor norms.
///
/// Projector products such as `R_A·C` vanish mathematically whenever the
/// column space of `C` lies inside that of `A`; in floating point they come
/// out as pure roundoff, which a self-relative rank threshold would count as
/// full rank.
pub fn clean_product(factors: &[&QMatrix], policy: &RankPolicy) -> Result<QMatrix> {
    let p = crate::matrix::product(factors)?;
    let reference: f64 = factors.iter().map(|f| f.frobenius_norm()).product();
    let max_dim = factors.iter().map(|f| f.rows().max(f.cols())).max().unwrap_or(1);
    if policy.negligible(p.frobenius_norm(), reference, max_dim, max_dim) {
        Ok(QMatrix::zeros(p.rows(), p.cols()))
    } else {
        Ok(p)
    }
}

/// `a − b`, snapped to exact zero when it is at roundoff level relative to
/// the operands.
pub fn clean_difference(a: &QMatrix, b: &QMatrix, policy: &RankPolicy) -> Result<QMatrix> {
    let d = a.try_sub(b)?;
    let reference = a.frobenius_norm() + b.frobenius_norm();
    if policy.negligible(d.frobenius_norm(), reference, d.rows(), d.cols()) {
        Ok(QMatrix::zeros(d.rows(), d.cols()))
    } else {
        Ok(d)
    }
}
