//! Brute-force consistency test through the real linearization of a chain.
//!
//! Each quaternion entry is four real coordinates, and `X ↦ A·X·B` is
//! ℝ-linear, so the whole chain is one real system `M·x = e`.

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::ChainSystem;
use crate::error::{Error, Result};
// Shadowed by the inherent float methods whenever std is in the build.
use crate::matrix::QMatrix;
use crate::numlin::svd::svd;
use crate::numlin::{RankPolicy, RealMatrix};
use crate::quat::Quaternion;
#[allow(unused_imports)]
use num_traits::Float;

/// Default bound on the number of real unknowns.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// Default relative least-squares residual separating the two verdicts.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-8;

const BASIS: [Quaternion; 4] = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];

/// `M·vec(X_1..X_{k+1}) = vec(E_1..E_k)`.
///
/// Entry `(a, b)` of `X_j`, coordinate `c`, is column
/// `4·(a·cols_j + b) + c` past the offset of `X_j`; rows are laid out the
/// same way over the `E_i`.
#[derive(Clone, Debug)]
pub struct RealLinearization {
    pub m: RealMatrix,
    pub e: Vec<f64>,
    /// First column of every unknown.
    pub col_offsets: Vec<usize>,
    /// First row of every equation.
    pub row_offsets: Vec<usize>,
}

fn offsets(shapes: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut out = vec![0];
    for (r, c) in shapes {
        let last = *out.last().unwrap();
        out.push(last + 4 * r * c);
    }
    out
}

/// Four reals per entry, row-major.
pub fn vectorize(ms: &[QMatrix]) -> Vec<f64> {
    ms.iter()
        .flat_map(|m| m.as_slice().iter().flat_map(|q| q.to_array()))
        .collect()
}

pub fn linearize(system: &ChainSystem) -> Result<RealLinearization> {
    linearize_with_cap(system, DEFAULT_SIZE_CAP)
}

pub fn linearize_with_cap(system: &ChainSystem, cap: usize) -> Result<RealLinearization> {
    let eqs = system.equations();
    let shapes = system.unknown_shapes();
    let col_offsets = offsets(shapes.iter().copied());
    let unknowns = *col_offsets.last().unwrap();
    if unknowns > cap {
        return Err(Error::SizeCap { unknowns, cap });
    }
    let row_offsets = offsets(eqs.iter().map(|eq| eq.e.shape()));
    let mut m = RealMatrix::zeros(*row_offsets.last().unwrap(), unknowns);

    // Column for the basis element `e_c` at (a, b) of the unknown that
    // enters equation `i` through `L·X·R`: entry (p, s) is L[p,a]·e_c·R[b,s].
    let mut place = |i: usize, left: &QMatrix, right: &QMatrix, col0: usize, cols: usize| {
        let (p_rows, s_cols) = eqs[i].e.shape();
        for a in 0..left.cols() {
            for b in 0..right.rows() {
                for (c, unit) in BASIS.iter().enumerate() {
                    let col = col0 + 4 * (a * cols + b) + c;
                    for p in 0..p_rows {
                        let lu = left[(p, a)] * *unit;
                        for s in 0..s_cols {
                            let v = (lu * right[(b, s)]).to_array();
                            let row = row_offsets[i] + 4 * (p * s_cols + s);
                            for d in 0..4 {
                                m[(row + d, col)] += v[d];
                            }
                        }
                    }
                }
            }
        }
    };
    for (i, eq) in eqs.iter().enumerate() {
        place(i, &eq.a, &eq.b, col_offsets[i], shapes[i].1);
        place(i, &eq.c, &eq.d, col_offsets[i + 1], shapes[i + 1].1);
    }

    let rhs: Vec<QMatrix> = eqs.iter().map(|eq| eq.e.clone()).collect();
    Ok(RealLinearization {
        m,
        e: vectorize(&rhs),
        col_offsets,
        row_offsets,
    })
}

impl RealLinearization {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let (rows, cols) = self.m.shape();
        assert_eq!(x.len(), cols, "vector length must match the column count");
        (0..rows)
            .map(|r| (0..cols).map(|c| self.m[(r, c)] * x[c]).sum())
            .collect()
    }
}

/// Outcome of the least-squares test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleVerdict {
    pub consistent: bool,
    /// `‖M·x⋆ − e‖₂ / (1 + ‖e‖₂)`.
    pub residual: f64,
    /// Numerical rank of `M`.
    pub rank: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Least-squares residual through a truncated SVD of `M`, singular values
/// cut with the default rank policy.
pub fn oracle(system: &ChainSystem, tol: f64) -> Result<OracleVerdict> {
    oracle_linearized(&linearize(system)?, tol)
}

pub fn oracle_linearized(lin: &RealLinearization, tol: f64) -> Result<OracleVerdict> {
    let e_norm = norm(&lin.e);
    let (rows, cols) = lin.m.shape();
    if rows == 0 || cols == 0 {
        let residual = e_norm / (1.0 + e_norm);
        return Ok(OracleVerdict {
            consistent: residual <= tol,
            residual,
            rank: 0,
        });
    }
    let f = svd(&lin.m);
    let policy = RankPolicy::default();
    let thr = policy.threshold(f.sigma_max(), rows, cols);
    let rank = f.sigma.iter().take_while(|&&s| s > thr).count();
    // e − U_r·U_rᵀ·e
    let mut rest = lin.e.clone();
    for k in 0..rank {
        let dot: f64 = (0..rows).map(|r| f.u[(r, k)] * lin.e[r]).sum();
        for (r, v) in rest.iter_mut().enumerate() {
            *v -= dot * f.u[(r, k)];
        }
    }
    let residual = norm(&rest) / (1.0 + e_norm);
    Ok(OracleVerdict {
        consistent: residual <= tol,
        residual,
        rank,
    })
}

/// Whether the chain has an exact solution, judged at `tol`.
pub fn oracle_consistent(system: &ChainSystem, tol: f64) -> Result<bool> {
    Ok(oracle(system, tol)?.consistent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{generate, DimSpec, Equation, GenMode};

    fn one(q: Quaternion) -> QMatrix {
        QMatrix::diag(&[q])
    }

    fn scalar_system(a: Quaternion, e: Quaternion) -> ChainSystem {
        let z = QMatrix::zeros(1, 1);
        ChainSystem::new(vec![Equation::new(one(a), one(Quaternion::ONE), z.clone(), z, one(e))]).unwrap()
    }

    #[test]
    fn identity_operator() {
        let lin = linearize(&scalar_system(Quaternion::ONE, Quaternion::new(1.0, 2.0, 3.0, 4.0))).unwrap();
        assert_eq!(lin.m.shape(), (4, 8));
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(lin.m[(r, c)], if r == c { 1.0 } else { 0.0 });
            }
        }
        assert_eq!(lin.e, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn left_multiplication_by_i() {
        let lin = linearize(&scalar_system(Quaternion::I, Quaternion::ZERO)).unwrap();
        // (w, x, y, z) ↦ (−x, w, −z, y)
        let image = lin.apply(&[1.0, 2.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(image, vec![-2.0, 1.0, -4.0, 3.0]);
    }

    #[test]
    fn right_multiplication_by_i() {
        let z = QMatrix::zeros(1, 1);
        let sys = ChainSystem::new(vec![Equation::new(
            one(Quaternion::ONE),
            one(Quaternion::I),
            z.clone(),
            z.clone(),
            z,
        )])
        .unwrap();
        // (w, x, y, z) ↦ (−x, w, z, −y)
        let image = linearize(&sys)
            .unwrap()
            .apply(&[1.0, 2.0, 3.0, 4.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(image, vec![-2.0, 1.0, 4.0, -3.0]);
    }

    #[test]
    fn forward_construction_identity() {
        let g = crate::chain::generate_with(&crate::chain::GenSpec {
            dims: DimSpec::Range(1, 3),
            k: 2,
            seed: 9,
            mode: GenMode::Consistent,
            rank_cap: None,
        });
        let lin = linearize(&g.system).unwrap();
        let image = lin.apply(&vectorize(&g.unknowns));
        let err = image.iter().zip(&lin.e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        assert!(oracle_consistent(&g.system, DEFAULT_ORACLE_TOL).unwrap());
    }

    #[test]
    fn verdict_examples() {
        let z = || QMatrix::zeros(2, 2);
        let sys = ChainSystem::new(vec![Equation::new(z(), z(), z(), z(), QMatrix::identity(2))]).unwrap();
        assert!(!oracle_consistent(&sys, DEFAULT_ORACLE_TOL).unwrap());
        let e = QMatrix::from_real(2, 2, &[1.0, -2.0, 0.5, 3.0]).unwrap();
        let sys = ChainSystem::new(vec![Equation::new(
            QMatrix::identity(2),
            QMatrix::identity(2),
            z(),
            z(),
            e,
        )])
        .unwrap();
        assert!(oracle_consistent(&sys, DEFAULT_ORACLE_TOL).unwrap());
        let sys = generate(DimSpec::Fixed(2), 2, 1, GenMode::Consistent);
        assert!(oracle_consistent(&sys, DEFAULT_ORACLE_TOL).unwrap());
    }

    #[test]
    fn size_cap() {
        let sys = generate(DimSpec::Fixed(3), 2, 1, GenMode::Consistent);
        assert_eq!(
            linearize_with_cap(&sys, 10).unwrap_err(),
            Error::SizeCap { unknowns: 108, cap: 10 }
        );
    }
}
