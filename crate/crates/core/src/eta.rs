//! η-Hermitian solutions of `A_i X_i A_i^{η*} + C_i X_{i+1} C_i^{η*} = E_i`.
//!
//! With `B_i = A_i^{η*}` and `D_i = C_i^{η*}` this is a chain. If `Y` solves
//! that chain and every `E_i` is η-Hermitian, then so does `Y^{η*}`, and
//! `(Y + Y^{η*}) / 2` is an η-Hermitian solution.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::generate::coefficient;
use crate::chain::{
    eta_conditions, evaluate_condition, random_qmatrix, solve_chain, ChainSystem, Equation, GenMode, GenSpec,
    SolvabilityReport,
};
use crate::error::{Error, Result};
use crate::matrix::{product, QMatrix};
use crate::numlin::RankPolicy;
use crate::quat::EtaUnit;

/// Allowed `‖E − E^{η*}‖_F / (1 + ‖E‖_F)`.
pub const ETA_RHS_TOL: f64 = 1e-10;

/// `A: p×q`, `C: p×t`, `E: p×p`.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaEquation {
    pub a: QMatrix,
    pub c: QMatrix,
    pub e: QMatrix,
}

impl EtaEquation {
    pub fn new(a: QMatrix, c: QMatrix, e: QMatrix) -> Self {
        Self { a, c, e }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaChainSystem {
    eta: EtaUnit,
    equations: Vec<EtaEquation>,
}

impl EtaChainSystem {
    /// Checks shapes and coupling. η-Hermitian right-hand sides are checked
    /// later, by [`EtaChainSystem::as_chain`].
    pub fn new(eta: EtaUnit, equations: Vec<EtaEquation>) -> Result<Self> {
        if equations.is_empty() {
            return Err(Error::Dim("a chain needs at least one equation".into()));
        }
        for (idx, eq) in equations.iter().enumerate() {
            let i = idx + 1;
            if eq.c.rows() != eq.a.rows() {
                return Err(Error::Dim(format!("rows(C_{i}) != rows(A_{i})")));
            }
            if eq.e.rows() != eq.a.rows() || eq.e.cols() != eq.a.rows() {
                return Err(Error::Dim(format!("E_{i} must be {0}x{0}", eq.a.rows())));
            }
        }
        for (idx, pair) in equations.windows(2).enumerate() {
            if pair[1].a.cols() != pair[0].c.cols() {
                return Err(Error::Dim(format!("q_{} != t_{}", idx + 2, idx + 1)));
            }
        }
        Ok(Self { eta, equations })
    }

    pub fn eta(&self) -> EtaUnit {
        self.eta
    }

    pub fn k(&self) -> usize {
        self.equations.len()
    }

    pub fn equations(&self) -> &[EtaEquation] {
        &self.equations
    }

    /// Shapes of the square unknowns `X_1..X_{k+1}`.
    pub fn unknown_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.equations.iter().map(|eq| eq.a.cols()).collect();
        sizes.push(self.equations[self.k() - 1].c.cols());
        sizes
    }

    /// The unconstrained chain with `B_i = A_i^{η*}`, `D_i = C_i^{η*}`.
    pub fn as_chain(&self) -> Result<ChainSystem> {
        for (idx, eq) in self.equations.iter().enumerate() {
            let residual = eq.e.distance(&eq.e.eta_conj_transpose(self.eta)) / (1.0 + eq.e.frobenius_norm());
            if residual.is_nan() || residual > ETA_RHS_TOL {
                return Err(Error::NotEtaHermitianRhs {
                    equation: idx + 1,
                    residual,
                });
            }
        }
        let equations = self
            .equations
            .iter()
            .map(|eq| {
                Equation::new(
                    eq.a.clone(),
                    eq.a.eta_conj_transpose(self.eta),
                    eq.c.clone(),
                    eq.c.eta_conj_transpose(self.eta),
                    eq.e.clone(),
                )
            })
            .collect();
        ChainSystem::new(equations)
    }
}

/// Evaluates the `k(k+1)` rank equalities of the η-Hermitian certificate.
pub fn check_eta(system: &EtaChainSystem, policy: &RankPolicy) -> Result<SolvabilityReport> {
    let chain = system.as_chain()?;
    let entries = eta_conditions(system.k())
        .into_iter()
        .map(|id| evaluate_condition(chain.equations(), id, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(SolvabilityReport::from_entries(*policy, entries))
}

/// `(Y + Y^{η*}) / 2`.
pub fn eta_symmetrize(y: &QMatrix, eta: EtaUnit) -> QMatrix {
    y.add(&y.eta_conj_transpose(eta)).scale(0.5)
}

/// η-Hermitian solution set with its residuals against the system.
#[derive(Clone, Debug, PartialEq)]
pub struct EtaSolution {
    pub x: Vec<QMatrix>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Largest `‖X_i − X_i^{η*}‖_F`.
    pub max_asymmetry: f64,
}

/// Solves the unconstrained chain and symmetrizes each unknown.
pub fn solve_eta(system: &EtaChainSystem, policy: &RankPolicy) -> Result<EtaSolution> {
    let chain = system.as_chain()?;
    let y = solve_chain(&chain, policy)?;
    let x: Vec<QMatrix> = y.x.iter().map(|y| eta_symmetrize(y, system.eta)).collect();
    let residuals = chain.residuals(&x)?;
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    if max_residual.is_nan() || max_residual > crate::chain::RESIDUAL_TOL {
        return Err(Error::Residual { max_residual });
    }
    let max_asymmetry = x
        .iter()
        .map(|x| x.distance(&x.eta_conj_transpose(system.eta)))
        .fold(0.0, f64::max);
    Ok(EtaSolution {
        x,
        residuals,
        max_residual,
        max_asymmetry,
    })
}

/// Forward construction from random η-Hermitian unknowns. In
/// [`GenMode::Perturbed`] one `E_i` gets an η-Hermitian random matrix added;
/// [`GenMode::Decoupled`] uses an independent `X_{i+1}` in every equation.
pub fn generate_eta(spec: &GenSpec, eta: EtaUnit) -> (EtaChainSystem, Vec<QMatrix>) {
    assert!(spec.k >= 1, "k must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.k;
    let sizes: Vec<usize> = (0..=k).map(|_| spec.dims.draw(&mut rng)).collect();
    let rows: Vec<usize> = (0..k).map(|_| spec.dims.draw(&mut rng)).collect();
    let mut equations: Vec<EtaEquation> = (0..k)
        .map(|i| {
            let a = coefficient(&mut rng, rows[i], sizes[i], spec.rank_cap);
            let c = coefficient(&mut rng, rows[i], sizes[i + 1], spec.rank_cap);
            EtaEquation::new(a, c, QMatrix::zeros(rows[i], rows[i]))
        })
        .collect();
    let herm = |rng: &mut ChaCha8Rng, n: usize| eta_symmetrize(&random_qmatrix(rng, n, n), eta);
    let unknowns: Vec<QMatrix> = sizes.iter().map(|&n| herm(&mut rng, n)).collect();
    for (i, eq) in equations.iter_mut().enumerate() {
        let next = match spec.mode {
            GenMode::Decoupled => herm(&mut rng, sizes[i + 1]),
            _ => unknowns[i + 1].clone(),
        };
        let left = product(&[&eq.a, &unknowns[i], &eq.a.eta_conj_transpose(eta)]).expect("generated shapes conform");
        let right = product(&[&eq.c, &next, &eq.c.eta_conj_transpose(eta)]).expect("generated shapes conform");
        // Symmetrize away the roundoff so the right-hand side is exactly η-Hermitian.
        eq.e = eta_symmetrize(&left.add(&right), eta);
    }
    if spec.mode == GenMode::Perturbed {
        let idx = rng.gen_range(0..k);
        let noise = herm(&mut rng, rows[idx]);
        equations[idx].e = equations[idx].e.add(&noise);
    }
    let system = EtaChainSystem::new(eta, equations).expect("generated shapes conform");
    (system, unknowns)
}


#[cfg(test)]
mod gen_tests {
    use super::*;
    use crate::chain::DimSpec;

    #[test]
    fn generated_systems_are_consistent() {
        for eta in EtaUnit::ALL {
            let spec = GenSpec {
                dims: DimSpec::Range(1, 3),
                k: 2,
                seed: 4,
                mode: GenMode::Consistent,
                rank_cap: None,
            };
            let (sys, xs) = generate_eta(&spec, eta);
            for x in &xs {
                assert!(x.distance(&x.eta_conj_transpose(eta)) < 1e-15);
            }
            assert!(check_eta(&sys, &RankPolicy::default()).unwrap().overall);
            assert!(solve_eta(&sys, &RankPolicy::default()).unwrap().max_asymmetry < 1e-10);
        }
    }
}
