//! Quaternion matrix equations: arithmetic, Moore–Penrose inverses through
//! the complex adjoint, and solvability certificates and constructive
//! solvers for coupled two-sided Sylvester chains
//!
//! ```text
//! A_i X_i B_i + C_i X_{i+1} D_i = E_i,   i = 1..k
//! ```
//!
//! including the η-Hermitian variant `B_i = A_i^{η*}`, `D_i = C_i^{η*}`.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

pub mod chain;
pub mod error;
pub mod eta;
pub mod matrix;
pub mod numlin;
pub mod oracle;
pub mod quat;
pub mod single;

pub use chain::{
    check_chain, solve_chain, ChainSolution, ChainSystem, ConditionId, ConditionKind, Equation, SolvabilityReport,
};
pub use error::{Error, Inconsistency, Result};
pub use eta::{check_eta, solve_eta, EtaChainSystem, EtaEquation, EtaSolution};
pub use matrix::QMatrix;
pub use numlin::RankPolicy;
pub use quat::{EtaUnit, Quaternion};
