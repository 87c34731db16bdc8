use alloc::string::String;
use core::fmt;

use crate::chain::ConditionId;

/// Why a system was declared inconsistent.
#[derive(Clone, Debug, PartialEq)]
pub enum Inconsistency {
    /// A rank equality of the certificate fails.
    Condition(ConditionId),
    /// Equation `equation` (1-based) of the reduced system at recursion
    /// `level` (0 = the original system) has no solution on its own.
    Level { level: usize, equation: usize },
    /// The two-block equation `P·U + V·Q = G` fails its projector test.
    TwoBlock { residual: f64 },
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconsistency::Condition(id) => write!(f, "rank condition {id} fails"),
            Inconsistency::Level { level, equation } => {
                write!(f, "equation {equation} at reduction level {level} is unsolvable")
            }
            Inconsistency::TwoBlock { residual } => {
                write!(f, "||R_P G L_Q||_F = {residual:e} is not negligible")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operand shapes do not conform.
    DimMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    /// A chain or block layout violates a named dimension constraint.
    Dim(String),
    /// A complex matrix does not carry the adjoint block structure.
    StructureViolation {
        residual: f64,
    },
    /// An odd number of adjoint singular values cleared the rank threshold.
    PairingViolation {
        above: usize,
        condition: Option<ConditionId>,
    },
    Inconsistent(Inconsistency),
    /// Equation `equation` (1-based) fails its own solvability conditions.
    PerEquationInconsistent {
        equation: usize,
    },
    /// Right-hand side `equation` (1-based) is not η-Hermitian.
    NotEtaHermitianRhs {
        equation: usize,
        residual: f64,
    },
    /// The real linearization would exceed the configured unknown count.
    SizeCap {
        unknowns: usize,
        cap: usize,
    },
    /// A constructed solution misses the residual budget.
    Residual {
        max_residual: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimMismatch { op, lhs, rhs } => write!(
                f,
                "dimension mismatch in {op}: {}x{} vs {}x{}",
                lhs.0, lhs.1, rhs.0, rhs.1
            ),
            Error::Dim(msg) => write!(f, "dimension error: {msg}"),
            Error::StructureViolation { residual } => {
                write!(f, "complex adjoint structure violated (relative residual {residual:e})")
            }
            Error::PairingViolation { above, condition } => {
                write!(f, "{above} singular values above threshold (expected an even count)")?;
                if let Some(id) = condition {
                    write!(f, " while evaluating {id}")?;
                }
                f.write_str("; adjust the rank tolerance")
            }
            Error::Inconsistent(why) => write!(f, "inconsistent system: {why}"),
            Error::PerEquationInconsistent { equation } => {
                write!(f, "equation {equation} is inconsistent on its own")
            }
            Error::NotEtaHermitianRhs { equation, residual } => write!(
                f,
                "right-hand side E_{equation} is not eta-Hermitian (residual {residual:e})"
            ),
            Error::SizeCap { unknowns, cap } => {
                write!(f, "linearization has {unknowns} real unknowns, cap is {cap}")
            }
            Error::Residual { max_residual } => {
                write!(f, "constructed solution has relative residual {max_residual:e}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
