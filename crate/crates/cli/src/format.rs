//! JSON problem, report and solution files.
//!
//! Quaternions are written as `[w, x, y, z]` and matrices as
//! `{"rows", "cols", "data"}` with `data` a row-major array of rows.

use std::fmt;

use qsylv_core::chain::{ChainSystem, ConditionId, ConditionKind, Equation, ReportEntry, SolvabilityReport};
use qsylv_core::eta::{EtaChainSystem, EtaEquation};
use qsylv_core::{EtaUnit, QMatrix, Quaternion, RankPolicy};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

/// A schema or validation failure, located by JSON pointer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub pointer: String,
    pub message: String,
}

impl ParseError {
    fn at(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pointer.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "at {}: {}", self.pointer, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

fn from_slice<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ParseError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let ptr = pointer(e.path());
        let inner = e.into_inner();
        ParseError::at(ptr, inner.to_string())
    })?;
    Ok(value)
}

/// Compact JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("file types always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 4]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &QMatrix) -> Self {
        let data = (0..m.rows())
            .map(|r| m.row(r).iter().map(|q| [q.w, q.x, q.y, q.z]).collect())
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }

    /// `at` is the pointer of this matrix, used in error messages.
    pub fn to_matrix(&self, at: &str) -> Result<QMatrix, ParseError> {
        if self.data.len() != self.rows {
            return Err(ParseError::at(
                format!("{at}/data"),
                format!("expected {} rows, found {}", self.rows, self.data.len()),
            ));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for (r, row) in self.data.iter().enumerate() {
            if row.len() != self.cols {
                return Err(ParseError::at(
                    format!("{at}/data/{r}"),
                    format!("expected {} columns, found {}", self.cols, row.len()),
                ));
            }
            for (c, q) in row.iter().enumerate() {
                if !q.iter().all(|v| v.is_finite()) {
                    return Err(ParseError::at(format!("{at}/data/{r}/{c}"), "non-finite entry"));
                }
                entries.push(Quaternion::new(q[0], q[1], q[2], q[3]));
            }
        }
        Ok(QMatrix::from_vec(self.rows, self.cols, entries).expect("length checked above"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Chain,
    Eta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaName {
    I,
    J,
    K,
}

impl From<EtaUnit> for EtaName {
    fn from(eta: EtaUnit) -> Self {
        match eta {
            EtaUnit::I => EtaName::I,
            EtaUnit::J => EtaName::J,
            EtaUnit::K => EtaName::K,
        }
    }
}

impl From<EtaName> for EtaUnit {
    fn from(eta: EtaName) -> Self {
        match eta {
            EtaName::I => EtaUnit::I,
            EtaName::J => EtaUnit::J,
            EtaName::K => EtaUnit::K,
        }
    }
}

/// One equation record. Chain equations carry all five matrices; η
/// equations carry only `A`, `C` and `E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationJson {
    #[serde(rename = "A")]
    pub a: MatrixJson,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixJson>,
    #[serde(rename = "C")]
    pub c: MatrixJson,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<MatrixJson>,
    #[serde(rename = "E")]
    pub e: MatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub kind: ProblemKind,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaName>,
    /// Generator seed, when the problem was produced by `gen`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub equations: Vec<EquationJson>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    Chain(ChainSystem),
    Eta(EtaChainSystem),
}

fn check_version(version: u32) -> Result<(), ParseError> {
    if version != FORMAT_VERSION {
        return Err(ParseError::at("/version", format!("unsupported version {version}")));
    }
    Ok(())
}

pub fn parse_problem(bytes: &[u8]) -> Result<ProblemFile, ParseError> {
    let file: ProblemFile = from_slice(bytes)?;
    check_version(file.version)?;
    Ok(file)
}

impl ProblemFile {
    pub fn from_chain(system: &ChainSystem, seed: Option<u64>) -> Self {
        let equations = system
            .equations()
            .iter()
            .map(|eq| EquationJson {
                a: MatrixJson::from_matrix(&eq.a),
                b: Some(MatrixJson::from_matrix(&eq.b)),
                c: MatrixJson::from_matrix(&eq.c),
                d: Some(MatrixJson::from_matrix(&eq.d)),
                e: MatrixJson::from_matrix(&eq.e),
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            kind: ProblemKind::Chain,
            k: system.k(),
            eta: None,
            seed,
            equations,
        }
    }

    pub fn from_eta(system: &EtaChainSystem, seed: Option<u64>) -> Self {
        let equations = system
            .equations()
            .iter()
            .map(|eq| EquationJson {
                a: MatrixJson::from_matrix(&eq.a),
                b: None,
                c: MatrixJson::from_matrix(&eq.c),
                d: None,
                e: MatrixJson::from_matrix(&eq.e),
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            kind: ProblemKind::Eta,
            k: system.k(),
            eta: Some(system.eta().into()),
            seed,
            equations,
        }
    }

    /// Builds the validated system. Dimension errors from the library are
    /// reported against `/equations`.
    pub fn to_problem(&self) -> Result<Problem, ParseError> {
        if self.k == 0 {
            return Err(ParseError::at("/k", "k must be positive"));
        }
        if self.k != self.equations.len() {
            return Err(ParseError::at(
                "/k",
                format!("k = {} but {} equations given", self.k, self.equations.len()),
            ));
        }
        let dim = |e: qsylv_core::Error| ParseError::at("/equations", e.to_string());
        match self.kind {
            ProblemKind::Chain => {
                if self.eta.is_some() {
                    return Err(ParseError::at("/eta", "only eta problems name a unit"));
                }
                let mut eqs = Vec::with_capacity(self.k);
                for (i, eq) in self.equations.iter().enumerate() {
                    let at = format!("/equations/{i}");
                    let need = |m: &Option<MatrixJson>, name: &str| {
                        m.as_ref()
                            .ok_or_else(|| ParseError::at(format!("{at}/{name}"), "missing for a chain problem"))
                            .and_then(|m| m.to_matrix(&format!("{at}/{name}")))
                    };
                    eqs.push(Equation::new(
                        eq.a.to_matrix(&format!("{at}/A"))?,
                        need(&eq.b, "B")?,
                        eq.c.to_matrix(&format!("{at}/C"))?,
                        need(&eq.d, "D")?,
                        eq.e.to_matrix(&format!("{at}/E"))?,
                    ));
                }
                ChainSystem::new(eqs).map(Problem::Chain).map_err(dim)
            }
            ProblemKind::Eta => {
                let eta = self
                    .eta
                    .ok_or_else(|| ParseError::at("/eta", "missing for an eta problem"))?;
                let mut eqs = Vec::with_capacity(self.k);
                for (i, eq) in self.equations.iter().enumerate() {
                    let at = format!("/equations/{i}");
                    for (m, name) in [(&eq.b, "B"), (&eq.d, "D")] {
                        if m.is_some() {
                            return Err(ParseError::at(format!("{at}/{name}"), "not allowed in an eta problem"));
                        }
                    }
                    eqs.push(EtaEquation::new(
                        eq.a.to_matrix(&format!("{at}/A"))?,
                        eq.c.to_matrix(&format!("{at}/C"))?,
                        eq.e.to_matrix(&format!("{at}/E"))?,
                    ));
                }
                EtaChainSystem::new(eta.into(), eqs).map(Problem::Eta).map_err(dim)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyJson {
    pub rel_tol: f64,
}

impl From<RankPolicy> for PolicyJson {
    fn from(p: RankPolicy) -> Self {
        Self { rel_tol: p.rel_tol }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    /// Condition family, e.g. `row_block` or `stair_ad`.
    pub kind: String,
    /// Equation index, or the window start for staircase conditions.
    pub first: usize,
    /// Equal to `first` for single-equation conditions.
    pub last: usize,
    pub lhs_rank: usize,
    pub rhs_ranks: Vec<usize>,
    pub rhs_rank: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub version: u32,
    pub kind: String,
    pub policy: PolicyJson,
    pub overall: bool,
    pub entries: Vec<EntryJson>,
}

impl ReportFile {
    pub const KIND: &'static str = "report";

    pub fn from_report(report: &SolvabilityReport) -> Self {
        let entries = report
            .entries
            .iter()
            .map(|e| EntryJson {
                kind: e.id.kind.name().to_string(),
                first: e.id.first,
                last: e.id.last,
                lhs_rank: e.lhs_rank,
                rhs_ranks: e.rhs_ranks.clone(),
                rhs_rank: e.rhs_rank,
                holds: e.holds,
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            kind: Self::KIND.into(),
            policy: report.policy.into(),
            overall: report.overall,
            entries,
        }
    }

    pub fn to_report(&self) -> Result<SolvabilityReport, ParseError> {
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let kind = ConditionKind::parse(&e.kind).ok_or_else(|| {
                    ParseError::at(format!("/entries/{i}/kind"), format!("unknown condition `{}`", e.kind))
                })?;
                Ok(ReportEntry {
                    id: ConditionId {
                        kind,
                        first: e.first,
                        last: e.last,
                    },
                    lhs_rank: e.lhs_rank,
                    rhs_ranks: e.rhs_ranks.clone(),
                    rhs_rank: e.rhs_rank,
                    holds: e.holds,
                })
            })
            .collect::<Result<Vec<_>, ParseError>>()?;
        Ok(SolvabilityReport::from_entries(
            RankPolicy::new(self.policy.rel_tol),
            entries,
        ))
    }
}

pub fn parse_report(bytes: &[u8]) -> Result<ReportFile, ParseError> {
    let file: ReportFile = from_slice(bytes)?;
    check_version(file.version)?;
    expect_kind(&file.kind, ReportFile::KIND)?;
    Ok(file)
}

fn expect_kind(found: &str, want: &str) -> Result<(), ParseError> {
    if found != want {
        return Err(ParseError::at(
            "/kind",
            format!("expected \"{want}\", found \"{found}\""),
        ));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub version: u32,
    pub kind: String,
    pub policy: PolicyJson,
    /// Seed of the problem this solves, when it was generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<EtaName>,
    /// `X_1..X_{k+1}`.
    pub x: Vec<MatrixJson>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_asymmetry: Option<f64>,
}

impl SolutionFile {
    pub const KIND: &'static str = "solution";

    pub fn matrices(&self) -> Result<Vec<QMatrix>, ParseError> {
        self.x
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_matrix(&format!("/x/{i}")))
            .collect()
    }
}

pub fn parse_solution(bytes: &[u8]) -> Result<SolutionFile, ParseError> {
    let file: SolutionFile = from_slice(bytes)?;
    check_version(file.version)?;
    expect_kind(&file.kind, SolutionFile::KIND)?;
    Ok(file)
}

/// Output of `verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationFile {
    pub version: u32,
    pub kind: String,
    pub verified: bool,
    pub tolerance: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_asymmetry: Option<f64>,
}

/// Output of `oracle`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleFile {
    pub version: u32,
    pub kind: String,
    pub consistent: bool,
    pub tolerance: f64,
    /// Relative least-squares residual `‖Mx − e‖ / (1 + ‖e‖)`.
    pub residual: f64,
    pub rank: usize,
    /// Real unknowns and equations of the linearization.
    pub unknowns: usize,
    pub equations: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"version":1,"kind":"chain","k":1,"equations":[{"A":{"rows":1,"cols":1,"data":[[[1.0,0.0,0.0,0.0]]]},"B":{"rows":1,"cols":1,"data":[[[1.0,0.0,0.0,0.0]]]},"C":{"rows":1,"cols":1,"data":[[[0.0,0.0,0.0,0.0]]]},"D":{"rows":1,"cols":1,"data":[[[0.0,0.0,0.0,0.0]]]},"E":{"rows":1,"cols":1,"data":[[[2.0,0.5,0.0,-1.0]]]}}]}"#;

    #[test]
    fn minimal_file_round_trips() {
        let file = parse_problem(MINIMAL.as_bytes()).unwrap();
        assert_eq!(serde_json::to_string(&file).unwrap(), MINIMAL);
        let Problem::Chain(sys) = file.to_problem().unwrap() else {
            panic!("expected a chain");
        };
        assert_eq!(sys.equation(0).e.row(0)[0], Quaternion::new(2.0, 0.5, 0.0, -1.0));
    }

    #[test]
    fn negative_rows_point_at_field() {
        let bad = MINIMAL.replacen("\"rows\":1", "\"rows\":-1", 1);
        let err = parse_problem(bad.as_bytes()).unwrap_err();
        assert_eq!(err.pointer, "/equations/0/A/rows");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = MINIMAL.replacen("\"k\":1", "\"k\":1,\"extra\":0", 1);
        let err = parse_problem(bad.as_bytes()).unwrap_err();
        assert!(err.message.contains("unknown field"), "{err}");
    }

    #[test]
    fn ragged_data_is_located() {
        let bad = MINIMAL.replacen("\"cols\":1", "\"cols\":2", 1);
        let err = parse_problem(bad.as_bytes()).unwrap().to_problem().unwrap_err();
        assert_eq!(err.pointer, "/equations/0/A/data/0");
    }

    #[test]
    fn wrong_version_is_rejected() {
        let bad = MINIMAL.replacen("\"version\":1", "\"version\":2", 1);
        assert_eq!(parse_problem(bad.as_bytes()).unwrap_err().pointer, "/version");
    }
}
