use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qsylv_core::chain::{check_chain, generate_with, solve_chain, DimSpec, GenMode, GenSpec, RESIDUAL_TOL};
use qsylv_core::eta::{check_eta, generate_eta, solve_eta, EtaChainSystem};
use qsylv_core::oracle::{linearize_with_cap, oracle_linearized, DEFAULT_ORACLE_TOL, DEFAULT_SIZE_CAP};
use qsylv_core::{ChainSystem, Error, EtaUnit, RankPolicy, SolvabilityReport};

use crate::format::{
    parse_problem, parse_solution, to_json, MatrixJson, OracleFile, Problem, ProblemFile, ReportFile, SolutionFile,
    VerificationFile, FORMAT_VERSION,
};

#[derive(Debug, Parser)]
#[command(
    name = "qsylv",
    version,
    about = "Solvability certificates and solutions for quaternion Sylvester chains"
)]
pub struct Cli {
    /// Relative tolerance for numerical rank decisions.
    #[arg(long, global = true, env = "QSYLV_TOL", value_parser = parse_tol)]
    pub tol: Option<f64>,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every rank equality of the chain certificate.
    Check(Input),
    /// Construct one solution.
    Solve(Input),
    /// Generate a problem file.
    Gen(GenArgs),
    /// Recompute the residuals of a solution file.
    Verify {
        problem: PathBuf,
        /// `-` reads the solution from stdin.
        solution: PathBuf,
    },
    /// Decide consistency from the real linearization.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Refuse systems with more real unknowns than this.
        #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
        size_cap: usize,
    },
    /// Evaluate the η-Hermitian certificate.
    EtaCheck(Input),
    /// Construct one η-Hermitian solution.
    EtaSolve(Input),
}

#[derive(Debug, Args)]
pub struct Input {
    /// Problem file; stdin when absent or `-`.
    pub input: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Consistent,
    Perturbed,
    Decoupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EtaArg {
    I,
    J,
    K,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    /// `N` for fixed dimensions or `LO-HI` for a range.
    #[arg(long, default_value = "1-3", value_parser = parse_dims)]
    pub dims: DimSpec,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Consistent)]
    pub mode: Mode,
    /// Cap the rank of every coefficient.
    #[arg(long)]
    pub rank_cap: Option<usize>,
    /// Generate an η-Hermitian problem for this unit.
    #[arg(long, value_enum)]
    pub eta: Option<EtaArg>,
}

fn parse_tol(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err("tolerance must lie in (0, 1)".into())
    }
}

fn parse_dims(s: &str) -> std::result::Result<DimSpec, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    match s.split_once('-') {
        None => Ok(DimSpec::Fixed(num(s)?)),
        Some((lo, hi)) => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo > hi {
                return Err(format!("empty range {lo}-{hi}"));
            }
            Ok(DimSpec::Range(lo, hi))
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// Inconsistent, unsolved or unverified; the output was still written.
    Negative,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Ok
        } else {
            Outcome::Negative
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let policy = cli.tol.map(RankPolicy::new).unwrap_or_default();
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Check(input) => {
            let system = match load(input)? {
                Problem::Chain(sys) => sys,
                Problem::Eta(sys) => eta_as_chain(&sys)?,
            };
            let report = check_chain(&system, &policy)?;
            emit_report(out, &report)
        }
        Command::EtaCheck(input) => {
            let system = load_eta(input)?;
            let report = check_eta(&system, &policy)?;
            emit_report(out, &report)
        }
        Command::Solve(input) => {
            let file = read_problem(input)?;
            let system = match file.to_problem()? {
                Problem::Chain(sys) => sys,
                Problem::Eta(sys) => eta_as_chain(&sys)?,
            };
            match solve_chain(&system, &policy) {
                Ok(sol) => {
                    let doc = SolutionFile {
                        version: FORMAT_VERSION,
                        kind: SolutionFile::KIND.into(),
                        policy: policy.into(),
                        seed: file.seed,
                        eta: None,
                        x: sol.x.iter().map(MatrixJson::from_matrix).collect(),
                        residuals: sol.residuals,
                        max_residual: sol.max_residual,
                        max_asymmetry: None,
                    };
                    write_out(out, &to_json(&doc))?;
                    Ok(Outcome::Ok)
                }
                Err(e) => unsolved(out, e, || check_chain(&system, &policy)),
            }
        }
        Command::EtaSolve(input) => {
            let file = read_problem(input)?;
            let Problem::Eta(system) = file.to_problem()? else {
                bail!("eta-solve expects a problem of kind \"eta\"");
            };
            match solve_eta(&system, &policy) {
                Ok(sol) => {
                    let doc = SolutionFile {
                        version: FORMAT_VERSION,
                        kind: SolutionFile::KIND.into(),
                        policy: policy.into(),
                        seed: file.seed,
                        eta: Some(system.eta().into()),
                        x: sol.x.iter().map(MatrixJson::from_matrix).collect(),
                        residuals: sol.residuals,
                        max_residual: sol.max_residual,
                        max_asymmetry: Some(sol.max_asymmetry),
                    };
                    write_out(out, &to_json(&doc))?;
                    Ok(Outcome::Ok)
                }
                Err(e) => unsolved(out, e, || check_eta(&system, &policy)),
            }
        }
        Command::Gen(args) => {
            let spec = GenSpec {
                dims: args.dims,
                k: args.k as usize,
                seed: args.seed,
                mode: match args.mode {
                    Mode::Consistent => GenMode::Consistent,
                    Mode::Perturbed => GenMode::Perturbed,
                    Mode::Decoupled => GenMode::Decoupled,
                },
                rank_cap: args.rank_cap,
            };
            let file = match args.eta {
                None => ProblemFile::from_chain(&generate_with(&spec).system, Some(args.seed)),
                Some(eta) => {
                    let eta = match eta {
                        EtaArg::I => EtaUnit::I,
                        EtaArg::J => EtaUnit::J,
                        EtaArg::K => EtaUnit::K,
                    };
                    ProblemFile::from_eta(&generate_eta(&spec, eta).0, Some(args.seed))
                }
            };
            write_out(out, &to_json(&file))?;
            Ok(Outcome::Ok)
        }
        Command::Verify { problem, solution } => {
            if problem.as_os_str() == "-" && solution.as_os_str() == "-" {
                bail!("only one of problem and solution can come from stdin");
            }
            let problem = parse_problem(&read_source(Some(problem))?)
                .and_then(|f| f.to_problem())
                .context("reading problem")?;
            let solution = parse_solution(&read_source(Some(solution))?).context("reading solution")?;
            let xs = solution.matrices().context("reading solution")?;
            let (system, eta) = match &problem {
                Problem::Chain(sys) => (sys.clone(), None),
                Problem::Eta(sys) => (eta_as_chain(sys)?, Some(sys.eta())),
            };
            if xs.len() != system.k() + 1 {
                bail!(
                    "solution has {} matrices, the problem needs {}",
                    xs.len(),
                    system.k() + 1
                );
            }
            for (i, (x, shape)) in xs.iter().zip(system.unknown_shapes()).enumerate() {
                if x.shape() != shape {
                    bail!(
                        "X_{} is {}x{}, expected {}x{}",
                        i + 1,
                        x.rows(),
                        x.cols(),
                        shape.0,
                        shape.1
                    );
                }
            }
            let residuals = system.residuals(&xs)?;
            let max_residual = residuals.iter().copied().fold(0.0, f64::max);
            let max_asymmetry = eta.map(|eta| {
                xs.iter()
                    .map(|x| x.distance(&x.eta_conj_transpose(eta)))
                    .fold(0.0, f64::max)
            });
            let verified = max_residual <= RESIDUAL_TOL && max_asymmetry.is_none_or(|a| a <= 1e-10);
            let doc = VerificationFile {
                version: FORMAT_VERSION,
                kind: "verification".into(),
                verified,
                tolerance: RESIDUAL_TOL,
                residuals,
                max_residual,
                max_asymmetry,
            };
            write_out(out, &to_json(&doc))?;
            if !verified {
                eprintln!("verification failed: max residual {max_residual:e} (tolerance {RESIDUAL_TOL:e})");
                if let Some(a) = max_asymmetry.filter(|&a| a > 1e-10) {
                    eprintln!("solution is not eta-Hermitian: asymmetry {a:e}");
                }
            }
            Ok(Outcome::from_bool(verified))
        }
        Command::Oracle { input, size_cap } => {
            let system = match load(input)? {
                Problem::Chain(sys) => sys,
                Problem::Eta(sys) => eta_as_chain(&sys)?,
            };
            let lin = linearize_with_cap(&system, *size_cap)?;
            let verdict = oracle_linearized(&lin, DEFAULT_ORACLE_TOL)?;
            let (equations, unknowns) = lin.m.shape();
            let doc = OracleFile {
                version: FORMAT_VERSION,
                kind: "oracle".into(),
                consistent: verdict.consistent,
                tolerance: DEFAULT_ORACLE_TOL,
                residual: verdict.residual,
                rank: verdict.rank,
                unknowns,
                equations,
            };
            write_out(out, &to_json(&doc))?;
            Ok(Outcome::from_bool(verdict.consistent))
        }
    }
}

fn eta_as_chain(system: &EtaChainSystem) -> Result<ChainSystem> {
    Ok(system.as_chain()?)
}

/// Writes the certificate when the solver reports inconsistency; any other
/// library error is passed up.
fn unsolved(
    out: Option<&Path>,
    err: Error,
    report: impl FnOnce() -> qsylv_core::Result<SolvabilityReport>,
) -> Result<Outcome> {
    match err {
        Error::Inconsistent(why) => {
            emit_report(out, &report()?)?;
            eprintln!("no solution: {why}");
            Ok(Outcome::Negative)
        }
        Error::Residual { max_residual } => {
            eprintln!("constructed solution misses the residual budget: {max_residual:e}");
            Ok(Outcome::Negative)
        }
        other => Err(other.into()),
    }
}

fn emit_report(out: Option<&Path>, report: &SolvabilityReport) -> Result<Outcome> {
    write_out(out, &to_json(&ReportFile::from_report(report)))?;
    if let Some(fail) = report.first_failure() {
        eprintln!(
            "inconsistent: {} fails (rank {} vs {})",
            fail.id, fail.lhs_rank, fail.rhs_rank
        );
    }
    Ok(Outcome::from_bool(report.overall))
}

fn read_problem(input: &Input) -> Result<ProblemFile> {
    Ok(parse_problem(&read_source(input.input.as_deref())?)?)
}

fn load(input: &Input) -> Result<Problem> {
    Ok(read_problem(input)?.to_problem()?)
}

fn load_eta(input: &Input) -> Result<EtaChainSystem> {
    match load(input)? {
        Problem::Eta(sys) => Ok(sys),
        Problem::Chain(_) => bail!("expected a problem of kind \"eta\""),
    }
}

fn read_source(path: Option<&Path>) -> Result<Vec<u8>> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => std::fs::read(p).with_context(|| format!("reading {}", p.display())),
    }
}

fn read_stdin() -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    std::io::stdin().read_to_end(&mut buf).context("reading stdin")?;
    Ok(buf)
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}
