//! Forward construction of test and demo instances.

use alloc::format;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ChainSystem, Equation};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::quat::Quaternion;

/// How every free dimension of a generated chain is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimSpec {
    Fixed(usize),
    /// Uniform in `lo..=hi`, drawn per dimension.
    Range(usize, usize),
}

impl DimSpec {
    pub(crate) fn draw(self, rng: &mut ChaCha8Rng) -> usize {
        match self {
            DimSpec::Fixed(n) => n,
            DimSpec::Range(lo, hi) => rng.gen_range(lo..=hi),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    /// `E_i := A_i X_i B_i + C_i X_{i+1} D_i` for random unknowns.
    Consistent,
    /// Consistent, then one `E_i` gets a random matrix added.
    Perturbed,
    /// Every equation is built from its own independent pair of unknowns,
    /// so each equation is solvable alone but the coupling generally is not.
    Decoupled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub dims: DimSpec,
    pub k: usize,
    pub seed: u64,
    pub mode: GenMode,
    /// When set, every coefficient is a product through an inner dimension
    /// drawn from `0..=cap`, so it has rank at most `cap`.
    pub rank_cap: Option<usize>,
}

/// A generated system together with the unknowns used to build it.
#[derive(Clone, Debug)]
pub struct Generated {
    pub system: ChainSystem,
    pub unknowns: Vec<QMatrix>,
    /// Index of the perturbed right-hand side, if any (0-based).
    pub perturbed: Option<usize>,
}

/// Entries with components uniform in `[-1, 1)`.
pub fn random_qmatrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| {
        Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    })
}

pub(crate) fn coefficient(rng: &mut ChaCha8Rng, rows: usize, cols: usize, cap: Option<usize>) -> QMatrix {
    match cap {
        None => random_qmatrix(rng, rows, cols),
        Some(cap) => {
            let inner = rng.gen_range(0..=cap);
            let left = random_qmatrix(rng, rows, inner);
            let right = random_qmatrix(rng, inner, cols);
            left.mul(&right)
        }
    }
}

/// Deterministic per `(dims, k, seed, mode)`.
pub fn generate(dims: DimSpec, k: usize, seed: u64, mode: GenMode) -> ChainSystem {
    generate_with(&GenSpec {
        dims,
        k,
        seed,
        mode,
        rank_cap: None,
    })
    .system
}

pub fn generate_with(spec: &GenSpec) -> Generated {
    assert!(spec.k >= 1, "k must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let k = spec.k;
    let draw = |rng: &mut ChaCha8Rng| spec.dims.draw(rng);

    // Row counts p_i, column counts s_i, and the unknown shapes
    // (q_1, r_1), (t_i, u_i) with q_{i+1} = t_i and r_{i+1} = u_i.
    let (q1, r1) = (draw(&mut rng), draw(&mut rng));
    let mut shapes = Vec::with_capacity(k + 1);
    shapes.push((q1, r1));
    let mut ps = Vec::with_capacity(k);
    let mut ss = Vec::with_capacity(k);
    for _ in 0..k {
        ps.push(draw(&mut rng));
        ss.push(draw(&mut rng));
        shapes.push((draw(&mut rng), draw(&mut rng)));
    }

    let mut equations = Vec::with_capacity(k);
    for i in 0..k {
        let (q, r) = shapes[i];
        let (t, u) = shapes[i + 1];
        let (p, s) = (ps[i], ss[i]);
        let a = coefficient(&mut rng, p, q, spec.rank_cap);
        let b = coefficient(&mut rng, r, s, spec.rank_cap);
        let c = coefficient(&mut rng, p, t, spec.rank_cap);
        let d = coefficient(&mut rng, u, s, spec.rank_cap);
        equations.push(Equation::new(a, b, c, d, QMatrix::zeros(p, s)));
    }

    let unknowns: Vec<QMatrix> = shapes.iter().map(|&(r, c)| random_qmatrix(&mut rng, r, c)).collect();
    for (i, eq) in equations.iter_mut().enumerate() {
        let next = match spec.mode {
            GenMode::Decoupled => random_qmatrix(&mut rng, shapes[i + 1].0, shapes[i + 1].1),
            _ => unknowns[i + 1].clone(),
        };
        eq.e = eq.apply(&unknowns[i], &next).expect("generated shapes conform");
    }

    let perturbed = (spec.mode == GenMode::Perturbed).then(|| {
        let idx = rng.gen_range(0..k);
        let (p, s) = equations[idx].e.shape();
        let noise = random_qmatrix(&mut rng, p, s);
        equations[idx].e = equations[idx].e.add(&noise);
        idx
    });

    Generated {
        system: ChainSystem::new(equations).expect("generated shapes conform"),
        unknowns,
        perturbed,
    }
}

/// Which coefficient of an equation [`mixed_instance`] may zero out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficient {
    A,
    B,
    C,
    D,
}

/// Draws a varied test instance: `k` in `1..=max_k`, dimensions in
/// `0..=max_dim` or `1..=max_dim`, any [`GenMode`], an optional rank cap, and
/// with probability 0.3 one zeroed coefficient. A zeroed coefficient in a
/// consistent instance is followed by recomputing that right-hand side, so
/// the instance stays consistent.
pub fn mixed_instance(seed: u64, max_k: usize, max_dim: usize) -> (Generated, Option<(usize, Coefficient)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let k = rng.gen_range(1..=max_k);
    let mode = [GenMode::Consistent, GenMode::Perturbed, GenMode::Decoupled][rng.gen_range(0..3)];
    let rank_cap = [None, Some(0), Some(1), Some(2)][rng.gen_range(0..4)];
    let lo = rng.gen_range(0..=1).min(max_dim);
    let mut g = generate_with(&GenSpec {
        dims: DimSpec::Range(lo, max_dim),
        k,
        seed,
        mode,
        rank_cap,
    });
    if !rng.gen_bool(0.3) {
        return (g, None);
    }
    let i = rng.gen_range(0..k);
    let which = [Coefficient::A, Coefficient::B, Coefficient::C, Coefficient::D][rng.gen_range(0..4)];
    let mut eqs = g.system.into_equations();
    let eq = &mut eqs[i];
    let m = match which {
        Coefficient::A => &mut eq.a,
        Coefficient::B => &mut eq.b,
        Coefficient::C => &mut eq.c,
        Coefficient::D => &mut eq.d,
    };
    *m = QMatrix::zeros(m.rows(), m.cols());
    if mode == GenMode::Consistent {
        eq.e = eq
            .apply(&g.unknowns[i], &g.unknowns[i + 1])
            .expect("generated shapes conform");
    }
    g.system = ChainSystem::new(eqs).expect("generated shapes conform");
    (g, Some((i, which)))
}

/// Embeds the one-sided chain `A_i X_i + X_{i+1} D_i = E_i` with
/// `B_i = I` and `C_i = I` of the forced sizes.
pub fn one_sided_chain(a: Vec<QMatrix>, d: Vec<QMatrix>, e: Vec<QMatrix>) -> Result<ChainSystem> {
    if a.len() != d.len() || a.len() != e.len() {
        return Err(Error::Dim(format!(
            "one-sided chain needs equal counts, got {} A, {} D, {} E",
            a.len(),
            d.len(),
            e.len()
        )));
    }
    let mut equations = Vec::with_capacity(a.len());
    for (idx, ((a, d), e)) in a.into_iter().zip(d).zip(e).enumerate() {
        let i = idx + 1;
        if a.rows() != e.rows() {
            return Err(Error::Dim(format!("rows(A_{i}) != rows(E_{i})")));
        }
        if d.cols() != e.cols() {
            return Err(Error::Dim(format!("cols(D_{i}) != cols(E_{i})")));
        }
        let b = QMatrix::identity(e.cols());
        let c = QMatrix::identity(e.rows());
        equations.push(Equation::new(a, b, c, d, e));
    }
    ChainSystem::new(equations)
}
