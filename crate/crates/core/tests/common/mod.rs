#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qsylv_core::chain::random_qmatrix;
use qsylv_core::numlin::ComplexMatrix;
use qsylv_core::QMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random `rows × cols` matrix of rank at most `rank`, built as a product.
pub fn low_rank(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> QMatrix {
    random_qmatrix(rng, rows, rank).mul(&random_qmatrix(rng, rank, cols))
}

/// Dense or rank-deficient matrix, chosen by `seed`.
pub fn sample(seed: u64, rows: usize, cols: usize) -> QMatrix {
    let mut r = rng(seed);
    match seed % 3 {
        0 => low_rank(&mut r, rows, cols, (seed as usize / 3) % (rows.min(cols) + 1)),
        _ => random_qmatrix(&mut r, rows, cols),
    }
}

pub fn arb_qmatrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = QMatrix> {
    (0..=max_rows, 0..=max_cols, any::<u64>()).prop_map(|(r, c, seed)| sample(seed, r, c))
}

pub fn arb_nonempty_qmatrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = QMatrix> {
    (1..=max_rows, 1..=max_cols, any::<u64>()).prop_map(|(r, c, seed)| sample(seed, r, c))
}

pub fn to_nalgebra(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| m[(r, c)])
}

/// Singular values from nalgebra, descending.
pub fn reference_singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = to_nalgebra(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn rel_err(a: &QMatrix, b: &QMatrix) -> f64 {
    a.distance(b) / (1.0 + b.frobenius_norm())
}
