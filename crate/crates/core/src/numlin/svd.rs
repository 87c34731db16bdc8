//! One-sided (Hestenes) Jacobi singular value decomposition.
//!
//! Columns are orthogonalized by plane rotations until every pair is
//! numerically orthogonal. The sweep order is fixed, so identical input bits
//! produce identical output bits.

use alloc::vec::Vec;

use num_traits::Float;

use super::dense::{DenseMatrix, Scalar};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U·diag(σ)·Vᴴ` with `p = min(m, n)` singular triplets,
/// `σ` sorted in non-increasing order.
#[derive(Clone, Debug)]
pub struct Svd<T> {
    /// `m × p`; columns for zero singular values are zero.
    pub u: DenseMatrix<T>,
    pub sigma: Vec<f64>,
    /// `n × p`, orthonormal columns.
    pub v: DenseMatrix<T>,
}

impl<T: Scalar> Svd<T> {
    pub fn sigma_max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }
}

pub fn svd<T: Scalar>(a: &DenseMatrix<T>) -> Svd<T> {
    let (m, n) = a.shape();
    if m >= n {
        let (u, sigma, v) = jacobi(a);
        Svd { u, sigma, v }
    } else {
        // A = (Aᴴ)ᴴ: the roles of the factors swap.
        let (u, sigma, v) = jacobi(&a.adjoint());
        Svd { u: v, sigma, v: u }
    }
}

/// Jacobi on a matrix with `m ≥ n`. Returns `(U m×n, σ, V n×n)`.
fn jacobi<T: Scalar>(a: &DenseMatrix<T>) -> (DenseMatrix<T>, Vec<f64>, DenseMatrix<T>) {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    // Column-major working copies.
    let mut w: Vec<T> = (0..n).flat_map(|c| a.column(c)).collect();
    let mut v: Vec<T> = (0..n * n)
        .map(|idx| if idx / n == idx % n { T::ONE } else { T::ZERO })
        .collect();
    let tol = f64::EPSILON * (m.max(1) as f64).sqrt();
    // Columns below this squared norm no longer affect any singular value
    // and are left alone; rotating them risks underflow in the phase.
    let total: f64 = w.iter().map(|x| x.abs_sqr()).sum();
    let negligible = (total * f64::EPSILON.powi(4)).max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (head, tail) = w.split_at_mut(q * m);
                let cp = &mut head[p * m..(p + 1) * m];
                let cq = &mut tail[..m];
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = T::ZERO;
                for (&x, &y) in cp.iter().zip(cq.iter()) {
                    alpha += x.abs_sqr();
                    beta += y.abs_sqr();
                    gamma = gamma + x.conj() * y;
                }
                let g = gamma.abs();
                if g == 0.0 || alpha.min(beta) <= negligible || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + 1.0.hypot(zeta));
                let c = 1.0 / 1.0.hypot(t);
                let s = c * t;
                let phase = gamma.conj().scale(1.0 / g);
                rotate(cp, cq, c, s, phase);

                let (vhead, vtail) = v.split_at_mut(q * n);
                rotate(&mut vhead[p * n..(p + 1) * n], &mut vtail[..n], c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = (0..n)
        .map(|c| w[c * m..(c + 1) * m].iter().map(|x| x.abs_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(core::cmp::Ordering::Equal));

    let u = DenseMatrix::from_fn(m, n, |r, k| {
        let c = order[k];
        let s = sigma[c];
        if s > 0.0 {
            w[c * m + r].scale(1.0 / s)
        } else {
            T::ZERO
        }
    });
    let vm = DenseMatrix::from_fn(n, n, |r, k| v[order[k] * n + r]);
    sigma = order.iter().map(|&c| sigma[c]).collect();
    (u, sigma, vm)
}

#[inline]
fn rotate<T: Scalar>(cp: &mut [T], cq: &mut [T], c: f64, s: f64, phase: T) {
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y * phase;
        *x = a.scale(c) - b.scale(s);
        *y = a.scale(s) + b.scale(c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_complex::Complex64;

    fn reconstruct<T: Scalar>(s: &Svd<T>) -> DenseMatrix<T> {
        let p = s.sigma.len();
        let us = DenseMatrix::from_fn(s.u.rows(), p, |r, c| s.u[(r, c)].scale(s.sigma[c]));
        us.matmul(&s.v.adjoint())
    }

    fn complex_sample(m: usize, n: usize) -> DenseMatrix<Complex64> {
        DenseMatrix::from_fn(m, n, |r, c| {
            let t = (r * 5 + c * 11) as f64 + 0.25;
            Complex64::new(t.sin(), (0.3 * t).cos())
        })
    }

    #[test]
    fn reconstructs_tall_and_wide() {
        for (m, n) in [(5, 3), (3, 5), (4, 4), (1, 6), (6, 1)] {
            let a = complex_sample(m, n);
            let s = svd(&a);
            assert_eq!(s.sigma.len(), m.min(n));
            assert!(reconstruct(&s).sub(&a).frobenius_norm() < 1e-12 * (1.0 + a.frobenius_norm()));
            assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
            let vhv = s.v.adjoint().matmul(&s.v);
            assert!(vhv.sub(&DenseMatrix::identity(vhv.rows())).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_singular_values() {
        let a = DenseMatrix::from_vec(3, 3, vec![0.0, 0.0, 2.0, 0.0, -5.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let s = svd(&a);
        assert_eq!(s.sigma, vec![5.0, 2.0, 1.0]);
    }

    #[test]
    fn empty_and_zero() {
        let s = svd(&DenseMatrix::<f64>::zeros(3, 0));
        assert!(s.sigma.is_empty());
        let s = svd(&DenseMatrix::<f64>::zeros(0, 2));
        assert!(s.sigma.is_empty());
        let s = svd(&DenseMatrix::<Complex64>::zeros(2, 3));
        assert_eq!(s.sigma, vec![0.0, 0.0]);
    }

    #[test]
    fn deterministic_bits() {
        let a = complex_sample(6, 4);
        let s1 = svd(&a);
        let s2 = svd(&a);
        assert_eq!(s1.sigma, s2.sigma);
        assert_eq!(s1.u, s2.u);
        assert_eq!(s1.v, s2.v);
    }
}
