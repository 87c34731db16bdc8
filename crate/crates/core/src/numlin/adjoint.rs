//! Complex adjoint embedding `χ: H^{m×n} → C^{2m×2n}`.
//!
//! Writing `A = A₁ + A₂·j` with complex `A₁ = w + x·i`, `A₂ = y + z·i`,
//! `χ(A) = [[A₁, A₂], [−conj(A₂), conj(A₁)]]`.

use alloc::format;

use num_complex::Complex64;

use super::dense::ComplexMatrix;
use crate::error::{Error, Result};
// Shadowed by the inherent float methods whenever std is in the build.
use crate::matrix::QMatrix;
use crate::quat::Quaternion;
#[allow(unused_imports)]
use num_traits::Float;

/// Relative tolerance on the block structure accepted by [`from_complex_adjoint`].
pub const STRUCTURE_TOL: f64 = 1e-8;

#[inline]
fn split(q: Quaternion) -> (Complex64, Complex64) {
    (Complex64::new(q.w, q.x), Complex64::new(q.y, q.z))
}

pub fn to_complex_adjoint(a: &QMatrix) -> ComplexMatrix {
    let (m, n) = a.shape();
    ComplexMatrix::from_fn(2 * m, 2 * n, |r, c| {
        let (a1, a2) = split(a[(r % m, c % n)]);
        match (r < m, c < n) {
            (true, true) => a1,
            (true, false) => a2,
            (false, true) => -a2.conj(),
            (false, false) => a1.conj(),
        }
    })
}

/// Inverse of [`to_complex_adjoint`]. The two redundant copies of each
/// complex block are averaged before the quaternion entries are read off.
pub fn from_complex_adjoint(mat: &ComplexMatrix) -> Result<QMatrix> {
    let (rr, cc) = mat.shape();
    if rr % 2 != 0 || cc % 2 != 0 {
        return Err(Error::Dim(format!(
            "complex adjoint must have even dimensions, got {rr}x{cc}"
        )));
    }
    let (m, n) = (rr / 2, cc / 2);
    let mut defect = 0.0;
    let out = QMatrix::from_fn(m, n, |r, c| {
        let p = mat[(r, c)];
        let q = mat[(r, c + n)];
        let rl = mat[(r + m, c)];
        let s = mat[(r + m, c + n)];
        defect += (p - s.conj()).norm_sqr() + (q + rl.conj()).norm_sqr();
        let a1 = (p + s.conj()) * 0.5;
        let a2 = (q - rl.conj()) * 0.5;
        Quaternion::new(a1.re, a1.im, a2.re, a2.im)
    });
    let scale = mat.frobenius_norm();
    let residual = if scale > 0.0 { defect.sqrt() / scale } else { 0.0 };
    if residual > STRUCTURE_TOL {
        return Err(Error::StructureViolation { residual });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_units() {
        let one = to_complex_adjoint(&QMatrix::identity(1));
        assert_eq!(one, ComplexMatrix::identity(2));
        let j = to_complex_adjoint(&QMatrix::diag(&[Quaternion::J]));
        assert_eq!(j.as_slice(), &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let i = to_complex_adjoint(&QMatrix::diag(&[Quaternion::I]));
        assert_eq!(i.as_slice(), &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]);
    }

    #[test]
    fn round_trip() {
        let a = QMatrix::from_fn(3, 2, |r, col| {
            let t = (r * 2 + col) as f64;
            Quaternion::new(t, -t * 0.5, 1.0 / (t + 1.0), t * t)
        });
        assert_eq!(from_complex_adjoint(&to_complex_adjoint(&a)).unwrap(), a);
        assert_eq!(
            from_complex_adjoint(&to_complex_adjoint(&QMatrix::identity(4))).unwrap(),
            QMatrix::identity(4)
        );
        let empty = QMatrix::zeros(0, 3);
        assert_eq!(from_complex_adjoint(&to_complex_adjoint(&empty)).unwrap(), empty);
    }

    #[test]
    fn rejects_unstructured() {
        let bad = ComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(matches!(
            from_complex_adjoint(&bad),
            Err(Error::StructureViolation { .. })
        ));
        let odd = ComplexMatrix::zeros(3, 2);
        assert!(matches!(from_complex_adjoint(&odd), Err(Error::Dim(_))));
    }
}
