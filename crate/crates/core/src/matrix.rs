//! Dense row-major quaternion matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

// Shadowed by the inherent float methods whenever std is in the build.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quat::{EtaUnit, Quaternion};

/// A dense `rows × cols` quaternion matrix. Either dimension may be zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds from row-major data; `None` if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Quaternion>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Option<Self> {
        (values.len() == rows * cols).then(|| Self {
            rows,
            cols,
            data: values.iter().map(|&v| Quaternion::real(v)).collect(),
        })
    }

    pub fn diag(values: &[Quaternion]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Quaternion] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Quaternion] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Quaternion> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[Quaternion] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn try_mul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimMismatch {
                op: "mul",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (r, &a) in self.row(i).iter().enumerate() {
                if a == Quaternion::ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(r)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix product. Panics on a shape mismatch; see [`QMatrix::try_mul`].
    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        match self.try_mul(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }

    fn zip_with(
        &self,
        rhs: &QMatrix,
        op: &'static str,
        f: impl Fn(Quaternion, Quaternion) -> Quaternion,
    ) -> Result<QMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimMismatch {
                op,
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &QMatrix) -> Result<QMatrix> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &QMatrix) -> Result<QMatrix> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    /// Elementwise sum. Panics on a shape mismatch.
    pub fn add(&self, rhs: &QMatrix) -> QMatrix {
        match self.try_add(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }

    /// Elementwise difference. Panics on a shape mismatch.
    pub fn sub(&self, rhs: &QMatrix) -> QMatrix {
        match self.try_sub(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn neg(&self) -> QMatrix {
        self.map(|q| -q)
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        self.map(|q| q.scale(s))
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&q| f(q)).collect(),
        }
    }

    /// Left scalar multiplication `s·A`.
    pub fn left_scale(&self, s: Quaternion) -> QMatrix {
        self.map(|q| s * q)
    }

    /// Right scalar multiplication `A·s`.
    pub fn right_scale(&self, s: Quaternion) -> QMatrix {
        self.map(|q| q * s)
    }

    /// `A*`: transpose with every entry conjugated.
    pub fn conj_transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// `A^{η*} = −η·A*·η`.
    pub fn eta_conj_transpose(&self, eta: EtaUnit) -> QMatrix {
        QMatrix::from_fn(self.cols, self.rows, |r, c| eta.conj_entry(self[(c, r)]))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|q| q.w.abs().max(q.x.abs()).max(q.y.abs()).max(q.z.abs()))
            .fold(0.0, f64::max)
    }

    /// `‖A − B‖_F`. Panics on a shape mismatch.
    pub fn distance(&self, other: &QMatrix) -> f64 {
        self.sub(other).frobenius_norm()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&q| q == Quaternion::ZERO)
    }

    /// Copy of the `rows × cols` block whose top-left corner is `(r0, c0)`.
    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> QMatrix {
        assert!(
            r0 + rows <= self.rows && c0 + cols <= self.cols,
            "submatrix out of range"
        );
        QMatrix::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of range"
        );
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    /// `[A B]`.
    pub fn hstack(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimMismatch {
                op: "hstack",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let mut out = QMatrix::zeros(self.rows, self.cols + rhs.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, rhs);
        Ok(out)
    }

    /// `[A; B]`.
    pub fn vstack(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.cols != rhs.cols {
            return Err(Error::DimMismatch {
                op: "vstack",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let mut out = QMatrix::zeros(self.rows + rhs.rows, self.cols);
        out.set_block(0, 0, self);
        out.set_block(self.rows, 0, rhs);
        Ok(out)
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|q| q.is_real())
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Product of a left-to-right sequence of factors.
pub fn product(factors: &[&QMatrix]) -> Result<QMatrix> {
    let (first, rest) = factors.split_first().expect("product of no factors");
    let mut acc = (*first).clone();
    for f in rest {
        acc = acc.try_mul(f)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn sample(rows: usize, cols: usize, seed: f64) -> QMatrix {
        QMatrix::from_fn(rows, cols, |r, c| {
            let t = seed + (r * 7 + c * 3) as f64;
            q(t.sin(), (1.3 * t).cos(), (0.7 * t).sin(), (2.1 * t).cos())
        })
    }

    #[test]
    fn identity_is_neutral() {
        let a = sample(3, 4, 0.5);
        assert_eq!(QMatrix::identity(3).mul(&a), a);
        assert_eq!(a.mul(&QMatrix::identity(4)), a);
    }

    #[test]
    fn empty_inner_dimension_gives_zero() {
        let a = QMatrix::zeros(3, 0);
        let b = QMatrix::zeros(0, 2);
        let p = a.mul(&b);
        assert_eq!(p.shape(), (3, 2));
        assert!(p.is_zero());
    }

    #[test]
    fn one_by_one_reduces_to_scalar_product() {
        let a = QMatrix::diag(&[Quaternion::I]);
        let b = QMatrix::diag(&[Quaternion::J]);
        assert_eq!(a.mul(&b), QMatrix::diag(&[Quaternion::K]));
    }

    #[test]
    fn mul_rejects_bad_shapes() {
        let err = sample(2, 3, 0.0).try_mul(&sample(2, 3, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DimMismatch { op: "mul", .. }));
    }

    #[test]
    fn conj_transpose_examples() {
        let sym = QMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, -3.0]).unwrap();
        assert_eq!(sym.conj_transpose(), sym);
        let row = QMatrix::from_vec(1, 2, vec![Quaternion::I, Quaternion::J]).unwrap();
        let col = QMatrix::from_vec(2, 1, vec![-Quaternion::I, -Quaternion::J]).unwrap();
        assert_eq!(row.conj_transpose(), col);
        let a = sample(3, 2, 1.0);
        assert_eq!(a.conj_transpose().conj_transpose(), a);
    }

    #[test]
    fn eta_conj_transpose_examples() {
        let a = QMatrix::from_real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        for eta in EtaUnit::ALL {
            assert_eq!(a.eta_conj_transpose(eta), a.transpose());
        }
        let i = QMatrix::diag(&[Quaternion::I]);
        assert_eq!(i.eta_conj_transpose(EtaUnit::I), QMatrix::diag(&[-Quaternion::I]));
        let j = QMatrix::diag(&[Quaternion::J]);
        assert_eq!(j.eta_conj_transpose(EtaUnit::I), j);
    }

    #[test]
    fn stacking_and_blocks() {
        let a = sample(2, 2, 0.1);
        let b = sample(2, 3, 0.2);
        let h = a.hstack(&b).unwrap();
        assert_eq!(h.shape(), (2, 5));
        assert_eq!(h.submatrix(0, 2, 2, 3), b);
        let v = a.vstack(&sample(1, 2, 0.3)).unwrap();
        assert_eq!(v.shape(), (3, 2));
        assert!(a.hstack(&sample(3, 1, 0.0)).is_err());
        assert!(a.vstack(&sample(1, 3, 0.0)).is_err());
    }

    #[test]
    fn product_chains_left_to_right() {
        let a = sample(2, 3, 0.1);
        let b = sample(3, 4, 0.2);
        let c = sample(4, 1, 0.3);
        let p = product(&[&a, &b, &c]).unwrap();
        assert!(p.distance(&a.mul(&b).mul(&c)) < 1e-12);
        assert!(product(&[&a, &c]).is_err());
    }
}
