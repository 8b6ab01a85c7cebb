//! Dense complex linear algebra.
//!
//! Everything here works on small dense matrices (the superoperators this
//! crate builds are at most a few thousand entries), so the routines favour
//! accuracy and simplicity over blocking or cache tricks.
//!
//! Operators are vectorized by stacking columns: `vec(X)[j * rows + i] = X[i, j]`.
//! Under this convention `vec(A X B) = kron(Bᵀ, A) vec(X)`.

mod schur;
mod svd;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use schur::{eig, schur, Schur};
pub use svd::{nullspace, singular_values, Svd};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Format(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols.max(1),
                col: k % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a slice of rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::Format(format!(
                "ragged matrix: row of length {} in a matrix with {c} columns",
                bad.len()
            )));
        }
        Self::from_vec(r, c, rows.iter().flatten().copied().collect())
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let rows = columns.first().map_or(0, ComplexVector::dim);
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.dim() != rows {
                return Err(Error::ShapeMismatch {
                    op: "from_columns",
                    left: (rows, 1),
                    right: (col.dim(), 1),
                });
            }
            for i in 0..rows {
                m[(i, j)] = col[i];
            }
        }
        Ok(m)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_shape("add", other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape("sub", other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "mul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product; panics on a dimension mismatch.
    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "mul_vec: dimension mismatch");
        ComplexVector::new(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(v.iter()).map(|(&a, &b)| a * b).sum())
                .collect(),
        )
    }

    /// `self^k` by repeated multiplication.
    pub fn pow(&self, k: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                op: "pow",
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.checked_mul(self)?;
        }
        Ok(out)
    }

    /// `self - lambda * I`.
    pub fn shift_diagonal(&self, lambda: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= lambda;
        }
        m
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol)
            })
    }

    /// `‖U†U − I‖ ≤ tol` in the Frobenius norm.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && frobenius_norm(&(&(&self.adjoint() * self) - &Self::identity(self.rows))) <= tol
    }

    fn same_shape(&self, op: &'static str, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// The operator impls panic on shape mismatch, like the slice indexing they
// resemble. The `checked_*` methods are the fallible versions.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// A dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::new(vec![ZERO; dim])
    }

    /// The standard basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.data.iter()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// `⟨self, other⟩ = Σ conj(self_k) other_k`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, &b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.data.iter().map(|&z| z * s).collect())
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: Complex64, other: &Self) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    /// Outer product `self · other†`.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim(), other.dim());
        for (i, &a) in self.data.iter().enumerate() {
            for (j, b) in other.data.iter().enumerate() {
                m[(i, j)] = a * b.conj();
            }
        }
        m
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

/// The Hilbert–Schmidt inner product `⟨X, Y⟩ = tr(X†Y)`.
///
/// Conjugate-linear in `x`, linear in `y`.
pub fn frobenius_inner(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<Complex64> {
    x.same_shape("frobenius_inner", y)?;
    Ok(x.data.iter().zip(&y.data).map(|(a, &b)| a.conj() * b).sum())
}

/// `‖X‖ = sqrt(⟨X, X⟩)`.
pub fn frobenius_norm(x: &ComplexMatrix) -> f64 {
    x.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Frobenius distance `‖X − Y‖`; panics on a shape mismatch.
pub fn frobenius_distance(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    frobenius_norm(&(x - y))
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Column-stacking vectorization.
pub fn vec(x: &ComplexMatrix) -> ComplexVector {
    let mut out = Vec::with_capacity(x.rows * x.cols);
    for j in 0..x.cols {
        for i in 0..x.rows {
            out.push(x[(i, j)]);
        }
    }
    ComplexVector::new(out)
}

/// Inverse of [`vec`].
pub fn unvec(v: &ComplexVector, rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.dim() != rows * cols {
        return Err(Error::ShapeMismatch {
            op: "unvec",
            left: (v.dim(), 1),
            right: (rows, cols),
        });
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = v[j * rows + i];
        }
    }
    Ok(m)
}

/// Something that lives in a complex inner-product space.
pub trait InnerProductSpace: Clone {
    fn inner_product(&self, other: &Self) -> Complex64;
    fn scaled(&self, s: Complex64) -> Self;
    /// `self += s * other`
    fn add_scaled(&mut self, s: Complex64, other: &Self);

    fn norm_hs(&self) -> f64 {
        self.inner_product(self).re.max(0.0).sqrt()
    }
}

impl InnerProductSpace for ComplexVector {
    fn inner_product(&self, other: &Self) -> Complex64 {
        self.inner(other)
    }

    fn scaled(&self, s: Complex64) -> Self {
        self.scale(s)
    }

    fn add_scaled(&mut self, s: Complex64, other: &Self) {
        self.axpy(s, other);
    }
}

impl InnerProductSpace for ComplexMatrix {
    fn inner_product(&self, other: &Self) -> Complex64 {
        frobenius_inner(self, other).expect("inner product shape mismatch")
    }

    fn scaled(&self, s: Complex64) -> Self {
        self.scale(s)
    }

    fn add_scaled(&mut self, s: Complex64, other: &Self) {
        assert_eq!(self.shape(), other.shape(), "add_scaled: shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }
}

/// Modified Gram–Schmidt with one re-orthogonalization pass.
///
/// Inputs whose residual norm after projection is `<= tol` are dropped, so the
/// output is an orthonormal basis of the span (up to `tol`).
pub fn gram_schmidt<T: InnerProductSpace>(vs: &[T], tol: f64) -> Vec<T> {
    let mut basis: Vec<T> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.inner_product(&w);
                w.add_scaled(-c, q);
            }
        }
        let n = w.norm_hs();
        if n > tol {
            basis.push(w.scaled(c64(1.0 / n, 0.0)));
        }
    }
    basis
}

/// Orthogonal projector `Σ v v†` onto the span of an orthonormal set of
/// vectors of dimension `dim`.
pub fn projector(basis: &[ComplexVector], dim: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(dim, dim);
    for v in basis {
        assert_eq!(v.dim(), dim, "projector: dimension mismatch");
        for i in 0..dim {
            for j in 0..dim {
                p[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    p
}

/// Frobenius distance between the orthogonal projectors onto two subspaces,
/// each given by an orthonormal basis.
pub fn subspace_distance(a: &[ComplexVector], b: &[ComplexVector], dim: usize) -> f64 {
    frobenius_distance(&projector(a, dim), &projector(b, dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(frobenius_inner(&i2, &i2).unwrap(), c64(2.0, 0.0));
        assert_eq!(frobenius_inner(&pauli_z(), &i2).unwrap(), ZERO);
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let y = ComplexMatrix::from_vec(2, 2, vec![ZERO, c64(0.0, 1.0), ZERO, ZERO]).unwrap();
        assert_eq!(frobenius_inner(&x, &y).unwrap(), c64(0.0, 1.0));
    }

    #[test]
    fn inner_product_shape_mismatch() {
        let err = frobenius_inner(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert!(matches!(err, Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn norm_examples() {
        assert_abs_diff_eq!(frobenius_norm(&ComplexMatrix::identity(5)), 5f64.sqrt());
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        let ones = ComplexMatrix::from_real(2, 2, &[1.0; 4]).unwrap();
        assert_abs_diff_eq!(frobenius_norm(&ones), 2.0);
    }

    #[test]
    fn kron_examples() {
        assert_eq!(
            kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)),
            ComplexMatrix::identity(4)
        );
        let zz = kron(&pauli_z(), &pauli_z());
        let expected = ComplexMatrix::diag(&[ONE, -ONE, -ONE, ONE]);
        assert_eq!(zz, expected);
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(3, 2);
        assert_eq!(kron(&a, &b).shape(), (6, 6));
    }

    #[test]
    fn vec_is_column_stacking() {
        let x = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let v: Vec<f64> = vec(&x).iter().map(|z| z.re).collect();
        assert_eq!(v, vec![1.0, 3.0, 2.0, 4.0]);
        assert_eq!(unvec(&vec(&x), 2, 2).unwrap(), x);
        assert!(unvec(&vec(&x), 3, 2).is_err());
    }

    #[test]
    fn gram_schmidt_examples() {
        let i2 = ComplexMatrix::identity(2);
        let z = pauli_z();
        let out = gram_schmidt(&[i2.clone()], 1e-12);
        assert_eq!(out.len(), 1);
        assert_abs_diff_eq!(out[0][(0, 0)].re, 1.0 / 2f64.sqrt(), epsilon = 1e-15);

        let out = gram_schmidt(&[i2.clone(), z.clone()], 1e-12);
        assert_eq!(out.len(), 2);
        assert_abs_diff_eq!(frobenius_distance(&out[1], &z.scale_real(1.0 / 2f64.sqrt())), 0.0, epsilon = 1e-15);

        let out = gram_schmidt(&[i2.clone(), i2], 1e-12);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
        let mut data = vec![ONE; 4];
        data[3] = c64(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::from_vec(2, 2, data),
            Err(Error::NonFinite { row: 1, col: 1 })
        ));
        assert!(ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ONE]]).is_err());
    }

    #[test]
    fn subspace_distance_is_basis_independent() {
        let e0 = ComplexVector::basis(2, 0);
        let e1 = ComplexVector::basis(2, 1);
        let s = 1.0 / 2f64.sqrt();
        let plus = ComplexVector::new(vec![c64(s, 0.0), c64(s, 0.0)]);
        let minus = ComplexVector::new(vec![c64(s, 0.0), c64(-s, 0.0)]);
        assert_abs_diff_eq!(subspace_distance(&[e0.clone(), e1], &[plus, minus], 2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(subspace_distance(&[e0], &[], 2), 1.0, epsilon = 1e-15);
    }
}
