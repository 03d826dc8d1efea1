//! Dense complex linear algebra on `C^n`.
//!
//! Inner products are linear in the first slot and conjugate-linear in the
//! second: `inner(x, y) = sum_i x_i * conj(y_i)`. Every other module relies on
//! this convention.

mod eigen;
mod random;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{eig_2x2, hermitian_eig, power_iteration, EigenDecomposition};
pub use random::{
    gaussian_vector, orthonormalize_columns, random_unit_vector, random_unitary,
    random_unitary_from_rng,
};

/// Complex scalar. Serializes as the two-element array `[re, im]`.
pub type Complex = num_complex::Complex64;

/// Default relative tolerance for eigen-residuals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default tolerance for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

/// A vector in `C^n`, `n >= 1`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct ComplexVector {
    data: Vec<Complex>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    dim: usize,
    data: Vec<Complex>,
}

impl TryFrom<VectorRepr> for ComplexVector {
    type Error = Error;

    fn try_from(repr: VectorRepr) -> Result<Self> {
        if repr.dim != repr.data.len() {
            return Err(Error::DimError {
                expected: repr.dim,
                found: repr.data.len(),
            });
        }
        ComplexVector::try_new(repr.data)
    }
}

impl From<ComplexVector> for VectorRepr {
    fn from(v: ComplexVector) -> Self {
        VectorRepr {
            dim: v.data.len(),
            data: v.data,
        }
    }
}

fn all_finite(data: &[Complex]) -> bool {
    data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

impl ComplexVector {
    /// Validating constructor: rejects empty or non-finite data.
    pub fn try_new(data: Vec<Complex>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidData("vector must have dim >= 1".into()));
        }
        if !all_finite(&data) {
            return Err(Error::InvalidData("vector has non-finite entries".into()));
        }
        Ok(ComplexVector { data })
    }

    /// Builds a vector from raw entries. Panics on empty input.
    pub fn from_vec(data: Vec<Complex>) -> Self {
        assert!(!data.is_empty(), "vector must have dim >= 1");
        ComplexVector { data }
    }

    pub fn from_real(data: &[f64]) -> Self {
        Self::from_vec(data.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_vec(vec![ZERO; dim])
    }

    /// The `i`-th standard basis vector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[i] = ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex> {
        self.data.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: Complex) -> Self {
        Self::from_vec(self.data.iter().map(|z| z * c).collect())
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self::from_vec(self.data.iter().map(|z| z * c).collect())
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale_real(1.0 / n))
    }

    pub fn conj(&self) -> Self {
        Self::from_vec(self.data.iter().map(|z| z.conj()).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self::from_vec(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(x, y)| x + c * y)
                .collect(),
        )
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Appends one coordinate, giving a vector of `C^n + C`.
    pub fn extended(&self, last: Complex) -> Self {
        let mut data = self.data.clone();
        data.push(last);
        Self::from_vec(data)
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex;
    fn index(&self, i: usize) -> &Complex {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex {
        &mut self.data[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        self.axpy(ONE, rhs)
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        self.axpy(-ONE, rhs)
    }
}

impl Neg for &ComplexVector {
    type Output = ComplexVector;
    fn neg(self) -> ComplexVector {
        self.scale_real(-1.0)
    }
}

/// `<x, y> = sum_i x_i conj(y_i)`.
pub fn inner(x: &ComplexVector, y: &ComplexVector) -> Result<Complex> {
    if x.dim() != y.dim() {
        return Err(Error::DimError {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(dot_unchecked(x, y))
}

pub(crate) fn dot_unchecked(x: &ComplexVector, y: &ComplexVector) -> Complex {
    x.data
        .iter()
        .zip(&y.data)
        .fold(ZERO, |acc, (a, b)| acc + a * b.conj())
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl TryFrom<MatrixRepr> for ComplexMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        ComplexMatrix::try_new(repr.rows, repr.cols, repr.data)
    }
}

impl From<ComplexMatrix> for MatrixRepr {
    fn from(m: ComplexMatrix) -> Self {
        MatrixRepr {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl ComplexMatrix {
    pub fn try_new(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidData("matrix must be at least 1x1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimError {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if !all_finite(&data) {
            return Err(Error::InvalidData("matrix has non-finite entries".into()));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![ONE; n])
    }

    pub fn from_diag(diag: &[Complex]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows of equal length. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[ComplexVector]) -> Self {
        let n = cols[0].dim();
        Self::from_fn(n, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn row(&self, i: usize) -> ComplexVector {
        ComplexVector::from_vec(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn set_column(&mut self, j: usize, v: &ComplexVector) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: Complex) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn mul_vec(&self, x: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, x.dim(), "matrix-vector dimension mismatch");
        ComplexVector::from_vec(
            (0..self.rows)
                .map(|i| {
                    self.data[i * self.cols..(i + 1) * self.cols]
                        .iter()
                        .zip(x.iter())
                        .fold(ZERO, |acc, (a, b)| acc + a * b)
                })
                .collect(),
        )
    }

    /// Copies the `rows x cols` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ComplexMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Block-diagonal matrix `[[self, 0], [0, last]]`.
    pub fn bordered(&self, last: Complex) -> Self {
        let mut m = Self::zeros(self.rows + 1, self.cols + 1);
        m.set_block(0, 0, self);
        m[(self.rows, self.cols)] = last;
        m
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |self - other|` entrywise.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |self^* self - I|`.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_diff(&Self::identity(self.rows))
    }

    /// `max |self - self^*|`.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_diff(&self.adjoint())
    }

    /// One Newton-Schulz step `U (3I - U^*U) / 2` towards the nearest unitary.
    pub fn polish_unitary(&self) -> Self {
        let n = self.rows;
        let gram = &self.adjoint() * self;
        let corr = ComplexMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { 3.0 } else { 0.0 };
            (Complex::new(d, 0.0) - gram[(i, j)]) * 0.5
        });
        self * &corr
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;
    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Conjugate transpose.
pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

/// Matrix of `x -> x + c <x, xi> xi`, i.e. `I + c xi xi^*`.
///
/// `xi = 0` yields the identity.
pub fn rank_one_update(c: Complex, xi: &ComplexVector) -> ComplexMatrix {
    let n = xi.dim();
    ComplexMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { ONE } else { ZERO };
        delta + c * xi[i] * xi[j].conj()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn inner_examples() {
        let e1 = ComplexVector::basis(3, 0);
        assert_eq!(inner(&e1, &e1).unwrap(), ONE);

        let x = ComplexVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.25)]);
        let y = ComplexVector::from_vec(vec![c(0.3, -1.0), c(2.0, 1.0)]);
        let iy = y.scale(c(0.0, 1.0));
        let lhs = inner(&x, &iy).unwrap();
        let rhs = c(0.0, -1.0) * inner(&x, &y).unwrap();
        assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-15);

        let p = ComplexVector::from_real(&[0.6, 0.0]);
        assert_abs_diff_eq!(inner(&p, &p).unwrap().re, 0.36, epsilon = 1e-15);
    }

    #[test]
    fn inner_dimension_mismatch() {
        let x = ComplexVector::zeros(2);
        let y = ComplexVector::zeros(3);
        assert_eq!(
            inner(&x, &y),
            Err(Error::DimError {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn adjoint_examples() {
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(adjoint(&i3), i3);
        let d = ComplexMatrix::from_diag(&[c(0.0, 1.0)]);
        assert_eq!(adjoint(&d), ComplexMatrix::from_diag(&[c(0.0, -1.0)]));
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, -1.0)],
            vec![c(0.0, 1.0), c(5.0, 0.0)],
        ]);
        assert_eq!(adjoint(&adjoint(&m)), m);
    }

    #[test]
    fn rank_one_update_examples() {
        let xi = ComplexVector::from_vec(vec![c(0.3, 0.4), c(-0.5, 0.1), c(0.2, 0.0)]);
        assert_eq!(rank_one_update(ZERO, &xi), ComplexMatrix::identity(3));

        let s = rank_one_update(ONE, &xi);
        let sxi = s.mul_vec(&xi);
        let want = xi.scale_real(1.0 + xi.norm_sqr());
        assert!((&sxi - &want).max_abs() < 1e-15);

        // y orthogonal to xi
        let y = ComplexVector::from_vec(vec![c(0.0, 0.0), c(0.2, 0.0), c(0.5, -0.1)]);
        let proj = inner(&y, &xi).unwrap() / xi.norm_sqr();
        let y = y.axpy(-proj, &xi);
        assert!(inner(&y, &xi).unwrap().norm() < 1e-15);
        assert!((&s.mul_vec(&y) - &y).max_abs() < 1e-15);
    }

    #[test]
    fn zero_xi_rank_one_is_identity() {
        let s = rank_one_update(c(2.0, 1.0), &ComplexVector::zeros(4));
        assert_eq!(s, ComplexMatrix::identity(4));
    }

    #[test]
    fn json_shapes() {
        let v = ComplexVector::from_vec(vec![c(1.0, -2.0), c(0.5, 0.0)]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"dim":2,"data":[[1.0,-2.0],[0.5,0.0]]}"#);
        let m = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"rows":2,"cols":2,"data":[[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,1.0]]}"#
        );
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn json_rejects_bad_shapes() {
        assert!(serde_json::from_str::<ComplexVector>(r#"{"dim":3,"data":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<ComplexVector>(r#"{"dim":0,"data":[]}"#).is_err());
        assert!(
            serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err()
        );
    }

    #[test]
    fn polish_unitary_reduces_residual() {
        let theta: f64 = 0.3;
        let mut u = ComplexMatrix::from_rows(&[
            vec![c(theta.cos(), 0.0), c(-theta.sin(), 0.0)],
            vec![c(theta.sin(), 0.0), c(theta.cos(), 0.0)],
        ]);
        u[(0, 0)] += c(1e-7, 0.0);
        let before = u.unitarity_residual();
        let after = u.polish_unitary().unitarity_residual();
        assert!(before > 1e-8);
        assert!(after < 1e-13, "{after}");
    }
}
