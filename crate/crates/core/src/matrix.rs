//! Dense complex matrices and the sequence spaces they act between.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix. Zero rows or columns are allowed.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParams("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.iter().flatten().copied().collect() })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    /// Builds a matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::InvalidParams("column length mismatch".into()));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn from_diag_complex(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == ZERO))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Left multiplication by `diag(d)`: scales row `i` by `d[i]`.
    pub fn scale_rows(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.rows);
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[i])
    }

    /// Right multiplication by `diag(d)`: scales column `j` by `d[j]`.
    pub fn scale_cols(&self, d: &[f64]) -> Self {
        assert_eq!(d.len(), self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * d[j])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Relative Frobenius distance `‖self − other‖_F / max(‖other‖_F, tiny)`.
    pub fn relative_error(&self, reference: &Matrix) -> f64 {
        let diff = self.sub(reference).frobenius_norm();
        let scale = reference.frobenius_norm();
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Complex64>>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr { rows: self.rows, cols: self.cols, entries: (0..self.rows).map(|i| self.row(i).to_vec()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(d)?;
        if repr.entries.len() != repr.rows || repr.entries.iter().any(|r| r.len() != repr.cols) {
            return Err(D::Error::custom("matrix entries do not match declared shape"));
        }
        Ok(Matrix { rows: repr.rows, cols: repr.cols, data: repr.entries.into_iter().flatten().collect() })
    }
}

/// `p`-norm of a vector for `p ∈ [1, ∞]`.
pub fn vector_norm(v: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else if p == 1.0 {
        v.iter().map(|z| z.norm()).sum()
    } else if p == 2.0 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    } else {
        let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if top == 0.0 {
            return 0.0;
        }
        top * v.iter().map(|z| (z.norm() / top).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Hölder conjugate of `p ∈ [1, ∞]`.
pub fn dual_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// The finite-dimensional space `l_p^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeqSpace {
    pub dim: usize,
    #[serde(with = "crate::serde_ext::extended_f64")]
    pub p: f64,
}

impl SeqSpace {
    pub fn new(dim: usize, p: f64) -> Result<Self> {
        let space = SeqSpace { dim, p };
        space.validate()?;
        Ok(space)
    }

    pub fn l1(dim: usize) -> Self {
        SeqSpace { dim, p: 1.0 }
    }

    pub fn l2(dim: usize) -> Self {
        SeqSpace { dim, p: 2.0 }
    }

    pub fn linf(dim: usize) -> Self {
        SeqSpace { dim, p: f64::INFINITY }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidParams("sequence space dimension must be >= 1".into()));
        }
        if !(self.p >= 1.0) {
            return Err(Error::InvalidParams(format!("norm exponent must lie in [1, inf], got {}", self.p)));
        }
        Ok(())
    }

    pub fn norm(&self, v: &[Complex64]) -> f64 {
        vector_norm(v, self.p)
    }

    /// Norm of a functional on this space (norm in the dual space).
    pub fn dual_norm(&self, f: &[Complex64]) -> f64 {
        vector_norm(f, dual_exponent(self.p))
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }
}

impl fmt::Display for SeqSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_infinite() {
            write!(f, "l_inf^{}", self.dim)
        } else {
            write!(f, "l_{}^{}", self.p, self.dim)
        }
    }
}

/// A matrix regarded as an operator `source → target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseOperator {
    pub entries: Matrix,
    pub source: SeqSpace,
    pub target: SeqSpace,
}

impl DenseOperator {
    pub fn new(entries: Matrix, source: SeqSpace, target: SeqSpace) -> Result<Self> {
        if entries.rows() != target.dim || entries.cols() != source.dim {
            return Err(Error::SpaceMismatch(format!(
                "{}x{} matrix cannot act {} -> {}",
                entries.rows(),
                entries.cols(),
                source,
                target
            )));
        }
        Ok(DenseOperator { entries, source, target })
    }

    /// Operator between `l_2` spaces of matching dimensions.
    pub fn hilbert(entries: Matrix) -> Self {
        let (r, c) = (entries.rows(), entries.cols());
        DenseOperator { entries, source: SeqSpace::l2(c), target: SeqSpace::l2(r) }
    }

    /// Composition `self ∘ inner`.
    pub fn compose(&self, inner: &DenseOperator) -> Result<DenseOperator> {
        if inner.target != self.source {
            return Err(Error::SpaceMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, inner.source, inner.target
            )));
        }
        Ok(DenseOperator { entries: self.entries.matmul(&inner.entries), source: inner.source, target: self.target })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_adjoint() {
        let a = Matrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Matrix::from_fn(2, 1, |i, _| Complex64::new(i as f64, 1.0));
        let ab = a.matmul(&b);
        assert_eq!(ab[(0, 0)], Complex64::new(2.0, 3.0));
        assert_eq!(ab[(1, 0)], Complex64::new(4.0, 7.0));
        assert_eq!(b.adjoint()[(0, 1)], Complex64::new(1.0, -1.0));
    }

    #[test]
    fn empty_shapes_multiply() {
        let a = Matrix::zeros(3, 0);
        let b = Matrix::zeros(0, 2);
        let c = a.matmul(&b);
        assert_eq!((c.rows(), c.cols()), (3, 2));
        assert_eq!(c.frobenius_norm(), 0.0);
    }

    #[test]
    fn vector_norms() {
        let v = [Complex64::new(3.0, 4.0), Complex64::new(0.0, -1.0)];
        assert_eq!(vector_norm(&v, 1.0), 6.0);
        assert!((vector_norm(&v, 2.0) - 26f64.sqrt()).abs() < 1e-15);
        assert_eq!(vector_norm(&v, f64::INFINITY), 5.0);
        assert!((vector_norm(&v, 3.0) - 126f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(dual_exponent(1.0), f64::INFINITY);
        assert_eq!(dual_exponent(2.0), 2.0);
    }

    #[test]
    fn operator_shape_checked() {
        assert!(DenseOperator::new(Matrix::zeros(2, 3), SeqSpace::l1(3), SeqSpace::l2(2)).is_ok());
        assert!(DenseOperator::new(Matrix::zeros(2, 3), SeqSpace::l1(2), SeqSpace::l2(3)).is_err());
        assert!(SeqSpace::new(0, 1.0).is_err());
        assert!(SeqSpace::new(3, 0.5).is_err());
    }

    #[test]
    fn matrix_json_uses_re_im_pairs() {
        let m = Matrix::from_rows(&[vec![Complex64::new(1.0, -2.0)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":1,"entries":[[[1.0,-2.0]]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix>(r#"{"rows":2,"cols":1,"entries":[[[1.0,0.0]]]}"#).is_err());
    }
}
