//! Dense complex matrices and the JSON interchange format.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Tolerances a matrix must meet to be accepted as a density matrix.
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
pub const DENSITY_PSD_TOL: f64 = 1e-10;
pub const DENSITY_TRACE_TOL: f64 = 1e-10;

/// A dense complex matrix.
///
/// Storage is delegated to `nalgebra`; the public constructors and the
/// serialized form are row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("shape {rows}x{cols} has a zero extent")));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self { inner: DMatrix::from_row_slice(rows, cols, &entries) })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { inner: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        Self { inner: DMatrix::identity(n, n) }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self { inner: DMatrix::from_fn(rows, cols, f) }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        Self { inner: m }
    }

    /// Real diagonal matrix, e.g. a spectrum of labels.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// `|v⟩⟨w|`
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn from_nalgebra(inner: DMatrix<C64>) -> Self {
        Self { inner }
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.inner[(i, j)] = v;
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        self.inner.transpose().as_slice().to_vec()
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.inner.trace()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.inner.diagonal().iter().copied().collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { inner: &self.inner * s }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { inner: self.inner.kronecker(&other.inner) }
    }

    /// Elementwise map.
    pub fn map(&self, f: impl FnMut(C64) -> C64) -> Self {
        Self { inner: self.inner.map(f) }
    }

    /// `U X U†`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self { inner: &u.inner * &self.inner * u.inner.adjoint() }
    }

    /// Frobenius (Schatten-2) norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff shape mismatch");
        self.inner.iter().zip(other.inner.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.inner.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Eigenvalues of a Hermitian matrix in increasing order. Only the
    /// lower triangle is read.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::Dimension(format!("eigenvalues of a {}x{} matrix", self.rows(), self.cols())));
        }
        let mut e: Vec<f64> = self.inner.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        Ok(e)
    }

    /// Checks Hermiticity, positivity and unit trace.
    pub fn validate_density(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotDensity(format!("shape {}x{} is not square", self.rows(), self.cols())));
        }
        let herm = self.hermiticity_defect();
        if herm > DENSITY_HERMITIAN_TOL {
            return Err(Error::NotDensity(format!("Hermiticity defect {herm:e}")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TRACE_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let min_eig = self.hermitian_eigenvalues()?[0];
        if min_eig < -DENSITY_PSD_TOL {
            return Err(Error::NotDensity(format!("minimum eigenvalue {min_eig:e}")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn check_same_shape(&self, other: &Self, what: &str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "{what}: {}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "addition")?;
        Ok(Self { inner: &self.inner + &other.inner })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other, "subtraction")?;
        Ok(Self { inner: &self.inner - &other.inner })
    }

    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self { inner: &self.inner * &other.inner })
    }

    pub(crate) fn check_shape_like(&self, other: &Self, what: &str) -> Result<()> {
        self.check_same_shape(other, what)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix addition shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix subtraction shape mismatch")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_matmul(rhs).expect("matrix product shape mismatch")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self.to_row_major();
        MatrixJson {
            rows: self.rows(),
            cols: self.cols(),
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.re.len() != raw.im.len() {
            return Err(serde::de::Error::custom(format!(
                "re has {} entries but im has {}",
                raw.re.len(),
                raw.im.len()
            )));
        }
        let entries = raw.re.iter().zip(&raw.im).map(|(&re, &im)| C64::new(re, im)).collect();
        ComplexMatrix::from_row_major(raw.rows, raw.cols, entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip_through_json() {
        let m = ComplexMatrix::from_row_major(
            2,
            3,
            (0..6).map(|k| C64::new(k as f64, -(k as f64) / 2.0)).collect(),
        )
        .unwrap();
        assert_eq!(m.get(0, 2), C64::new(2.0, -1.0));
        assert_eq!(m.get(1, 0), C64::new(3.0, -1.5));
        let json = m.to_json().unwrap();
        assert!(json.starts_with(r#"{"rows":2,"cols":3,"re":[0.0,1.0,2.0,3.0,4.0,5.0]"#));
        assert_eq!(ComplexMatrix::from_json(&json).unwrap(), m);
    }

    #[test]
    fn rejects_inconsistent_json() {
        let bad = r#"{"rows":2,"cols":2,"re":[1,0,0],"im":[0,0,0]}"#;
        assert!(ComplexMatrix::from_json(bad).is_err());
        let bad = r#"{"rows":1,"cols":2,"re":[1,0],"im":[0]}"#;
        assert!(ComplexMatrix::from_json(bad).is_err());
    }

    #[test]
    fn density_validation() {
        let rho = ComplexMatrix::from_real_diagonal(&[0.25, 0.75]);
        rho.validate_density().unwrap();
        let not_psd = ComplexMatrix::from_real_diagonal(&[-0.25, 1.25]);
        assert!(matches!(not_psd.validate_density(), Err(Error::NotDensity(_))));
        let mut not_herm = rho.clone();
        not_herm.set(0, 1, C64::new(0.0, 0.1));
        assert!(not_herm.validate_density().is_err());
        assert!(ComplexMatrix::identity(2).validate_density().is_err());
    }

    #[test]
    fn shape_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 2);
        assert!(matches!(a.try_add(&b), Err(Error::Dimension(_))));
        assert!(matches!(b.try_matmul(&ComplexMatrix::zeros(3, 3)), Err(Error::Dimension(_))));
        assert!(ComplexMatrix::from_row_major(0, 2, vec![]).is_err());
    }
}
