//! Complex dense linear algebra: inner products, Schatten norms, the
//! structural two-copy operators and the orthogonal split of two-copy
//! operators into `A = span{I, F}` and its complement `K`.

mod matrix;
mod pair;

pub use matrix::{ComplexMatrix, DENSITY_HERMITIAN_TOL, DENSITY_PSD_TOL, DENSITY_TRACE_TOL};
pub use pair::{offset_residue, pair_index, swap_trace, PairBasisOperator, PairKind};
pub(crate) use pair::shift;

use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};

/// Hilbert–Schmidt inner product `Tr x† y`.
pub fn hs_inner(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<C64> {
    x.check_shape_like(y, "inner product")?;
    Ok(x.as_nalgebra().iter().zip(y.as_nalgebra().iter()).map(|(a, b)| a.conj() * b).sum())
}

/// Schatten `p`-norm of a square operator, `p ∈ {1, 2}`.
pub fn schatten_norm(x: &ComplexMatrix, p: f64) -> Result<f64> {
    if !x.is_square() {
        return Err(Error::Dimension(format!("Schatten norm of a {}x{} matrix", x.rows(), x.cols())));
    }
    singular_value_norm(x, p)
}

/// Half the Schatten 1-norm.
pub fn trace_norm(x: &ComplexMatrix) -> Result<f64> {
    Ok(0.5 * schatten_norm(x, 1.0)?)
}

/// Trace distance `½‖a − b‖₁`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    trace_norm(&a.try_sub(b)?)
}

/// Schatten-type norm from singular values; accepts rectangular input.
pub fn singular_value_norm(x: &ComplexMatrix, p: f64) -> Result<f64> {
    if p == 2.0 {
        Ok(x.frobenius_norm())
    } else if p == 1.0 {
        Ok(x.singular_values().iter().sum())
    } else {
        Err(Error::UnsupportedParameter(format!("Schatten p = {p} (supported: 1, 2)")))
    }
}

/// The orthogonal split `x = a·I + f·F + k` with `k ⊥ I, F`.
#[derive(Clone, Debug)]
pub struct AKDecomposition {
    pub a_coeff: C64,
    pub f_coeff: C64,
    pub k_part: ComplexMatrix,
}

impl AKDecomposition {
    /// `a·I + f·F`
    pub fn a_part(&self, d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for (r, c, v) in PairBasisOperator::identity(d).entries() {
            m.set(r, c, m.get(r, c) + self.a_coeff * v);
        }
        for (r, c, v) in PairBasisOperator::swap(d).entries() {
            m.set(r, c, m.get(r, c) + self.f_coeff * v);
        }
        m
    }

    /// Frobenius norm of the `A` component, `‖aI + fF‖₂`.
    pub fn a_norm(&self, d: usize) -> f64 {
        let (a, f) = (self.a_coeff, self.f_coeff);
        let d = d as f64;
        // ‖aI + fF‖² = |a|²d² + |f|²d² + 2 Re(a* f) d
        ((a.norm_sqr() + f.norm_sqr()) * d * d + 2.0 * (a.conj() * f).re * d).max(0.0).sqrt()
    }
}

/// Splits a two-copy operator into its `span{I, F}` and `K` components.
pub fn decompose_ak(x: &ComplexMatrix, d: usize) -> Result<AKDecomposition> {
    if d < 2 {
        return Err(Error::DegenerateDimension(d));
    }
    let n = d * d;
    if x.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "two-copy operator for d = {d} must be {n}x{n}, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let tr = x.trace();
    let trf = swap_trace(x, d);
    // Gram system: [d² d; d d²] (a, f) = (Tr x, Tr Fx)
    let df = d as f64;
    let det = df * df * (df * df - 1.0);
    let a_coeff = (tr * (df * df) - trf * df) / det;
    let f_coeff = (trf * (df * df) - tr * df) / det;
    let mut k_part = x.clone();
    for i in 0..n {
        k_part.set(i, i, k_part.get(i, i) - a_coeff);
    }
    for a in 0..d {
        for b in 0..d {
            let (r, c) = (pair_index(a, b, d), pair_index(b, a, d));
            k_part.set(r, c, k_part.get(r, c) - f_coeff);
        }
    }
    Ok(AKDecomposition { a_coeff, f_coeff, k_part })
}

/// Projection onto `K`.
pub fn project_k(x: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    Ok(decompose_ak(x, d)?.k_part)
}

/// Matrix with entries whose real and imaginary parts are uniform on `[-1, 1)`.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    })
}

/// Random Hermitian matrix built as `(m + m†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let m = random_matrix(n, n, rng);
    (&m + &m.adjoint()).scale_real(0.5)
}
