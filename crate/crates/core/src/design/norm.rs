//! The 2→2 norm of `R^ℓ` restricted to `K`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rmap::apply_r_composed;
use crate::cvdisc::DiscretizationConfig;
use crate::error::{Error, Result};
use crate::opalg::{decompose_ak, hs_inner, pair_index, ComplexMatrix, PairBasisOperator, PairKind};

/// Largest `d` the dense superoperator is built for without `allow_large`.
pub const BRUTE_FORCE_MAX_D: usize = 6;
/// Largest `d` the structured computation accepts without `allow_large`.
pub const STRUCTURED_MAX_D: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMethod {
    BruteForce,
    RankStructured,
}

/// Entries of the coefficient map of `R^ℓ` on `K`: each output ladder
/// coefficient is `ladder · (its input sum) + cross · c`, and the output
/// `E` coefficient is `diag · c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StructureCoefficients {
    pub ladder: f64,
    pub cross: f64,
    pub diag: f64,
}

impl StructureCoefficients {
    pub fn new(d: usize, ell: u32) -> Self {
        let df = d as f64;
        let e = ell as i32;
        Self {
            ladder: df.powi(-(e + 1)),
            cross: (1.0 - df.powi(-e)) / ((df - 1.0) * df.powi(e + 1)),
            diag: df.powi(-(2 * e + 1)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwirlReport {
    pub d: usize,
    pub ell: u32,
    pub norm_2to2_on_k: f64,
    pub bound: f64,
    pub method: NormMethod,
    /// Disagreement with an independent computation of the same norm.
    pub residual_vs_oracle: f64,
    pub coefficients: StructureCoefficients,
}

impl TwirlReport {
    pub fn within_bound(&self) -> bool {
        self.norm_2to2_on_k <= self.bound + 1e-10
    }
}

pub fn norm_on_k(cfg: &DiscretizationConfig, ell: u32, method: NormMethod) -> Result<TwirlReport> {
    norm_on_k_guarded(cfg, ell, method, false)
}

/// As [`norm_on_k`]; `allow_large` lifts the dimension guards.
pub fn norm_on_k_guarded(cfg: &DiscretizationConfig, ell: u32, method: NormMethod, allow_large: bool) -> Result<TwirlReport> {
    let d = cfg.d;
    if ell == 0 {
        return Err(Error::Parameter("ell must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::DegenerateDimension(d));
    }
    let (norm, residual) = match method {
        NormMethod::BruteForce => {
            if d > BRUTE_FORCE_MAX_D && !allow_large {
                let n = d.pow(4);
                let bytes = (n * (n - 2) * 16) as f64;
                return Err(Error::ResourceGuard(format!(
                    "brute force at d = {d} needs a {n}x{} complex matrix (about {:.1} GiB); pass allow_large to proceed",
                    n - 2,
                    bytes / (1u64 << 30) as f64
                )));
            }
            let brute = brute_force_norm(cfg, ell);
            let (structured, _) = structured_norm(d, ell);
            (brute, (brute - structured).abs())
        }
        NormMethod::RankStructured => {
            if d > STRUCTURED_MAX_D && !allow_large {
                return Err(Error::ResourceGuard(format!("structured norm supports d <= {STRUCTURED_MAX_D}, got {d}")));
            }
            let (norm, cross_check) = structured_norm(d, ell);
            (norm, (norm - cross_check).abs())
        }
    };
    Ok(TwirlReport {
        d,
        ell,
        norm_2to2_on_k: norm,
        bound: (d as f64).powi(-(ell as i32)),
        method,
        residual_vs_oracle: residual,
        coefficients: StructureCoefficients::new(d, ell),
    })
}

/// Operators whose span contains `R(K)`: `L_1..L_{d-1}, M_1..M_{d-1}, E`.
fn span_operators(d: usize) -> Vec<PairBasisOperator> {
    let ladders = (1..d as i64).map(|u| PairBasisOperator::new(PairKind::LadderDiag(u), d).expect("u in 1..d"));
    let swaps = (1..d as i64).map(|u| PairBasisOperator::new(PairKind::LadderSwap(u), d).expect("u in 1..d"));
    ladders.chain(swaps).chain(std::iter::once(PairBasisOperator::diag_projector(d))).collect()
}

/// `(Tr O, Tr FO)` from the sparse entries.
fn traces(op: &PairBasisOperator) -> (f64, f64) {
    let d = op.d();
    let swap = |k: usize| pair_index(k % d, k / d, d);
    op.entries().iter().fold((0.0, 0.0), |(t, tf), &(r, c, v)| {
        (t + if r == c { v.re } else { 0.0 }, tf + if c == swap(r) { v.re } else { 0.0 })
    })
}

/// `R^ℓ|_K = O C W†` with `O` the span operators (`O†O = d·I`), `C` the
/// coefficient map and `W` their projections onto `K`. Returns
/// `σ_max(√d · C · G_W^{1/2})` and, as a cross-check that avoids the
/// matrix square root, `√(d · λ_max(C G_W Cᵀ))`.
fn structured_norm(d: usize, ell: u32) -> (f64, f64) {
    let ops = span_operators(d);
    let m = ops.len();
    let df = d as f64;
    let det = df * df * (df * df - 1.0);
    let tr: Vec<(f64, f64)> = ops.iter().map(traces).collect();
    let a_coeffs: Vec<(f64, f64)> =
        tr.iter().map(|&(t, tf)| ((t * df * df - tf * df) / det, (tf * df * df - t * df) / det)).collect();
    let gram = DMatrix::from_fn(m, m, |j, k| {
        let own = if j == k { df } else { 0.0 };
        let (a, f) = a_coeffs[k];
        own - (a * tr[j].0 + f * tr[j].1)
    });
    let sc = StructureCoefficients::new(d, ell);
    let e = m - 1;
    let coeff = DMatrix::from_fn(m, m, |r, c| {
        if r == e {
            if c == e { sc.diag } else { 0.0 }
        } else if c == r {
            sc.ladder
        } else if c == e {
            sc.cross
        } else {
            0.0
        }
    });
    let eig = gram.clone().symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let sqrt_gram = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let composite = (&coeff * sqrt_gram) * df.sqrt();
    let norm = composite.singular_values().max();
    let cgc = &coeff * &gram * coeff.transpose();
    let cross = (df * cgc.symmetric_eigen().eigenvalues.max().max(0.0)).sqrt();
    (norm, cross)
}

/// Orthonormal basis of `K`: matrix units in lexicographic order, projected
/// onto `K` and Gram–Schmidt orthonormalised, dropping residuals below `1e-8`.
///
/// Units off the supports of `I` and `F` already lie in `K` and are
/// orthogonal to every other projected unit, so only the units on those
/// supports need the orthogonalisation pass; the result is the same as
/// running it over every unit.
pub fn k_basis(d: usize) -> Result<Vec<ComplexMatrix>> {
    let n = d * d;
    let swap = |k: usize| pair_index(k % d, k / d, d);
    let mut basis: Vec<ComplexMatrix> = Vec::with_capacity(n * n - 2);
    let mut structured: Vec<usize> = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let mut unit = ComplexMatrix::zeros(n, n);
            unit.set(r, c, C64::new(1.0, 0.0));
            if r != c && c != swap(r) {
                basis.push(unit);
                continue;
            }
            let mut v = decompose_ak(&unit, d)?.k_part;
            for &j in &structured {
                let b: &ComplexMatrix = &basis[j];
                let proj = hs_inner(b, &v)?;
                v = &v - &b.scale(proj);
            }
            let norm = v.frobenius_norm();
            if norm >= 1e-8 {
                structured.push(basis.len());
                basis.push(v.scale_real(1.0 / norm));
            }
        }
    }
    Ok(basis)
}

/// Largest singular value of `R^ℓ` on `K`, each column `R^ℓ(b_k)` computed
/// by composing the exact twirls. Since `R` maps `K` into itself, the
/// columns in the ambient basis have the same singular values as the
/// matrix in the `K` basis.
fn brute_force_norm(cfg: &DiscretizationConfig, ell: u32) -> f64 {
    let d = cfg.d;
    let n = d * d;
    let basis = k_basis(d).expect("d >= 2 checked by caller");
    let columns: Vec<Vec<C64>> = basis
        .par_iter()
        .map(|b| {
            let mut y = b.clone();
            for _ in 0..ell {
                y = apply_r_composed(cfg, &y).expect("shape is d^2 x d^2");
            }
            y.to_row_major()
        })
        .collect();
    let mat = DMatrix::from_fn(n * n, columns.len(), |r, c| columns[c][r]);
    ComplexMatrix::from_nalgebra(mat).singular_values().first().copied().unwrap_or(0.0)
}
