//! The round map `R = G_Q ∘ G_P ∘ G_Q` in closed form, and its powers on `K`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::{check_square, exact_double_twirl, Basis};
use crate::cvdisc::DiscretizationConfig;
use crate::error::{Error, Result};
use crate::opalg::{decompose_ak, pair_index, shift, swap_trace, ComplexMatrix};

/// Tolerance on the `A`-component norm, relative to `max(1, ‖X‖₂)`, for an
/// operator to count as an element of `K`.
pub const K_MEMBERSHIP_TOL: f64 = 1e-10;

/// The linear functionals of `X` that `R` depends on.
///
/// `s[u-1]`, `t[u-1]` hold the offset-`u` ladder sums for `u = 1..d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KCoefficients {
    pub s: Vec<C64>,
    pub t: Vec<C64>,
    pub c: C64,
}

impl KCoefficients {
    pub fn of(x: &ComplexMatrix, d: usize) -> Self {
        let zero = C64::new(0.0, 0.0);
        let mut s = vec![zero; d - 1];
        let mut t = vec![zero; d - 1];
        let mut c = zero;
        for a in 0..d {
            c += x.get(pair_index(a, a, d), pair_index(a, a, d));
            for u in 1..d {
                let b = shift(a, u, d);
                s[u - 1] += x.get(pair_index(a, b, d), pair_index(a, b, d));
                t[u - 1] += x.get(pair_index(a, b, d), pair_index(b, a, d));
            }
        }
        Self { s, t, c }
    }
}

/// `Σ ξ_u L_u + Σ λ_u M_u + η E`
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerCoefficients {
    pub xi: Vec<C64>,
    pub lambda: Vec<C64>,
    pub eta: C64,
}

impl PowerCoefficients {
    /// Coefficients after `ell` rounds applied to an element of `K`.
    pub fn after(k: &KCoefficients, d: usize, ell: u32) -> Self {
        let df = d as f64;
        let lead = df.powi(-(ell as i32 + 1));
        let g = (1.0 - df.powi(-(ell as i32))) / ((df - 1.0) * df.powi(ell as i32 + 1));
        Self {
            xi: k.s.iter().map(|s| s * lead + k.c * g).collect(),
            lambda: k.t.iter().map(|t| t * lead + k.c * g).collect(),
            eta: k.c * df.powi(-(2 * ell as i32 + 1)),
        }
    }

    pub fn materialize(&self, d: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for a in 0..d {
            let k = pair_index(a, a, d);
            m.set(k, k, self.eta);
            for u in 1..d {
                let b = shift(a, u, d);
                let (r, c) = (pair_index(a, b, d), pair_index(b, a, d));
                m.set(r, r, self.xi[u - 1]);
                m.set(r, c, self.lambda[u - 1]);
            }
        }
        m
    }
}

/// Closed form of one round for an arbitrary two-copy operator.
pub fn apply_r(cfg: &DiscretizationConfig, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = cfg.d;
    check_square(x, d * d)?;
    let df = d as f64;
    let (d2, d3) = (df * df, df * df * df);
    let k = KCoefficients::of(x, d);
    let tr = x.trace();
    let trf = swap_trace(x, d);
    // coefficient of (I + F − E), of I and of F
    let w = k.c / d3 - tr / d3 - trf / d3;
    let ci = tr / d2;
    let cf = trf / d2;
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        let aa = pair_index(a, a, d);
        // I + F − E is 1 on |aa⟩⟨aa|
        m.set(aa, aa, w + ci + cf);
        for u in 1..d {
            let b = shift(a, u, d);
            let (r, c) = (pair_index(a, b, d), pair_index(b, a, d));
            m.set(r, r, k.s[u - 1] / d2 + w + ci);
            m.set(r, c, k.t[u - 1] / d2 + w + cf);
        }
    }
    Ok(m)
}

/// One round as the literal composition of the three exact twirls.
pub fn apply_r_composed(cfg: &DiscretizationConfig, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let y = exact_double_twirl(cfg, Basis::Q, x)?;
    let y = exact_double_twirl(cfg, Basis::P, &y)?;
    exact_double_twirl(cfg, Basis::Q, &y)
}

/// `A`-component norm of `x` and the tolerance it is held to.
pub fn k_membership_residual(x: &ComplexMatrix, d: usize) -> Result<(f64, f64)> {
    let dec = decompose_ak(x, d)?;
    Ok((dec.a_norm(d), K_MEMBERSHIP_TOL * x.frobenius_norm().max(1.0)))
}

fn check_ell(ell: u32) -> Result<()> {
    if ell == 0 {
        return Err(Error::Parameter("ell must be at least 1".into()));
    }
    Ok(())
}

/// `R^ℓ(X)` for `X ∈ K` from the closed-form coefficients.
pub fn apply_r_power(cfg: &DiscretizationConfig, x: &ComplexMatrix, ell: u32) -> Result<ComplexMatrix> {
    check_ell(ell)?;
    let d = cfg.d;
    let (residual, tolerance) = k_membership_residual(x, d)?;
    if residual > tolerance {
        return Err(Error::SubspaceViolation { residual, tolerance });
    }
    Ok(PowerCoefficients::after(&KCoefficients::of(x, d), d, ell).materialize(d))
}

#[derive(Clone, Debug)]
pub struct ProjectedPower {
    pub matrix: ComplexMatrix,
    /// Whether the input was outside `K` and had its `A` component removed.
    pub projected: bool,
    pub a_residual: f64,
}

/// As [`apply_r_power`], but inputs outside `K` are projected onto it first
/// and flagged instead of rejected.
pub fn apply_r_power_projecting(cfg: &DiscretizationConfig, x: &ComplexMatrix, ell: u32) -> Result<ProjectedPower> {
    check_ell(ell)?;
    let d = cfg.d;
    check_square(x, d * d)?;
    let dec = decompose_ak(x, d)?;
    let a_residual = dec.a_norm(d);
    let projected = a_residual > K_MEMBERSHIP_TOL * x.frobenius_norm().max(1.0);
    let input = if projected { &dec.k_part } else { x };
    let matrix = PowerCoefficients::after(&KCoefficients::of(input, d), d, ell).materialize(d);
    Ok(ProjectedPower { matrix, projected, a_residual })
}
