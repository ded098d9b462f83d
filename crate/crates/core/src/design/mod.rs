//! Boxed phase unitaries and their twirls on one and two copies.

mod discrete;
mod mc;
mod norm;
mod rmap;

pub use discrete::{discrete_double_twirl, discrete_double_twirl_literal, is_prime};
pub use mc::{mc_double_twirl, TwirlFamily};
pub use norm::{k_basis, norm_on_k, norm_on_k_guarded, NormMethod, StructureCoefficients, TwirlReport};
pub use rmap::{
    apply_r, apply_r_composed, apply_r_power, apply_r_power_projecting, k_membership_residual, KCoefficients,
    PowerCoefficients, ProjectedPower, K_MEMBERSHIP_TOL,
};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cvdisc::{dft_matrix, DiscretizationConfig, IndexConvention};
use crate::error::{Error, Result};
use crate::opalg::ComplexMatrix;

/// Which quadrature the phase is diagonal in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Q,
    P,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParameterMode {
    /// `α, β` real in `[0, d)`.
    Continuous,
    /// `α, β` integer labels, `d` an odd prime.
    IntegerModD,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxedUnitaryParams {
    pub basis: Basis,
    pub alpha: f64,
    pub beta: f64,
    pub mode: ParameterMode,
}

impl BoxedUnitaryParams {
    pub fn continuous(basis: Basis, alpha: f64, beta: f64) -> Self {
        Self { basis, alpha, beta, mode: ParameterMode::Continuous }
    }

    pub fn validate(&self, cfg: &DiscretizationConfig) -> Result<()> {
        let d = cfg.d as f64;
        match self.mode {
            ParameterMode::Continuous => {
                for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
                    if !(0.0..d).contains(&v) {
                        return Err(Error::Parameter(format!("{name} = {v} is outside [0, {d})")));
                    }
                }
            }
            ParameterMode::IntegerModD => {
                if cfg.convention != IndexConvention::OddCentered || !is_prime(cfg.d) {
                    return Err(Error::Primality(cfg.d));
                }
                for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
                    if v.fract() != 0.0 || cfg.position(v as i64).is_none() {
                        return Err(Error::Parameter(format!("{name} = {v} is not an integer label")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// `ω^{α i + β i²}` over the labels, in position order.
pub fn phase_diagonal(cfg: &DiscretizationConfig, alpha: f64, beta: f64) -> Vec<C64> {
    cfg.labels()
        .into_iter()
        .map(|i| {
            let i = i as f64;
            cfg.omega_pow(alpha * i + beta * i * i)
        })
        .collect()
}

/// `V_{αβ}` in the Q basis, or `F V_{αβ} F†` in the P basis.
pub fn boxed_unitary(cfg: &DiscretizationConfig, params: &BoxedUnitaryParams) -> Result<ComplexMatrix> {
    params.validate(cfg)?;
    let v = ComplexMatrix::from_diagonal(&phase_diagonal(cfg, params.alpha, params.beta));
    Ok(match params.basis {
        Basis::Q => v,
        Basis::P => v.conjugate_by(&dft_matrix(cfg)),
    })
}

/// Removes every Q-basis coherence: `E_{αβ} V ρ V† = diag(ρ)`.
pub fn exact_single_twirl(cfg: &DiscretizationConfig, basis: Basis, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(rho, cfg.d)?;
    let dephase = |m: &ComplexMatrix| {
        ComplexMatrix::from_fn(cfg.d, cfg.d, |i, j| if i == j { m.get(i, i) } else { C64::new(0.0, 0.0) })
    };
    Ok(match basis {
        Basis::Q => dephase(rho),
        Basis::P => {
            let f = dft_matrix(cfg);
            dephase(&rho.conjugate_by(&f.adjoint())).conjugate_by(&f)
        }
    })
}

/// `F ⊗ F`
pub fn two_copy_fourier(cfg: &DiscretizationConfig) -> ComplexMatrix {
    let f = dft_matrix(cfg);
    f.kron(&f)
}

/// Keeps entry `(ab),(a'b')` iff `{a', b'} = {a, b}`.
pub(crate) fn q_mask(x: &ComplexMatrix, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (a, b, ap, bp) = (r / d, r % d, c / d, c % d);
        if (a == ap && b == bp) || (a == bp && b == ap) {
            x.get(r, c)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Applies a Q-basis map in the Fourier frame: `FF · f(FF† x FF) · FF†`.
pub(crate) fn in_p_frame(x: &ComplexMatrix, ff: &ComplexMatrix, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    f(&x.conjugate_by(&ff.adjoint())).conjugate_by(ff)
}

/// Exact two-fold twirl over the continuous `(α, β)` family in one basis.
pub fn exact_double_twirl(cfg: &DiscretizationConfig, basis: Basis, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = cfg.d;
    check_square(x, d * d)?;
    Ok(match basis {
        Basis::Q => q_mask(x, d),
        Basis::P => in_p_frame(x, &two_copy_fourier(cfg), |y| q_mask(y, d)),
    })
}

pub(crate) fn check_square(x: &ComplexMatrix, n: usize) -> Result<()> {
    if x.shape() != (n, n) {
        return Err(Error::Dimension(format!("expected a {n}x{n} operator, got {}x{}", x.rows(), x.cols())));
    }
    Ok(())
}
