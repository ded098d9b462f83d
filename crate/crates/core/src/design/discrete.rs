//! Two-fold twirl over integer parameters `α, β ∈ I_d`, exact for prime `d`.

use num_complex::Complex64 as C64;

use super::{check_square, in_p_frame, phase_diagonal, two_copy_fourier, Basis};
use crate::cvdisc::DiscretizationConfig;
use crate::error::{Error, Result};
use crate::opalg::ComplexMatrix;

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

fn check_dimension(cfg: &DiscretizationConfig, force: bool) -> Result<()> {
    if !force && !(cfg.d % 2 == 1 && is_prime(cfg.d)) {
        return Err(Error::Primality(cfg.d));
    }
    Ok(())
}

/// Keeps entry `(ij),(i'j')` iff `i + j ≡ i' + j'` and `i² + j² ≡ i'² + j'²` mod `d`.
fn modular_mask(cfg: &DiscretizationConfig, x: &ComplexMatrix) -> ComplexMatrix {
    let d = cfg.d;
    let m = d as i64;
    let labels = cfg.labels();
    ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (labels[r / d], labels[r % d]);
        let (ip, jp) = (labels[c / d], labels[c % d]);
        let lin = (i + j - ip - jp).rem_euclid(m) == 0;
        let quad = (i * i + j * j - ip * ip - jp * jp).rem_euclid(m) == 0;
        if lin && quad {
            x.get(r, c)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Average of `V^{⊗2} X V^{†⊗2}` over all `d²` integer pairs `(α, β)`, by the
/// modular Kronecker rule. `force` admits non-prime `d`.
pub fn discrete_double_twirl(cfg: &DiscretizationConfig, basis: Basis, x: &ComplexMatrix, force: bool) -> Result<ComplexMatrix> {
    check_dimension(cfg, force)?;
    check_square(x, cfg.d * cfg.d)?;
    Ok(match basis {
        Basis::Q => modular_mask(cfg, x),
        Basis::P => in_p_frame(x, &two_copy_fourier(cfg), |y| modular_mask(cfg, y)),
    })
}

fn literal_q(cfg: &DiscretizationConfig, x: &ComplexMatrix) -> ComplexMatrix {
    let d = cfg.d;
    let labels = cfg.labels();
    let mut acc = ComplexMatrix::zeros(d * d, d * d);
    for &alpha in &labels {
        for &beta in &labels {
            let v = phase_diagonal(cfg, alpha as f64, beta as f64);
            let w: Vec<C64> = (0..d * d).map(|k| v[k / d] * v[k % d]).collect();
            acc = &acc + &ComplexMatrix::from_fn(d * d, d * d, |r, c| w[r] * x.get(r, c) * w[c].conj());
        }
    }
    acc.scale_real(1.0 / (d * d) as f64)
}

/// The same average computed by explicit summation over every `(α, β)`.
pub fn discrete_double_twirl_literal(
    cfg: &DiscretizationConfig,
    basis: Basis,
    x: &ComplexMatrix,
    force: bool,
) -> Result<ComplexMatrix> {
    check_dimension(cfg, force)?;
    check_square(x, cfg.d * cfg.d)?;
    Ok(match basis {
        Basis::Q => literal_q(cfg, x),
        Basis::P => in_p_frame(x, &two_copy_fourier(cfg), |y| literal_q(cfg, y)),
    })
}
