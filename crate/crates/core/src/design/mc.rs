//! Monte-Carlo two-fold twirls over randomly drawn boxed unitaries.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_square, phase_diagonal, two_copy_fourier};
use crate::cvdisc::DiscretizationConfig;
use crate::error::{Error, Result};
use crate::opalg::ComplexMatrix;
use crate::rng::{deterministic_mean, sample_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TwirlFamily {
    /// `V_{αβ}`
    QOnly,
    /// `Ṽ_{αβ}`
    POnly,
    /// `V_{α''β''} Ṽ_{α'β'} V_{αβ}`
    Sandwich,
}

fn two_copy_phases<R: Rng>(cfg: &DiscretizationConfig, rng: &mut R) -> Vec<C64> {
    let d = cfg.d;
    let alpha = rng.random::<f64>() * d as f64;
    let beta = rng.random::<f64>() * d as f64;
    let v = phase_diagonal(cfg, alpha, beta);
    (0..d * d).map(|k| v[k / d] * v[k % d]).collect()
}

fn conjugate_diag(w: &[C64], x: &ComplexMatrix) -> ComplexMatrix {
    let n = w.len();
    ComplexMatrix::from_fn(n, n, |r, c| w[r] * x.get(r, c) * w[c].conj())
}

/// Empirical mean of `U^{⊗2} X U^{†⊗2}` over `n_samples` draws. Sample `i`
/// uses its own stream, so the result depends only on `(seed, n_samples)`.
pub fn mc_double_twirl(
    cfg: &DiscretizationConfig,
    family: TwirlFamily,
    x: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<ComplexMatrix> {
    let d = cfg.d;
    check_square(x, d * d)?;
    if n_samples == 0 {
        return Err(Error::Parameter("n_samples must be at least 1".into()));
    }
    let ff = two_copy_fourier(cfg);
    let ffh = ff.adjoint();
    match family {
        TwirlFamily::QOnly => Ok(deterministic_mean(n_samples, |i| {
            let w = two_copy_phases(cfg, &mut sample_rng(seed, i as u64));
            conjugate_diag(&w, x)
        })
        .expect("n_samples > 0")),
        TwirlFamily::POnly => {
            // Average in the Fourier frame and rotate back once.
            let y = x.conjugate_by(&ffh);
            let mean = deterministic_mean(n_samples, |i| {
                let w = two_copy_phases(cfg, &mut sample_rng(seed, i as u64));
                conjugate_diag(&w, &y)
            })
            .expect("n_samples > 0");
            Ok(mean.conjugate_by(&ff))
        }
        TwirlFamily::Sandwich => Ok(deterministic_mean(n_samples, |i| {
            let mut rng = sample_rng(seed, i as u64);
            let w1 = two_copy_phases(cfg, &mut rng);
            let w2 = two_copy_phases(cfg, &mut rng);
            let w3 = two_copy_phases(cfg, &mut rng);
            let y = conjugate_diag(&w1, x);
            let y = conjugate_diag(&w2, &y.conjugate_by(&ffh)).conjugate_by(&ff);
            conjugate_diag(&w3, &y)
        })
        .expect("n_samples > 0")),
    }
}
