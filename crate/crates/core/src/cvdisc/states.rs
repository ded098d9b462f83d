//! Single-mode test wavefunctions in the position representation.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::quad::integrate_panels;
use super::DiscretizationConfig;
use crate::error::{Error, Result};

type Eval = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A normalised position-space wavefunction `ψ(q)`.
#[derive(Clone)]
pub struct Wavefunction {
    eval: Eval,
    /// `⟨p̂²⟩` when known in closed form.
    pub mean_psq: Option<f64>,
    pub label: String,
}

impl fmt::Debug for Wavefunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Wavefunction").field("label", &self.label).field("mean_psq", &self.mean_psq).finish()
    }
}

const PI_QUARTER: f64 = 0.751_125_544_464_942_5; // π^{-1/4}

impl Wavefunction {
    pub fn new(label: impl Into<String>, mean_psq: Option<f64>, eval: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(eval), mean_psq, label: label.into() }
    }

    #[inline]
    pub fn eval(&self, q: f64) -> C64 {
        (self.eval)(q)
    }

    pub fn vacuum() -> Self {
        Self::new("vacuum", Some(0.5), |q| C64::new(PI_QUARTER * (-0.5 * q * q).exp(), 0.0))
    }

    /// Number state `|n⟩` as a Hermite function, `⟨p̂²⟩ = n + 1/2`.
    pub fn fock(n: usize) -> Self {
        Self::new(format!("fock{n}"), Some(n as f64 + 0.5), move |q| C64::new(hermite_function(n, q), 0.0))
    }

    /// Coherent state `|α⟩` with `q₀ = √2 Re α`, `p₀ = √2 Im α`.
    pub fn coherent(alpha: C64) -> Self {
        let q0 = std::f64::consts::SQRT_2 * alpha.re;
        let p0 = std::f64::consts::SQRT_2 * alpha.im;
        Self::new(format!("coherent({},{})", alpha.re, alpha.im), Some(p0 * p0 + 0.5), move |q| {
            let x = q - q0;
            C64::new(-0.5 * x * x, p0 * q - 0.5 * q0 * p0).exp() * PI_QUARTER
        })
    }

    /// `∫|ψ|²` over the window widened by 6 on each side.
    pub fn norm_sqr_on(&self, cfg: &DiscretizationConfig) -> Result<f64> {
        let f = |q: f64| C64::new(self.eval(q).norm_sqr(), 0.0);
        Ok(integrate_panels(&f, -cfg.q_max - 6.0, cfg.q_max + 6.0, 1e-11)?.re)
    }

    /// Errors unless `∫|ψ|² = 1` within `1e-6` over the widened window.
    pub fn check_normalized(&self, cfg: &DiscretizationConfig) -> Result<()> {
        let n = self.norm_sqr_on(cfg)?;
        if (n - 1.0).abs() > 1e-6 {
            return Err(Error::Parameter(format!("wavefunction '{}' has norm² {n} over the window", self.label)));
        }
        Ok(())
    }

    /// `⟨p̂²⟩ = ∫|ψ'(q)|² dq`, with the derivative by central differences.
    pub fn mean_psq_numeric(&self, cfg: &DiscretizationConfig) -> Result<f64> {
        let h = 1e-4;
        let f = |q: f64| C64::new(((self.eval(q + h) - self.eval(q - h)) / (2.0 * h)).norm_sqr(), 0.0);
        Ok(integrate_panels(&f, -cfg.q_max - 6.0, cfg.q_max + 6.0, 1e-10)?.re)
    }

    /// The closed-form `⟨p̂²⟩` if known, otherwise the numeric one.
    pub fn mean_psq_or_numeric(&self, cfg: &DiscretizationConfig) -> Result<f64> {
        match self.mean_psq {
            Some(v) => Ok(v),
            None => self.mean_psq_numeric(cfg),
        }
    }
}

/// Normalised Hermite function `ψ_n(q)` by the stable three-term recurrence.
pub fn hermite_function(n: usize, q: f64) -> f64 {
    let mut prev = PI_QUARTER * (-0.5 * q * q).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = std::f64::consts::SQRT_2 * q * prev;
    for k in 1..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * q * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}
