//! Experimental variant of the scheme for odd prime `d` with integer key
//! parameters. The origin label carries no sign and is left out of the
//! plaintext, which therefore lives on `d − 1` dimensions. No security
//! property is claimed for it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{decide, sign_weights, unitary_from_params, Ciphertext, Decryption, QecmKey, PARAMS_PER_ROUND};
use crate::cvdisc::{DiscretizationConfig, IndexConvention};
use crate::design::is_prime;
use crate::error::{Error, Result};
use crate::opalg::ComplexMatrix;

fn prime_sign(j: i64) -> Option<u8> {
    match j.signum() {
        1 => Some(0),
        -1 => Some(1),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PrimeQecm {
    cfg: DiscretizationConfig,
}

impl PrimeQecm {
    /// Refuses unless `experimental` is set and `d` is an odd prime.
    pub fn new(d: usize, experimental: bool) -> Result<Self> {
        if !experimental {
            return Err(Error::UnsupportedParameter("the prime-dimension scheme is experimental and must be enabled explicitly".into()));
        }
        if d % 2 == 0 || !is_prime(d) {
            return Err(Error::Primality(d));
        }
        Ok(Self { cfg: DiscretizationConfig::new(d, IndexConvention::OddCentered)? })
    }

    pub fn config(&self) -> &DiscretizationConfig {
        &self.cfg
    }

    /// `6ℓ` integer labels drawn uniformly from `I_d`, stored as reals in `[0, d)`.
    pub fn sample_key(&self, ell: u32, seed: u64) -> QecmKey {
        let d = self.cfg.d;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..PARAMS_PER_ROUND * ell as usize).map(|_| rng.random_range(0..d) as f64).collect();
        QecmKey { ell, params }
    }

    fn validate_key(&self, key: &QecmKey) -> Result<()> {
        key.validate(&self.cfg)?;
        if key.params.iter().any(|v| v.fract() != 0.0) {
            return Err(Error::Key("parameters of the prime scheme must be integers".into()));
        }
        Ok(())
    }

    /// Uniform mixture over the `(d − 1)/2` labels on side `x` of the origin.
    pub fn plaintext_state(&self, x: u8) -> Result<ComplexMatrix> {
        if x > 1 {
            return Err(Error::Parameter(format!("plaintext must be a bit, got {x}")));
        }
        let w = 2.0 / (self.cfg.d - 1) as f64;
        let diag: Vec<f64> = self.cfg.labels().into_iter().map(|j| if prime_sign(j) == Some(x) { w } else { 0.0 }).collect();
        Ok(ComplexMatrix::from_real_diagonal(&diag))
    }

    pub fn key_unitary(&self, key: &QecmKey) -> Result<ComplexMatrix> {
        self.validate_key(key)?;
        Ok(unitary_from_params(&self.cfg, &key.params))
    }

    pub fn encrypt(&self, x: u8, key: &QecmKey) -> Result<Ciphertext> {
        let u = self.key_unitary(key)?;
        Ok(Ciphertext { matrix: self.plaintext_state(x)?.conjugate_by(&u), d: self.cfg.d, ell: key.ell })
    }

    pub fn decrypt(&self, c: &Ciphertext, key: &QecmKey) -> Result<Decryption> {
        if c.d != self.cfg.d || c.ell != key.ell || c.matrix.shape() != (self.cfg.d, self.cfg.d) {
            return Err(Error::Dimension("ciphertext does not match the scheme or key".into()));
        }
        let u = self.key_unitary(key)?;
        let (p0, p1) = sign_weights(&self.cfg, &c.matrix.conjugate_by(&u.adjoint()), prime_sign);
        Ok(decide(p0, p1))
    }
}
