//! One-bit quantum encryption of a classical message, keyed by `ℓ` rounds of
//! boxed phase unitaries.
//!
//! A plaintext bit `x` is encoded as the maximally mixed state on the
//! position labels whose sign bit is `x`; the key selects
//! `U_k = Π_rounds V'' Ṽ' V`, and decryption undoes `U_k` and measures the
//! sign bit.

mod prime;

pub use prime::PrimeQecm;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cvdisc::{dft_matrix, DiscretizationConfig, IndexConvention};
use crate::design::{exact_single_twirl, phase_diagonal, Basis};
use crate::error::{Error, Result};
use crate::opalg::ComplexMatrix;
use crate::rng::{deterministic_mean, sample_rng};

/// Parameters per round: `(α, β, α', β', α'', β'')`.
pub const PARAMS_PER_ROUND: usize = 6;
/// Decryption outcomes closer than this are reported as ambiguous.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QecmKey {
    pub ell: u32,
    pub params: Vec<f64>,
}

impl QecmKey {
    pub fn identity(ell: u32) -> Self {
        Self { ell, params: vec![0.0; PARAMS_PER_ROUND * ell as usize] }
    }

    pub fn validate(&self, cfg: &DiscretizationConfig) -> Result<()> {
        let expected = PARAMS_PER_ROUND * self.ell as usize;
        if self.params.len() != expected {
            return Err(Error::Key(format!("expected {expected} parameters for ell = {}, got {}", self.ell, self.params.len())));
        }
        let d = cfg.d as f64;
        if let Some(v) = self.params.iter().find(|v| !(0.0..d).contains(*v)) {
            return Err(Error::Key(format!("parameter {v} is outside [0, {d})")));
        }
        Ok(())
    }

    pub fn rounds(&self) -> impl Iterator<Item = &[f64]> {
        self.params.chunks(PARAMS_PER_ROUND)
    }
}

/// Position label `j` split into a sign bit and a distance from the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignDistIndex {
    pub sign: u8,
    pub dist: usize,
}

impl SignDistIndex {
    pub fn from_label(j: i64) -> Self {
        if j >= 0 {
            Self { sign: 0, dist: j as usize }
        } else {
            Self { sign: 1, dist: (-j - 1) as usize }
        }
    }

    pub fn to_label(self) -> i64 {
        match self.sign {
            0 => self.dist as i64,
            _ => -(self.dist as i64) - 1,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Ciphertext {
    pub matrix: ComplexMatrix,
    pub d: usize,
    pub ell: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Decryption {
    pub x_hat: u8,
    /// Probability mass of the returned sign outcome.
    pub confidence: f64,
    /// The two outcomes were equally likely; `x_hat` defaulted to 0.
    pub ambiguous: bool,
    pub p0: f64,
    pub p1: f64,
}

fn require_even(cfg: &DiscretizationConfig) -> Result<()> {
    if cfg.convention != IndexConvention::EvenCentered {
        return Err(Error::Parity(format!("the standard scheme needs an even d, got {}", cfg.d)));
    }
    Ok(())
}

fn check_bit(x: u8) -> Result<()> {
    if x > 1 {
        return Err(Error::Parameter(format!("plaintext must be a bit, got {x}")));
    }
    Ok(())
}

pub(crate) fn draw_params<R: Rng>(d: usize, ell: u32, rng: &mut R) -> Vec<f64> {
    (0..PARAMS_PER_ROUND * ell as usize).map(|_| rng.random::<f64>() * d as f64).collect()
}

/// `6ℓ` independent uniform draws from `[0, d)`.
pub fn sample_key(cfg: &DiscretizationConfig, ell: u32, seed: u64) -> Result<QecmKey> {
    require_even(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(QecmKey { ell, params: draw_params(cfg.d, ell, &mut rng) })
}

/// Key number `index` of a seeded sequence, one ChaCha stream per index.
pub fn sample_key_indexed(cfg: &DiscretizationConfig, ell: u32, seed: u64, index: u64) -> Result<QecmKey> {
    require_even(cfg)?;
    let mut rng = crate::rng::sample_rng(seed, index);
    Ok(QecmKey { ell, params: draw_params(cfg.d, ell, &mut rng) })
}

/// `|x⟩⟨x|_sign ⊗ τ_dist`: weight `2/d` on every label with sign bit `x`.
pub fn plaintext_state(cfg: &DiscretizationConfig, x: u8) -> Result<ComplexMatrix> {
    require_even(cfg)?;
    check_bit(x)?;
    let w = 2.0 / cfg.d as f64;
    let diag: Vec<f64> =
        cfg.labels().into_iter().map(|j| if SignDistIndex::from_label(j).sign == x { w } else { 0.0 }).collect();
    Ok(ComplexMatrix::from_real_diagonal(&diag))
}

/// Product of rounds, round 1 applied first, without range checks.
pub(crate) fn unitary_from_params(cfg: &DiscretizationConfig, params: &[f64]) -> ComplexMatrix {
    let f = dft_matrix(cfg);
    let fh = f.adjoint();
    let mut u = ComplexMatrix::identity(cfg.d);
    for r in params.chunks(PARAMS_PER_ROUND) {
        let v1 = ComplexMatrix::from_diagonal(&phase_diagonal(cfg, r[0], r[1]));
        let v2 = &(&f * &ComplexMatrix::from_diagonal(&phase_diagonal(cfg, r[2], r[3]))) * &fh;
        let v3 = ComplexMatrix::from_diagonal(&phase_diagonal(cfg, r[4], r[5]));
        u = &(&(&v3 * &v2) * &v1) * &u;
    }
    u
}

pub fn key_unitary(cfg: &DiscretizationConfig, key: &QecmKey) -> Result<ComplexMatrix> {
    key.validate(cfg)?;
    Ok(unitary_from_params(cfg, &key.params))
}

pub fn encrypt(cfg: &DiscretizationConfig, x: u8, key: &QecmKey) -> Result<Ciphertext> {
    let rho = plaintext_state(cfg, x)?;
    let u = key_unitary(cfg, key)?;
    Ok(Ciphertext { matrix: rho.conjugate_by(&u), d: cfg.d, ell: key.ell })
}

/// Sign-bit probabilities of a state diagonal-read in the Q basis; labels
/// for which `sign_of` is `None` are ignored.
pub(crate) fn sign_weights(cfg: &DiscretizationConfig, rho: &ComplexMatrix, sign_of: impl Fn(i64) -> Option<u8>) -> (f64, f64) {
    cfg.labels().into_iter().enumerate().fold((0.0, 0.0), |(p0, p1), (pos, j)| {
        let w = rho.get(pos, pos).re;
        match sign_of(j) {
            Some(0) => (p0 + w, p1),
            Some(_) => (p0, p1 + w),
            None => (p0, p1),
        }
    })
}

pub(crate) fn decide(p0: f64, p1: f64) -> Decryption {
    let ambiguous = (p0 - p1).abs() <= TIE_TOL;
    let x_hat = if ambiguous || p0 > p1 { 0 } else { 1 };
    Decryption { x_hat, confidence: if x_hat == 0 { p0 } else { p1 }, ambiguous, p0, p1 }
}

pub(crate) fn standard_sign(j: i64) -> Option<u8> {
    Some(SignDistIndex::from_label(j).sign)
}

pub fn decrypt(cfg: &DiscretizationConfig, c: &Ciphertext, key: &QecmKey) -> Result<Decryption> {
    if c.d != cfg.d || c.ell != key.ell || c.matrix.shape() != (cfg.d, cfg.d) {
        return Err(Error::Dimension(format!(
            "ciphertext (d = {}, ell = {}) does not match d = {} and key ell = {}",
            c.d, c.ell, cfg.d, key.ell
        )));
    }
    let u = key_unitary(cfg, key)?;
    let rho = c.matrix.conjugate_by(&u.adjoint());
    let (p0, p1) = sign_weights(cfg, &rho, standard_sign);
    Ok(decide(p0, p1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AverageMode {
    Exact,
    MonteCarlo { n: usize, seed: u64 },
}

/// Ciphertext averaged over the key.
pub fn avg_ciphertext(cfg: &DiscretizationConfig, x: u8, ell: u32, mode: AverageMode) -> Result<ComplexMatrix> {
    let rho = plaintext_state(cfg, x)?;
    match mode {
        AverageMode::Exact => {
            let mut out = rho;
            for _ in 0..ell {
                for basis in [Basis::Q, Basis::P, Basis::Q] {
                    out = exact_single_twirl(cfg, basis, &out)?;
                }
            }
            Ok(out)
        }
        AverageMode::MonteCarlo { n, seed } => {
            if n == 0 {
                return Err(Error::Parameter("n must be at least 1".into()));
            }
            Ok(deterministic_mean(n, |i| {
                let params = draw_params(cfg.d, ell, &mut sample_rng(seed, i as u64));
                rho.conjugate_by(&unitary_from_params(cfg, &params))
            })
            .expect("n > 0"))
        }
    }
}

/// `3 log log d / (2 log d) · √(1 + 4 d^{5−ℓ})` with base-2 logarithms.
pub fn delta_bound(d: f64, ell: u32) -> Result<f64> {
    if !(d >= 4.0) {
        return Err(Error::Domain(format!("the bound needs d >= 4, got {d}")));
    }
    if ell == 0 {
        return Err(Error::Domain("the bound needs ell >= 1".into()));
    }
    let lg = d.log2();
    Ok(3.0 * lg.log2() / (2.0 * lg) * (1.0 + 4.0 * d.powi(5 - ell as i32)).sqrt())
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    pub d: f64,
    pub ell: u32,
    pub delta: f64,
    pub log_base: u32,
    /// `ℓ ≥ 5`, below which the bound exceeds 1 for all practical `d`.
    pub small_delta_regime: bool,
}

pub fn delta_report(d: f64, ell: u32) -> Result<DeltaReport> {
    Ok(DeltaReport { d, ell, delta: delta_bound(d, ell)?, log_base: 2, small_delta_regime: ell >= 5 })
}

#[derive(Clone, Debug, Serialize)]
pub struct AttackReport {
    pub d: usize,
    pub ell: u32,
    pub n_trials: usize,
    pub wins: usize,
    pub win_probability: f64,
    pub stderr: f64,
}

/// Both parties guess the sign bit of `U_k† |j⟩` for the shared outcome `j`.
fn guess_from_outcome(cfg: &DiscretizationConfig, u: &ComplexMatrix, j_pos: usize) -> u8 {
    let (p0, p1) = cfg.labels().into_iter().enumerate().fold((0.0, 0.0), |(p0, p1), (pos, l)| {
        let w = u.get(j_pos, pos).norm_sqr();
        if SignDistIndex::from_label(l).sign == 0 {
            (p0 + w, p1)
        } else {
            (p0, p1 + w)
        }
    });
    decide(p0, p1).x_hat
}

/// Measure-and-resend cloning attack: the ciphertext is measured in the Q
/// basis and the outcome given to both parties. `ell = 0` (no encryption)
/// is accepted here as a sanity baseline.
pub fn simulate_measure_resend(cfg: &DiscretizationConfig, ell: u32, n_trials: usize, seed: u64) -> Result<AttackReport> {
    require_even(cfg)?;
    if n_trials == 0 {
        return Err(Error::Parameter("n_trials must be at least 1".into()));
    }
    let outcomes: Vec<bool> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let x: u8 = rng.random_range(0..2);
            let params = draw_params(cfg.d, ell, &mut rng);
            let u = unitary_from_params(cfg, &params);
            let sigma = plaintext_state(cfg, x).expect("even d checked").conjugate_by(&u);
            let r = rng.random::<f64>();
            let mut acc = 0.0;
            let mut j = cfg.d - 1;
            for pos in 0..cfg.d {
                acc += sigma.get(pos, pos).re;
                if r < acc {
                    j = pos;
                    break;
                }
            }
            guess_from_outcome(cfg, &u, j) == x
        })
        .collect();
    let wins = outcomes.iter().filter(|&&w| w).count();
    let p = wins as f64 / n_trials as f64;
    Ok(AttackReport {
        d: cfg.d,
        ell,
        n_trials,
        wins,
        win_probability: p,
        stderr: (p * (1.0 - p) / n_trials as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::trace_distance;

    fn cfg(d: usize) -> DiscretizationConfig {
        DiscretizationConfig::new(d, IndexConvention::EvenCentered).unwrap()
    }

    #[test]
    fn sign_dist_round_trip() {
        for d in [2usize, 4, 8, 16] {
            let c = cfg(d);
            let mut seen = std::collections::HashSet::new();
            for j in c.labels() {
                let s = SignDistIndex::from_label(j);
                assert!(s.dist < d / 2);
                assert_eq!(s.to_label(), j);
                assert!(seen.insert((s.sign, s.dist)));
            }
            assert_eq!(seen.len(), d);
        }
    }

    #[test]
    fn key_sampling() {
        let c = cfg(8);
        let k = sample_key(&c, 1, 3).unwrap();
        assert_eq!(k.params.len(), 6);
        assert_eq!(k, sample_key(&c, 1, 3).unwrap());
        assert_ne!(k, sample_key(&c, 1, 4).unwrap());
        k.validate(&c).unwrap();
        let odd = DiscretizationConfig::new(5, IndexConvention::OddCentered).unwrap();
        assert!(matches!(sample_key(&odd, 1, 0), Err(Error::Parity(_))));
    }

    #[test]
    fn key_parameter_moments() {
        let d = 8.0;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 10_000;
        let mean = (0..n).map(|_| draw_params(8, 1, &mut rng)[0]).sum::<f64>() / n as f64;
        let sigma = d / (12.0 * n as f64).sqrt();
        assert!((mean - d / 2.0).abs() < 3.0 * sigma, "{mean}");
    }

    #[test]
    fn plaintext_examples() {
        let c = cfg(4);
        // labels −2, −1, 0, 1 in position order
        assert_eq!(plaintext_state(&c, 0).unwrap(), ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 0.5, 0.5]));
        assert_eq!(plaintext_state(&c, 1).unwrap(), ComplexMatrix::from_real_diagonal(&[0.5, 0.5, 0.0, 0.0]));
        let rho = plaintext_state(&cfg(8), 1).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!(((&rho * &rho).trace().re - 0.25).abs() < 1e-15);
        assert!(plaintext_state(&c, 2).is_err());
    }

    #[test]
    fn identity_key_is_trivial() {
        let c = cfg(8);
        let k = QecmKey::identity(2);
        assert!(key_unitary(&c, &k).unwrap().max_abs_diff(&ComplexMatrix::identity(8)) < 1e-15);
        let ct = encrypt(&c, 1, &k).unwrap();
        assert!(ct.matrix.max_abs_diff(&plaintext_state(&c, 1).unwrap()) < 1e-15);
    }

    #[test]
    fn ciphertext_spectrum_is_invariant() {
        let c = cfg(8);
        for seed in 0..5 {
            let k = sample_key(&c, 2, seed).unwrap();
            let ct = encrypt(&c, (seed % 2) as u8, &k).unwrap();
            ct.matrix.validate_density().unwrap();
            let eig = ct.matrix.hermitian_eigenvalues().unwrap();
            for (n, e) in eig.iter().enumerate() {
                let expected = if n < 4 { 0.0 } else { 0.25 };
                assert!((e - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_round_key_is_product_of_rounds() {
        let c = cfg(6);
        let k = sample_key(&c, 2, 11).unwrap();
        let r1 = QecmKey { ell: 1, params: k.params[..6].to_vec() };
        let r2 = QecmKey { ell: 1, params: k.params[6..].to_vec() };
        let product = &key_unitary(&c, &r2).unwrap() * &key_unitary(&c, &r1).unwrap();
        let u = key_unitary(&c, &k).unwrap();
        assert!(u.max_abs_diff(&product) < 1e-13);
        assert!((&(&u * &u.adjoint()) - &ComplexMatrix::identity(6)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn round_trip_correctness() {
        let c = cfg(8);
        for seed in 0..100u64 {
            let k = sample_key(&c, 2, seed).unwrap();
            let x = (seed % 2) as u8;
            let out = decrypt(&c, &encrypt(&c, x, &k).unwrap(), &k).unwrap();
            assert_eq!(out.x_hat, x);
            assert!(out.confidence >= 1.0 - 1e-9);
            assert!(!out.ambiguous);
        }
    }

    #[test]
    fn wrong_key_is_uninformative_on_average() {
        let c = cfg(8);
        let n = 200;
        let (mut conf, mut correct_mass) = (0.0, 0.0);
        for seed in 0..n as u64 {
            let x = (seed % 2) as u8;
            let k = sample_key(&c, 2, seed).unwrap();
            let wrong = sample_key(&c, 2, seed + 10_000).unwrap();
            let out = decrypt(&c, &encrypt(&c, x, &k).unwrap(), &wrong).unwrap();
            conf += out.confidence;
            correct_mass += if x == 0 { out.p0 } else { out.p1 };
        }
        assert!((conf / n as f64 - 0.5).abs() <= 0.1);
        assert!((correct_mass / n as f64 - 0.5).abs() <= 0.05);
    }

    #[test]
    fn maximally_mixed_ciphertext_is_ambiguous() {
        let c = cfg(8);
        let ct = Ciphertext { matrix: ComplexMatrix::identity(8).scale_real(0.125), d: 8, ell: 1 };
        let out = decrypt(&c, &ct, &sample_key(&c, 1, 0).unwrap()).unwrap();
        assert!(out.ambiguous);
        assert_eq!(out.x_hat, 0);
        assert!((out.confidence - 0.5).abs() < 1e-12);
    }

    #[test]
    fn decrypt_rejects_mismatch() {
        let c = cfg(4);
        let k = sample_key(&c, 2, 0).unwrap();
        let ct = encrypt(&c, 0, &k).unwrap();
        assert!(decrypt(&c, &ct, &sample_key(&c, 1, 0).unwrap()).is_err());
        assert!(decrypt(&cfg(6), &ct, &k).is_err());
        assert!(matches!(decrypt(&c, &ct, &QecmKey { ell: 2, params: vec![0.0; 5] }), Err(Error::Key(_))));
    }

    #[test]
    fn exact_average_is_maximally_mixed() {
        for d in [4usize, 8] {
            let c = cfg(d);
            let mixed = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
            for ell in 1..=2 {
                let a0 = avg_ciphertext(&c, 0, ell, AverageMode::Exact).unwrap();
                let a1 = avg_ciphertext(&c, 1, ell, AverageMode::Exact).unwrap();
                assert!(a0.max_abs_diff(&mixed) < 1e-12 && a1.max_abs_diff(&mixed) < 1e-12);
                assert!(trace_distance(&a0, &a1).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn sampled_average_converges() {
        let c = cfg(8);
        let n = 10_000;
        let mc = avg_ciphertext(&c, 0, 1, AverageMode::MonteCarlo { n, seed: 5 }).unwrap();
        let mixed = ComplexMatrix::identity(8).scale_real(0.125);
        assert!((&mc - &mixed).frobenius_norm() <= 5.0 / (n as f64).sqrt());
    }

    #[test]
    fn delta_values() {
        let d = 2f64.powi(20);
        // ℓ ≥ 5 leaves √(1 + 4d^{5−ℓ}) → 1; base-2 limit 3·log₂20/40
        let limit = 3.0 * 20f64.log2() / 40.0;
        assert!((limit - 0.324_144_607_116_552_2).abs() < 1e-12);
        assert!((delta_bound(d, 5).unwrap() - limit * 5f64.sqrt()).abs() < 1e-12);
        assert!((delta_bound(d, 5).unwrap() / 0.724_809_376_052_572_8 - 1.0).abs() < 1e-12);
        assert!((delta_bound(d, 8).unwrap() / 0.324_144_607_116_552_2 - 1.0).abs() < 1e-12);
        // beyond ℓ = 8 the correction 4d^{5−ℓ} is below f64 resolution at this d
        for ell in 1..8 {
            assert!(delta_bound(d, ell + 1).unwrap() < delta_bound(d, ell).unwrap());
        }
        assert!(matches!(delta_bound(3.0, 5), Err(Error::Domain(_))));
        assert!(!delta_report(16.0, 4).unwrap().small_delta_regime);
    }

    #[test]
    fn measure_resend_baselines() {
        let c = cfg(8);
        let none = simulate_measure_resend(&c, 0, 500, 1).unwrap();
        assert_eq!(none.win_probability, 1.0);
        let a = simulate_measure_resend(&c, 2, 2000, 7).unwrap();
        let b = simulate_measure_resend(&c, 2, 2000, 7).unwrap();
        assert_eq!(a.win_probability.to_bits(), b.win_probability.to_bits());
        assert!(a.win_probability > 0.25 && a.win_probability < 0.9, "{a:?}");
    }
}
