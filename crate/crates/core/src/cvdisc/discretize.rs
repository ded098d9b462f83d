//! Projection of continuum states onto box kets, and the discretisation
//! error bound.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::quad::{adaptive_simpson, integrate_checked, BOX_TOL};
use super::{DiscretizationConfig, Wavefunction};
use crate::error::{Error, Result};
use crate::opalg::ComplexMatrix;

/// Result of projecting a pure state onto the box kets.
#[derive(Clone, Debug)]
pub struct DiscretizedPure {
    /// `Δ^{-1/2} ∫_box ψ`, in position order.
    pub amplitudes: Vec<C64>,
    /// `Σ |amplitude|²`
    pub survival: f64,
    /// The amplitudes renormalised to a unit vector.
    pub state: Vec<C64>,
    /// Largest disagreement between quadrature refinement levels.
    pub quadrature_drift: f64,
}

impl DiscretizedPure {
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.state, &self.state)
    }
}

fn box_integrals(psi: &Wavefunction, intervals: Vec<(f64, f64)>) -> Result<Vec<(C64, f64)>> {
    let f = |q: f64| psi.eval(q);
    intervals.into_par_iter().map(|(lo, hi)| integrate_checked(&f, lo, hi, BOX_TOL)).collect()
}

pub fn discretize_pure(cfg: &DiscretizationConfig, psi: &Wavefunction) -> Result<DiscretizedPure> {
    let intervals = (0..cfg.d).map(|p| cfg.box_interval(p)).collect();
    let scale = cfg.delta.powf(-0.5);
    let raw = box_integrals(psi, intervals)?;
    let amplitudes: Vec<C64> = raw.iter().map(|(v, _)| v * scale).collect();
    let quadrature_drift = raw.iter().map(|(_, e)| *e).fold(0.0, f64::max);
    let survival: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if survival < 1e-12 {
        return Err(Error::OutsideWindow(survival));
    }
    let inv = survival.sqrt().recip();
    let state = amplitudes.iter().map(|a| a * inv).collect();
    Ok(DiscretizedPure { amplitudes, survival, state, quadrature_drift })
}

fn check_kernel_hermitian<K>(cfg: &DiscretizationConfig, kernel: &K) -> Result<()>
where
    K: Fn(f64, f64) -> C64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let span = 2.0 * cfg.q_max;
    for _ in 0..32 {
        let q = rng.random::<f64>() * span - cfg.q_max;
        let qp = rng.random::<f64>() * span - cfg.q_max;
        let a = kernel(q, qp);
        let b = kernel(qp, q).conj();
        if (a - b).norm() > 1e-10 * (1.0 + a.norm()) {
            return Err(Error::Parameter(format!("kernel is not Hermitian at ({q}, {qp})")));
        }
    }
    Ok(())
}

/// `(1/Δ) ∫_box_i ∫_box_i' ρ(q, q')`, renormalised to unit trace.
pub fn discretize_density<K>(cfg: &DiscretizationConfig, kernel: K) -> Result<ComplexMatrix>
where
    K: Fn(f64, f64) -> C64 + Sync,
{
    check_kernel_hermitian(cfg, &kernel)?;
    let d = cfg.d;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let inner_tol = 0.1 * BOX_TOL / cfg.delta;
    let values: Vec<C64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (lo, hi) = cfg.box_interval(i);
            let (lo2, hi2) = cfg.box_interval(j);
            let row = |q: f64| -> C64 {
                adaptive_simpson(&|qp: f64| kernel(q, qp), lo2, hi2, inner_tol).unwrap_or(C64::new(f64::NAN, 0.0))
            };
            let v = adaptive_simpson(&row, lo, hi, BOX_TOL)?;
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Integration(format!("inner integral failed on boxes ({i}, {j})")));
            }
            Ok(v / cfg.delta)
        })
        .collect::<Result<_>>()?;
    let mut m = ComplexMatrix::zeros(d, d);
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        if i == j {
            m.set(i, i, C64::new(v.re, 0.0));
        } else {
            m.set(i, j, v);
            m.set(j, i, v.conj());
        }
    }
    let tr = m.trace().re;
    if tr < 1e-6 {
        return Err(Error::OutsideWindow(tr));
    }
    let m = m.scale_real(1.0 / tr);
    m.validate_density()?;
    Ok(m)
}

/// `√((2/π)⟨p̂²⟩/d)`
pub fn lemma31_bound(cfg: &DiscretizationConfig, mean_psq: f64) -> Result<f64> {
    if !(mean_psq >= 0.0) {
        return Err(Error::Domain(format!("⟨p̂²⟩ must be nonnegative, got {mean_psq}")));
    }
    Ok((2.0 / PI * mean_psq / cfg.d as f64).sqrt())
}

/// `√((4/π)(n̄ + 1/2)/d)`, using `⟨p̂²⟩ ≤ 2n̄ + 1`.
pub fn lemma31_bound_photon(cfg: &DiscretizationConfig, mean_photon: f64) -> Result<f64> {
    if !(mean_photon >= 0.0) {
        return Err(Error::Domain(format!("mean photon number must be nonnegative, got {mean_photon}")));
    }
    Ok((4.0 / PI * (mean_photon + 0.5) / cfg.d as f64).sqrt())
}

/// Measured discretisation error for one state against the bound.
#[derive(Clone, Debug, Serialize)]
pub struct Lemma31Report {
    pub label: String,
    pub d: usize,
    pub mean_psq: f64,
    pub survival: f64,
    /// `∫_window |ψ|²`
    pub window_mass: f64,
    /// Trace distance between the discretised state and the window-restricted state.
    pub measured_distance: f64,
    /// Trace distance between the discretised state and the full state.
    pub distance_to_full: f64,
    pub bound: f64,
    /// `1 − survival`
    pub leakage: f64,
    /// `(Δ²/π²)⟨p̂²⟩`
    pub leakage_bound: f64,
    pub quadrature_drift: f64,
}

impl Lemma31Report {
    pub fn holds(&self) -> bool {
        self.measured_distance <= self.bound && self.leakage <= self.leakage_bound
    }
}

/// Box kets are unit vectors in `L²(ℝ)`, so both distances are between pure
/// states and follow from overlaps: the discretised state overlaps the full
/// state in `√S` and the window-restricted state in `√(S/W)`.
pub fn lemma31_check(cfg: &DiscretizationConfig, psi: &Wavefunction) -> Result<Lemma31Report> {
    let disc = discretize_pure(cfg, psi)?;
    let mass_f = |q: f64| C64::new(psi.eval(q).norm_sqr(), 0.0);
    let masses: Vec<(C64, f64)> = (0..cfg.d)
        .into_par_iter()
        .map(|p| {
            let (lo, hi) = cfg.box_interval(p);
            integrate_checked(&mass_f, lo, hi, BOX_TOL)
        })
        .collect::<Result<_>>()?;
    let window_mass: f64 = masses.iter().map(|(v, _)| v.re).sum();
    let drift = masses.iter().map(|(_, e)| *e).fold(disc.quadrature_drift, f64::max);
    let mean_psq = psi.mean_psq_or_numeric(cfg)?;
    let s = disc.survival;
    Ok(Lemma31Report {
        label: psi.label.clone(),
        d: cfg.d,
        mean_psq,
        survival: s,
        window_mass,
        measured_distance: (1.0 - s / window_mass).max(0.0).sqrt(),
        distance_to_full: (1.0 - s).max(0.0).sqrt(),
        bound: lemma31_bound(cfg, mean_psq)?,
        leakage: 1.0 - s,
        leakage_bound: cfg.delta * cfg.delta / (PI * PI) * mean_psq,
        quadrature_drift: drift,
    })
}

/// Trace distance between the discretised state and the window-restricted
/// state represented on a grid `refinement` times finer.
pub fn fine_grid_distance(cfg: &DiscretizationConfig, psi: &Wavefunction, refinement: usize) -> Result<f64> {
    if refinement == 0 {
        return Err(Error::Parameter("refinement must be positive".into()));
    }
    let coarse = discretize_pure(cfg, psi)?;
    let h = cfg.delta / refinement as f64;
    let intervals = (0..cfg.d)
        .flat_map(|p| {
            let lo = cfg.box_interval(p).0;
            (0..refinement).map(move |k| (lo + k as f64 * h, lo + (k + 1) as f64 * h))
        })
        .collect();
    let fine = box_integrals(psi, intervals)?;
    let fine_amp: Vec<C64> = fine.iter().map(|(v, _)| v / h.sqrt()).collect();
    let fine_norm: f64 = fine_amp.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    // A coarse box ket is the uniform superposition of its fine boxes.
    let w = (refinement as f64).sqrt().recip();
    let overlap: C64 = fine_amp
        .chunks(refinement)
        .zip(&coarse.state)
        .map(|(chunk, a)| a.conj() * chunk.iter().sum::<C64>() * w)
        .sum();
    let f = (overlap.norm() / fine_norm).min(1.0);
    Ok((1.0 - f * f).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvdisc::IndexConvention;
    use crate::opalg::trace_distance;

    #[test]
    fn box_ket_is_reproduced_exactly() {
        let cfg = DiscretizationConfig::for_dimension(8).unwrap();
        let p0 = cfg.position(0).unwrap();
        let (lo, hi) = cfg.box_interval(p0);
        let c = cfg.delta.powf(-0.5);
        let psi = Wavefunction::new("box", Some(0.0), move |q| {
            if (lo..hi).contains(&q) {
                C64::new(c, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let disc = discretize_pure(&cfg, &psi).unwrap();
        assert!((disc.survival - 1.0).abs() < 1e-9);
        for (p, a) in disc.state.iter().enumerate() {
            let expected = if p == p0 { 1.0 } else { 0.0 };
            assert!((a - C64::new(expected, 0.0)).norm() < 1e-9, "position {p}: {a}");
        }
    }

    #[test]
    fn vacuum_leakage_within_bound() {
        let cfg = DiscretizationConfig::for_dimension(64).unwrap();
        let disc = discretize_pure(&cfg, &Wavefunction::vacuum()).unwrap();
        assert!(disc.survival <= 1.0 + 1e-9);
        let bound = cfg.delta * cfg.delta / (PI * PI) * 0.5;
        assert!((bound - 1.0 / (64.0 * PI)).abs() < 1e-15);
        assert!(1.0 - disc.survival <= bound);
    }

    #[test]
    fn symmetric_state_has_symmetric_amplitudes() {
        let cfg = DiscretizationConfig::new(9, IndexConvention::OddCentered).unwrap();
        let disc = discretize_pure(&cfg, &Wavefunction::fock(2)).unwrap();
        for l in 1..=4i64 {
            let a = disc.amplitudes[cfg.position(l).unwrap()];
            let b = disc.amplitudes[cfg.position(-l).unwrap()];
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bound_examples() {
        let cfg64 = DiscretizationConfig::for_dimension(64).unwrap();
        assert_eq!(lemma31_bound(&cfg64, 0.0).unwrap(), 0.0);
        assert!((lemma31_bound(&cfg64, 0.5).unwrap() - 0.070_523_697_943_469_53).abs() < 1e-12);
        let cfg100 = DiscretizationConfig::for_dimension(100).unwrap();
        assert!((lemma31_bound_photon(&cfg100, 0.5).unwrap() - 0.112_837_916_709_551_26).abs() < 1e-12);
        assert!(matches!(lemma31_bound(&cfg64, -1.0), Err(Error::Domain(_))));
        assert!(matches!(lemma31_bound_photon(&cfg64, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_one_kernel_matches_pure_path() {
        let cfg = DiscretizationConfig::for_dimension(16).unwrap();
        let psi = Wavefunction::coherent(C64::new(0.5, 0.5));
        let pure = discretize_pure(&cfg, &psi).unwrap().density();
        let k = psi.clone();
        let rho = discretize_density(&cfg, move |q, qp| k.eval(q) * k.eval(qp).conj()).unwrap();
        assert!(rho.max_abs_diff(&pure) < 1e-8);
    }

    #[test]
    fn mixture_kernel_is_linear() {
        let cfg = DiscretizationConfig::for_dimension(32).unwrap();
        let (f0, f1) = (Wavefunction::fock(0), Wavefunction::fock(1));
        let d0 = discretize_pure(&cfg, &f0).unwrap();
        let d1 = discretize_pure(&cfg, &f1).unwrap();
        let w0 = 0.5 * d0.survival;
        let w1 = 0.5 * d1.survival;
        let direct = (&d0.density().scale_real(w0) + &d1.density().scale_real(w1)).scale_real(1.0 / (w0 + w1));
        let rho = discretize_density(&cfg, move |q, qp| {
            (f0.eval(q) * f0.eval(qp).conj() + f1.eval(q) * f1.eval(qp).conj()) * 0.5
        })
        .unwrap();
        assert!(trace_distance(&rho, &direct).unwrap() <= 1e-8);
    }

    #[test]
    fn density_of_fock_one() {
        let cfg = DiscretizationConfig::for_dimension(64).unwrap();
        let f1 = Wavefunction::fock(1);
        let rho = discretize_density(&cfg, move |q, qp| f1.eval(q) * f1.eval(qp).conj()).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        for i in 0..64 {
            for j in 0..64 {
                let cs = (rho.get(i, i).re * rho.get(j, j).re).sqrt();
                assert!(rho.get(i, j).norm() <= cs + 1e-10);
            }
        }
    }

    #[test]
    fn density_rejects_state_outside_window() {
        let cfg = DiscretizationConfig::for_dimension(4).unwrap();
        let far = Wavefunction::new("far", None, |q| C64::new(0.751_125_544_464_942_5 * (-0.5 * (q - 40.0).powi(2)).exp(), 0.0));
        let r = discretize_density(&cfg, move |q, qp| far.eval(q) * far.eval(qp).conj());
        assert!(matches!(r, Err(Error::OutsideWindow(_))));
    }

    #[test]
    fn lemma_holds_for_test_states() {
        for d in [32usize, 64, 128] {
            let cfg = DiscretizationConfig::for_dimension(d).unwrap();
            for psi in [
                Wavefunction::vacuum(),
                Wavefunction::fock(1),
                Wavefunction::fock(2),
                Wavefunction::coherent(C64::new(1.0, 0.0)),
                Wavefunction::coherent(C64::new(0.0, 1.0)),
            ] {
                let r = lemma31_check(&cfg, &psi).unwrap();
                assert!(r.holds(), "{r:?}");
                assert!(r.distance_to_full <= r.bound, "{r:?}");
                assert!(r.quadrature_drift <= 1e-6);
            }
        }
    }

    #[test]
    fn fine_grid_surrogate_converges_to_window_distance() {
        let cfg = DiscretizationConfig::for_dimension(32).unwrap();
        let psi = Wavefunction::fock(1);
        let exact = lemma31_check(&cfg, &psi).unwrap().measured_distance;
        let errs: Vec<f64> =
            [2usize, 4, 8, 16].iter().map(|&r| (fine_grid_distance(&cfg, &psi, r).unwrap() - exact).abs()).collect();
        for w in errs.windows(2) {
            assert!(w[1] < w[0], "{errs:?}");
        }
        assert!(errs[3] < 0.1 * exact, "{errs:?} vs {exact}");
    }
}
