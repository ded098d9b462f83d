//! Discretisation of a single bosonic mode onto `d` position boxes.
//!
//! The box ket `|i⟩` is the normalised uniform superposition of position
//! eigenstates over box `i`, of width `Δ = √(2π/d)`. The boxes tile the window
//! `[−q_max, q_max)` with `q_max = √(πd/2)`. Momentum-like box states are
//! the discrete Fourier transform of the position boxes.

mod discretize;
mod profile;
pub mod quad;
mod states;

pub use discretize::{
    discretize_density, discretize_pure, fine_grid_distance, lemma31_bound, lemma31_bound_photon,
    lemma31_check, DiscretizedPure, Lemma31Report,
};
pub use profile::{staircase_profile, PolynomialFit, StaircaseProfile};
pub use states::Wavefunction;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::ComplexMatrix;

/// How box labels are centred on the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexConvention {
    /// `d` even, labels `−d/2 … d/2 − 1`, box `i` is `[iΔ, (i+1)Δ)`.
    EvenCentered,
    /// `d` odd, labels `−(d−1)/2 … (d−1)/2`, box `i` is `[iΔ − Δ/2, iΔ + Δ/2)`.
    OddCentered,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationConfig {
    pub d: usize,
    pub convention: IndexConvention,
    pub delta: f64,
    pub q_max: f64,
    pub omega: C64,
}

impl DiscretizationConfig {
    pub fn new(d: usize, convention: IndexConvention) -> Result<Self> {
        if d < 2 {
            return Err(Error::DegenerateDimension(d));
        }
        match convention {
            IndexConvention::EvenCentered if d % 2 != 0 => {
                return Err(Error::Parity(format!("even-centred labels need an even d, got {d}")))
            }
            IndexConvention::OddCentered if d % 2 == 0 => {
                return Err(Error::Parity(format!("odd-centred labels need an odd d, got {d}")))
            }
            _ => {}
        }
        let df = d as f64;
        Ok(Self {
            d,
            convention,
            delta: (2.0 * PI / df).sqrt(),
            q_max: (PI * df / 2.0).sqrt(),
            omega: C64::from_polar(1.0, 2.0 * PI / df),
        })
    }

    /// Convention chosen from the parity of `d`.
    pub fn for_dimension(d: usize) -> Result<Self> {
        let convention = if d % 2 == 0 { IndexConvention::EvenCentered } else { IndexConvention::OddCentered };
        Self::new(d, convention)
    }

    /// Label of the smallest position.
    pub fn offset(&self) -> i64 {
        match self.convention {
            IndexConvention::EvenCentered => -(self.d as i64) / 2,
            IndexConvention::OddCentered => -((self.d as i64 - 1) / 2),
        }
    }

    pub fn label(&self, pos: usize) -> i64 {
        pos as i64 + self.offset()
    }

    pub fn labels(&self) -> Vec<i64> {
        (0..self.d).map(|p| self.label(p)).collect()
    }

    pub fn position(&self, label: i64) -> Option<usize> {
        let p = label - self.offset();
        (0..self.d as i64).contains(&p).then_some(p as usize)
    }

    /// Position of the label congruent to `k` modulo `d`.
    pub fn position_mod(&self, k: i64) -> usize {
        (k - self.offset()).rem_euclid(self.d as i64) as usize
    }

    /// `[lo, hi)` in position units for the box at `pos`.
    pub fn box_interval(&self, pos: usize) -> (f64, f64) {
        let i = self.label(pos) as f64;
        match self.convention {
            IndexConvention::EvenCentered => (i * self.delta, (i + 1.0) * self.delta),
            IndexConvention::OddCentered => ((i - 0.5) * self.delta, (i + 0.5) * self.delta),
        }
    }

    /// Label of the box containing `q` (possibly outside the index set).
    pub fn box_label_of(&self, q: f64) -> i64 {
        match self.convention {
            IndexConvention::EvenCentered => (q / self.delta).floor() as i64,
            IndexConvention::OddCentered => (q / self.delta + 0.5).floor() as i64,
        }
    }

    /// `ω^{x} = exp(2πi x / d)` for real `x`, reduced modulo `d` first.
    pub fn omega_pow(&self, x: f64) -> C64 {
        let r = x.rem_euclid(self.d as f64);
        C64::from_polar(1.0, 2.0 * PI * r / self.d as f64)
    }

    /// `ω^{k}` for integer `k`.
    pub fn omega_pow_int(&self, k: i64) -> C64 {
        self.omega_pow(k.rem_euclid(self.d as i64) as f64)
    }
}

/// The discrete quadratures `Q̂`, `P̂` and the Fourier matrix relating them.
#[derive(Clone, Debug)]
pub struct QuadratureOperators {
    /// `Σ_i i |i⟩⟨i|`
    pub q_op: ComplexMatrix,
    /// `F Q F†`
    pub p_op: ComplexMatrix,
    /// `⟨j|k̃⟩ = ω^{kj}/√d`; column `k` is the momentum box state `|k̃⟩`.
    pub f_dft: ComplexMatrix,
}

impl QuadratureOperators {
    pub fn new(cfg: &DiscretizationConfig) -> Self {
        let labels: Vec<f64> = cfg.labels().iter().map(|&l| l as f64).collect();
        let q_op = ComplexMatrix::from_real_diagonal(&labels);
        let f_dft = dft_matrix(cfg);
        let p_op = q_op.conjugate_by(&f_dft);
        Self { q_op, p_op, f_dft }
    }
}

/// The unitary discrete Fourier matrix over the configured labels.
pub fn dft_matrix(cfg: &DiscretizationConfig) -> ComplexMatrix {
    let norm = 1.0 / (cfg.d as f64).sqrt();
    ComplexMatrix::from_fn(cfg.d, cfg.d, |j, k| cfg.omega_pow_int(cfg.label(k) * cfg.label(j)) * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::hs_inner;

    #[test]
    fn config_invariants() {
        for d in [2usize, 4, 8, 32, 64] {
            let cfg = DiscretizationConfig::new(d, IndexConvention::EvenCentered).unwrap();
            assert!((cfg.delta * cfg.delta * d as f64 - 2.0 * PI).abs() < 1e-12);
            assert!((cfg.q_max - d as f64 * cfg.delta / 2.0).abs() < 1e-12);
            assert_eq!(cfg.labels().first(), Some(&-(d as i64 / 2)));
            assert_eq!(cfg.labels().last(), Some(&(d as i64 / 2 - 1)));
            assert!((cfg.box_interval(0).0 + cfg.q_max).abs() < 1e-12);
            assert!((cfg.box_interval(d - 1).1 - cfg.q_max).abs() < 1e-12);
        }
        let cfg = DiscretizationConfig::new(5, IndexConvention::OddCentered).unwrap();
        assert_eq!(cfg.labels(), vec![-2, -1, 0, 1, 2]);
        assert!((cfg.box_interval(0).0 + cfg.q_max).abs() < 1e-12);
        assert!((cfg.box_interval(4).1 - cfg.q_max).abs() < 1e-12);
    }

    #[test]
    fn config_rejects_bad_parity() {
        assert!(matches!(DiscretizationConfig::new(5, IndexConvention::EvenCentered), Err(Error::Parity(_))));
        assert!(matches!(DiscretizationConfig::new(4, IndexConvention::OddCentered), Err(Error::Parity(_))));
        assert!(matches!(DiscretizationConfig::new(1, IndexConvention::OddCentered), Err(Error::DegenerateDimension(1))));
    }

    #[test]
    fn positions_and_labels() {
        let cfg = DiscretizationConfig::new(6, IndexConvention::EvenCentered).unwrap();
        assert_eq!(cfg.position(-3), Some(0));
        assert_eq!(cfg.position(3), None);
        assert_eq!(cfg.position_mod(5), cfg.position(-1).unwrap());
        assert_eq!(cfg.box_label_of(-1e-9), -1);
        assert_eq!(cfg.box_label_of(0.0), 0);
    }

    #[test]
    fn fourier_matrix_is_unitary_and_orthonormal() {
        for d in [3usize, 4, 7, 16] {
            let cfg = DiscretizationConfig::for_dimension(d).unwrap();
            let ops = QuadratureOperators::new(&cfg);
            let f = &ops.f_dft;
            let defect = (&(f * &f.adjoint()) - &ComplexMatrix::identity(d)).frobenius_norm();
            assert!(defect < 1e-10, "d = {d}: {defect}");
            for k in 0..d {
                for kp in 0..d {
                    let col = |c| ComplexMatrix::from_fn(d, 1, |r, _| f.get(r, c));
                    let ip = hs_inner(&col(kp), &col(k)).unwrap();
                    let expected = if k == kp { 1.0 } else { 0.0 };
                    assert!((ip - C64::new(expected, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn momentum_spectrum_is_index_set() {
        for d in [4usize, 5, 8] {
            let cfg = DiscretizationConfig::for_dimension(d).unwrap();
            let ops = QuadratureOperators::new(&cfg);
            assert!(ops.p_op.hermiticity_defect() < 1e-12);
            let eig = ops.p_op.hermitian_eigenvalues().unwrap();
            for (e, l) in eig.iter().zip(cfg.labels()) {
                assert!((e - l as f64).abs() < 1e-9, "d = {d}: {e} vs {l}");
            }
        }
    }
}
