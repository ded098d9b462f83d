//! Staircase phase profiles of boxed phase unitaries, sampled on a grid.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::DiscretizationConfig;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct PolynomialFit {
    pub degree: usize,
    /// Coefficients of `x^k` in `x = q / q_max`, lowest order first.
    pub coeffs: Vec<f64>,
    pub fitted: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StaircaseProfile {
    pub points: Vec<(f64, f64)>,
    pub fit: Option<PolynomialFit>,
}

/// Phase `2π(α i + β i²)/d` on box `i`, sampled at `samples_per_box`
/// equally spaced midpoints of each box across `[−q_max, q_max)`.
pub fn staircase_profile(
    cfg: &DiscretizationConfig,
    alpha: f64,
    beta: f64,
    samples_per_box: usize,
    fit_degree: Option<usize>,
) -> Result<StaircaseProfile> {
    if samples_per_box == 0 {
        return Err(Error::Parameter("samples_per_box must be positive".into()));
    }
    let step = cfg.delta / samples_per_box as f64;
    let points: Vec<(f64, f64)> = (0..cfg.d * samples_per_box)
        .map(|k| {
            let q = -cfg.q_max + (k as f64 + 0.5) * step;
            let i = cfg.box_label_of(q) as f64;
            (q, 2.0 * PI * (alpha * i + beta * i * i) / cfg.d as f64)
        })
        .collect();
    let fit = match fit_degree {
        Some(k) => Some(least_squares_fit(cfg, &points, k)?),
        None => None,
    };
    Ok(StaircaseProfile { points, fit })
}

fn least_squares_fit(cfg: &DiscretizationConfig, points: &[(f64, f64)], degree: usize) -> Result<PolynomialFit> {
    if degree >= points.len() {
        return Err(Error::Parameter(format!("degree {degree} needs more than {} samples", points.len())));
    }
    let n = points.len();
    let vander = DMatrix::from_fn(n, degree + 1, |r, c| (points[r].0 / cfg.q_max).powi(c as i32));
    let y = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let svd = vander.clone().svd(true, true);
    let coeffs = svd.solve(&y, 1e-12).map_err(|e| Error::Parameter(format!("least-squares solve failed: {e}")))?;
    let fitted_v = &vander * &coeffs;
    let max_deviation = fitted_v.iter().zip(y.iter()).map(|(f, v)| (f - v).abs()).fold(0.0, f64::max);
    Ok(PolynomialFit { degree, coeffs: coeffs.iter().copied().collect(), fitted: fitted_v.iter().copied().collect(), max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvdisc::IndexConvention;

    #[test]
    fn zero_parameters_give_flat_profile() {
        let cfg = DiscretizationConfig::for_dimension(6).unwrap();
        let p = staircase_profile(&cfg, 0.0, 0.0, 5, None).unwrap();
        assert_eq!(p.points.len(), 30);
        assert!(p.points.iter().all(|&(_, ph)| ph == 0.0));
    }

    #[test]
    fn linear_profile_values_and_constancy() {
        let cfg = DiscretizationConfig::new(4, IndexConvention::EvenCentered).unwrap();
        let p = staircase_profile(&cfg, 1.0, 0.0, 7, None).unwrap();
        let expected = [-PI, -PI / 2.0, 0.0, PI / 2.0];
        for (k, &(q, ph)) in p.points.iter().enumerate() {
            let pos = k / 7;
            let (lo, hi) = cfg.box_interval(pos);
            assert!(lo <= q && q < hi);
            assert!((ph - expected[pos]).abs() < 1e-15);
        }
    }

    #[test]
    fn odd_convention_uses_centred_boxes() {
        let cfg = DiscretizationConfig::new(5, IndexConvention::OddCentered).unwrap();
        let p = staircase_profile(&cfg, 0.0, 1.0, 3, None).unwrap();
        // labels -2..2, phases 2π i²/5
        for (k, &(_, ph)) in p.points.iter().enumerate() {
            let i = cfg.label(k / 3) as f64;
            assert!((ph - 2.0 * PI * i * i / 5.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_fit_deviation_is_half_range() {
        let cfg = DiscretizationConfig::new(4, IndexConvention::EvenCentered).unwrap();
        let p = staircase_profile(&cfg, 1.0, 0.0, 10, Some(0)).unwrap();
        let fit = p.fit.unwrap();
        let (lo, hi) = p.points.iter().fold((f64::MAX, f64::MIN), |(a, b), &(_, v)| (a.min(v), b.max(v)));
        assert!((fit.max_deviation - 0.5 * (hi - lo)).abs() < 1e-12);
    }

    #[test]
    fn fit_tracks_quadratic_staircase() {
        let cfg = DiscretizationConfig::for_dimension(32).unwrap();
        let p = staircase_profile(&cfg, 0.0, 0.25, 8, Some(2)).unwrap();
        let fit = p.fit.unwrap();
        // the staircase deviates from a smooth parabola by at most about one step
        let range = p.points.iter().map(|pt| pt.1).fold(0.0, f64::max);
        assert!(fit.max_deviation < 0.1 * range, "{} vs {range}", fit.max_deviation);
    }

    #[test]
    fn zero_samples_rejected() {
        let cfg = DiscretizationConfig::for_dimension(4).unwrap();
        assert!(matches!(staircase_profile(&cfg, 1.0, 1.0, 0, None), Err(Error::Parameter(_))));
    }
}
