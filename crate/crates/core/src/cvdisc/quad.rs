//! Adaptive Simpson quadrature for complex-valued integrands.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Absolute tolerance used for per-box integrals.
pub const BOX_TOL: f64 = 1e-10;
/// Maximum disagreement between refinement levels before an integral is
/// rejected as unconverged.
pub const REFINEMENT_LIMIT: f64 = 1e-8;

const MAX_DEPTH: u32 = 48;
const MIN_WIDTH: f64 = 1e-13;

struct Panel {
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
}

fn simpson(a: f64, b: f64, fa: C64, fm: C64, fb: C64) -> C64 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

fn recurse<F: Fn(f64) -> C64>(f: &F, p: Panel, tol: f64, depth: u32) -> Result<C64> {
    let m = 0.5 * (p.a + p.b);
    let lm = 0.5 * (p.a + m);
    let rm = 0.5 * (m + p.b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(p.a, m, p.fa, flm, p.fm);
    let right = simpson(m, p.b, p.fm, frm, p.fb);
    let delta = left + right - p.whole;
    if delta.norm() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    // A bounded jump at a panel edge never meets the halving tolerance, but
    // its contribution vanishes with the panel width.
    if p.b - p.a <= MIN_WIDTH && delta.norm().is_finite() {
        return Ok(left + right);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Integration(format!(
            "adaptive Simpson exceeded depth {MAX_DEPTH} on [{}, {}]",
            p.a, p.b
        )));
    }
    let l = recurse(f, Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left }, 0.5 * tol, depth + 1)?;
    let r = recurse(f, Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right }, 0.5 * tol, depth + 1)?;
    Ok(l + r)
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    // Start from two panels so integrands vanishing at the three initial
    // nodes are not mistaken for zero.
    let m = 0.5 * (a + b);
    let (fl, fr) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = simpson(a, m, fa, fl, fm);
    let right = simpson(m, b, fm, fr, fb);
    let l = recurse(f, Panel { a, b: m, fa, fm: fl, fb: fm, whole: left }, 0.5 * tol, 1)?;
    let r = recurse(f, Panel { a: m, b, fa: fm, fm: fr, fb, whole: right }, 0.5 * tol, 1)?;
    Ok(l + r)
}

/// Integral with a refinement-doubling check: the interval is integrated
/// whole and as two halves. Returns the half-split value and the
/// disagreement between the two levels.
pub fn integrate_checked<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> Result<(C64, f64)> {
    let whole = adaptive_simpson(f, a, b, tol)?;
    let m = 0.5 * (a + b);
    let halves = adaptive_simpson(f, a, m, 0.5 * tol)? + adaptive_simpson(f, m, b, 0.5 * tol)?;
    let drift = (whole - halves).norm();
    if !(drift <= REFINEMENT_LIMIT) {
        return Err(Error::Integration(format!(
            "refinement levels disagree by {drift:e} on [{a}, {b}]"
        )));
    }
    Ok((halves, drift))
}

/// `∫_a^b f` over unit-width panels, for long intervals.
pub fn integrate_panels<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> Result<C64> {
    let panels = ((b - a).ceil() as usize).max(1);
    let h = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        acc += adaptive_simpson(f, lo, lo + h, tol / panels as f64)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_oscillations() {
        let cubic = |x: f64| C64::new(x * x * x - 2.0 * x, 0.0);
        let v = adaptive_simpson(&cubic, 0.0, 2.0, 1e-12).unwrap();
        assert!((v.re - 0.0).abs() < 1e-12);
        let wave = |x: f64| C64::new(0.0, x).exp();
        let v = adaptive_simpson(&wave, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        // ∫_0^π e^{ix} dx = 2i
        assert!((v - C64::new(0.0, 2.0)).norm() < 1e-11);
    }

    #[test]
    fn gaussian_mass() {
        let g = |x: f64| C64::new((-x * x).exp() / std::f64::consts::PI.sqrt(), 0.0);
        let v = integrate_panels(&g, -10.0, 10.0, 1e-12).unwrap();
        assert!((v.re - 1.0).abs() < 1e-11);
    }

    #[test]
    fn refinement_check_reports_small_drift() {
        let f = |x: f64| C64::new(x.sin(), x.cos());
        let (v, drift) = integrate_checked(&f, 0.0, 1.0, 1e-10).unwrap();
        assert!((v.re - (1.0 - 1f64.cos())).abs() < 1e-10);
        assert!(drift < 1e-9);
    }

    #[test]
    fn singular_integrand_fails() {
        let f = |x: f64| C64::new(1.0 / x, 0.0);
        assert!(matches!(adaptive_simpson(&f, 0.0, 1.0, 1e-12), Err(Error::Integration(_))));
    }
}
