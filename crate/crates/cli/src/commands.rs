use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use cv2design::cvdisc::{self, DiscretizationConfig, Wavefunction};
use cv2design::design::{self, NormMethod, TwirlFamily};
use cv2design::opalg::ComplexMatrix;
use cv2design::{ue, verify, Error, C64};

use crate::args::*;

pub enum Failure {
    Library(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

pub enum Output {
    Json { body: Value, passed: bool },
    Csv { comments: Vec<String>, columns: Vec<String>, rows: Vec<Vec<f64>> },
}

type CmdResult = Result<Output, Failure>;

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Library(e.into()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn design_verify(a: &DesignVerifyArgs) -> CmdResult {
    let cfg = DiscretizationConfig::for_dimension(a.d)?;
    let method = match a.method {
        MethodArg::Brute => NormMethod::BruteForce,
        MethodArg::Structured => NormMethod::RankStructured,
    };
    let report = design::norm_on_k_guarded(&cfg, a.ell, method, a.allow_large)?;
    let passed = report.within_bound();
    Ok(Output::Json { body: json!({"report": to_value(&report)?, "within_bound": passed}), passed })
}

pub fn twirl(a: &TwirlArgs) -> CmdResult {
    let text = fs::read_to_string(&a.input).map_err(|e| Failure::Io(format!("cannot read {}: {e}", a.input.display())))?;
    let x = ComplexMatrix::from_json(&text)?;
    let n = x.rows();
    let d = (1..=n).find(|d| d * d >= n).unwrap_or(0);
    if !x.is_square() || d * d != n {
        return Err(Error::Dimension(format!("a two-copy operator must be d^2 x d^2, got {}x{}", x.rows(), x.cols())).into());
    }
    let cfg = DiscretizationConfig::for_dimension(d)?;
    let family = match a.family {
        FamilyArg::Q => TwirlFamily::QOnly,
        FamilyArg::P => TwirlFamily::POnly,
        FamilyArg::Sandwich => TwirlFamily::Sandwich,
    };
    let avg = design::mc_double_twirl(&cfg, family, &x, a.samples, a.seed)?;
    if let Some(out) = &a.out {
        write_file(out, &avg.to_json()?)?;
    }
    Ok(Output::Json { body: json!({"d": d, "matrix": to_value(&avg)?}), passed: true })
}

pub fn discretize(a: &DiscretizeArgs) -> CmdResult {
    let cfg = DiscretizationConfig::for_dimension(a.d)?;
    let psi = match a.state {
        StateArg::Vacuum => Wavefunction::vacuum(),
        StateArg::Fock => Wavefunction::fock(a.n),
        StateArg::Coherent => Wavefunction::coherent(C64::new(a.alpha_re, a.alpha_im)),
    };
    psi.check_normalized(&cfg)?;
    let disc = cvdisc::discretize_pure(&cfg, &psi)?;
    let report = cvdisc::lemma31_check(&cfg, &psi)?;
    let rho = disc.density();
    rho.validate_density()?;
    let sidecar = json!({"survival": report.survival, "bound": report.bound, "measured_distance": report.measured_distance});
    if let Some(out) = &a.out {
        write_file(out, &rho.to_json()?)?;
    }
    if let Some(path) = &a.sidecar {
        write_file(path, &sidecar.to_string())?;
    }
    Ok(Output::Json {
        body: json!({"matrix": to_value(&rho)?, "sidecar": sidecar, "report": to_value(&report)?}),
        passed: true,
    })
}

pub fn profile(a: &ProfileArgs) -> CmdResult {
    let cfg = DiscretizationConfig::for_dimension(a.d)?;
    let p = cvdisc::staircase_profile(&cfg, a.alpha, a.beta, a.samples_per_box, a.fit_degree)?;
    let mut comments = vec![format!("phase = 2*pi*(alpha*i + beta*i^2)/d on box i, q in [-{:.12}, {:.12})", cfg.q_max, cfg.q_max)];
    let mut columns = vec!["q".to_string(), "phase".to_string()];
    let rows = match &p.fit {
        Some(fit) => {
            comments.push(format!(
                "fit degree {} in x = q/q_max, coefficients {:?}, max deviation {:.12}",
                fit.degree, fit.coeffs, fit.max_deviation
            ));
            columns.push("fit".into());
            p.points.iter().zip(&fit.fitted).map(|(&(q, ph), &f)| vec![q, ph, f]).collect()
        }
        None => p.points.iter().map(|&(q, ph)| vec![q, ph]).collect(),
    };
    Ok(Output::Csv { comments, columns, rows })
}

fn delta_fields(d: usize, ell: u32) -> Value {
    match ue::delta_report(d as f64, ell) {
        Ok(r) => json!({"delta_bound": r.delta, "log_base": r.log_base, "small_delta_regime": r.small_delta_regime}),
        Err(_) => json!({}),
    }
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

pub fn ue_demo(a: &UeDemoArgs) -> CmdResult {
    let cfg = DiscretizationConfig::for_dimension(a.d)?;
    let mut correct = 0usize;
    let mut min_conf = 1.0f64;
    for i in 0..a.total {
        let key = ue::sample_key_indexed(&cfg, a.ell, a.seed, i as u64)?;
        let x = (i % 2) as u8;
        let out = ue::decrypt(&cfg, &ue::encrypt(&cfg, x, &key)?, &key)?;
        min_conf = min_conf.min(out.confidence);
        correct += usize::from(out.x_hat == x);
    }
    let body = merge(json!({"correct": correct, "total": a.total, "min_confidence": min_conf}), delta_fields(a.d, a.ell));
    Ok(Output::Json { body, passed: correct == a.total })
}

pub fn ue_attack(a: &UeAttackArgs) -> CmdResult {
    let cfg = DiscretizationConfig::for_dimension(a.d)?;
    let report = ue::simulate_measure_resend(&cfg, a.ell, a.trials, a.seed)?;
    let body = merge(json!({"attack": to_value(&report)?}), if a.ell > 0 { delta_fields(a.d, a.ell) } else { json!({}) });
    Ok(Output::Json { body, passed: true })
}

pub fn report_all() -> CmdResult {
    let outcomes = verify::run_all();
    for o in &outcomes {
        eprintln!("{}  ({:.1}s)", o.line(), o.elapsed_s);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let total = outcomes.len();
    Ok(Output::Json {
        body: json!({"criteria": to_value(&outcomes)?, "passed": passed, "total": total}),
        passed: passed == total,
    })
}
