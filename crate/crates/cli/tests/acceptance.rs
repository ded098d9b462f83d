//! Runs every acceptance criterion and prints one line each. Criterion 10 is
//! also checked end to end against the built binary.

use std::process::{Command, ExitCode};

use serde_json::Value;

use cv2design::verify::{self, CriterionOutcome};

const BIN: &str = env!("CARGO_BIN_EXE_cv2design");

fn run_binary(args: &[&str], threads: Option<&str>) -> Result<String, String> {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("CV2DESIGN_THREADS", n),
        None => cmd.env_remove("CV2DESIGN_THREADS"),
    };
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    let mut doc: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    doc["header"].as_object_mut().ok_or("missing header")?.remove("timestamp");
    Ok(doc.to_string())
}

/// Same seeded commands through the binary: two plain runs, then 1 and 4 threads.
fn binary_determinism() -> Result<usize, String> {
    let commands: [&[&str]; 3] = [
        &["ue-demo", "--d", "8", "--ell", "2", "--seed", "7"],
        &["ue-attack", "--d", "6", "--ell", "1", "--trials", "3000", "--seed", "3"],
        &["design-verify", "--d", "5", "--ell", "2", "--method", "brute"],
    ];
    for args in commands {
        let reference = run_binary(args, None)?;
        for threads in [None, Some("1"), Some("4")] {
            if run_binary(args, threads)? != reference {
                return Err(format!("{args:?} differs with threads {threads:?}"));
            }
        }
    }
    Ok(commands.len())
}

fn main() -> ExitCode {
    let mut outcomes: Vec<CriterionOutcome> = Vec::new();
    for criterion in verify::all_criteria() {
        let mut o = criterion();
        if o.id == 10 {
            match binary_determinism() {
                Ok(n) => o.summary.push_str(&format!("; binary: {n} commands identical across reruns and 1/4 threads")),
                Err(e) => {
                    o.passed = false;
                    o.summary.push_str(&format!("; binary: {e}"));
                }
            }
        }
        println!("{}", o.line());
        outcomes.push(o);
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("\nacceptance: {passed}/{} criteria passed", outcomes.len());
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
