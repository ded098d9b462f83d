mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, UeCommand};
use commands::{Failure, Output};

const EXIT_ACCEPTANCE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn report_error(kind: &str, message: &str, code: u8) -> ExitCode {
    let body = json!({"error": {"kind": kind, "message": message, "exit_code": code}});
    eprintln!("{body}");
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("CV2DESIGN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("CV2DESIGN_THREADS must be a positive integer, got '{raw}'"))?;
    if n == 0 {
        return Err("CV2DESIGN_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn header(command: &str, config: Value, seed: u64) -> Value {
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "command": command,
        "config": config,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "timestamp": timestamp,
    })
}

/// Finite numbers serialise as numbers; NaN and infinities become `null`.
fn has_null(v: &Value) -> bool {
    match v {
        Value::Null => true,
        Value::Array(a) => a.iter().any(has_null),
        Value::Object(o) => o.values().any(has_null),
        _ => false,
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}").and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("usage", e.to_string().trim(), EXIT_USAGE),
    };
    if let Err(msg) = configure_threads() {
        return report_error("usage", &msg, EXIT_USAGE);
    }

    let (name, config, seed, result) = match &cli.command {
        Command::DesignVerify(a) => ("design-verify", json!(a), a.seed, commands::design_verify(a)),
        Command::Twirl(a) => ("twirl", json!(a), a.seed, commands::twirl(a)),
        Command::Discretize(a) => ("discretize", json!(a), a.seed, commands::discretize(a)),
        Command::Profile(a) => ("profile", json!(a), a.seed, commands::profile(a)),
        Command::UeDemo(a) | Command::Ue { command: UeCommand::Demo(a) } => ("ue-demo", json!(a), a.seed, commands::ue_demo(a)),
        Command::UeAttack(a) | Command::Ue { command: UeCommand::Attack(a) } => {
            ("ue-attack", json!(a), a.seed, commands::ue_attack(a))
        }
        Command::ReportAll(a) => ("report-all", json!(a), a.seed, commands::report_all()),
    };

    let output = match result {
        Ok(o) => o,
        Err(Failure::Library(e)) if e.is_numerical() => return report_error("numerical", &e.to_string(), EXIT_NUMERICAL),
        Err(Failure::Library(e)) => return report_error("invalid-config", &e.to_string(), EXIT_USAGE),
        Err(Failure::Io(msg)) => return report_error("io", &msg, EXIT_USAGE),
    };
    let head = header(name, config, seed);

    match output {
        Output::Json { body, passed } => {
            let mut doc = json!({"header": head});
            if let (Value::Object(doc), Value::Object(body)) = (&mut doc, body) {
                doc.extend(body);
            }
            if has_null(&doc) {
                return report_error("numerical", "result contains a non-finite number", EXIT_NUMERICAL);
            }
            let text = match serde_json::to_string_pretty(&doc) {
                Ok(s) => s,
                Err(e) => return report_error("numerical", &e.to_string(), EXIT_NUMERICAL),
            };
            emit(&text);
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ACCEPTANCE)
            }
        }
        Output::Csv { comments, columns, rows } => {
            if has_null(&head) || rows.iter().flatten().any(|v| !v.is_finite()) {
                return report_error("numerical", "result contains a non-finite number", EXIT_NUMERICAL);
            }
            let mut lines = vec![format!("# {head}")];
            lines.extend(comments.iter().map(|c| format!("# {c}")));
            lines.push(columns.join(","));
            for row in rows {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:.12}")).collect();
                lines.push(cells.join(","));
            }
            emit(&lines.join("\n"));
            ExitCode::SUCCESS
        }
    }
}
