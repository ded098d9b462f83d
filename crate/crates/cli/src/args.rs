use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "cv2design", version, about = "Approximate unitary 2-design on a discretised mode, and a one-bit unclonable encryption scheme")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Measure the 2->2 norm of R^ell on K and compare with d^-ell.
    DesignVerify(DesignVerifyArgs),
    /// Monte-Carlo two-fold twirl of a two-copy operator.
    Twirl(TwirlArgs),
    /// Discretise a test state onto d box kets.
    Discretize(DiscretizeArgs),
    /// Export a staircase phase profile as CSV.
    Profile(ProfileArgs),
    /// Encrypt/decrypt round trips.
    UeDemo(UeDemoArgs),
    /// Measure-and-resend cloning attack baseline.
    UeAttack(UeAttackArgs),
    /// Encryption commands (`ue demo`, `ue attack`).
    Ue {
        #[command(subcommand)]
        command: UeCommand,
    },
    /// Run every acceptance check and print a pass/fail table.
    ReportAll(ReportAllArgs),
}

#[derive(Subcommand, Debug)]
pub enum UeCommand {
    Demo(UeDemoArgs),
    Attack(UeAttackArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Brute,
    Structured,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Q,
    P,
    Sandwich,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateArg {
    Vacuum,
    Fock,
    Coherent,
}

#[derive(Args, Debug, Serialize)]
pub struct DesignVerifyArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    #[arg(long, value_enum, default_value = "structured")]
    pub method: MethodArg,
    /// Lift the dimension guards.
    #[arg(long)]
    pub allow_large: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct TwirlArgs {
    #[arg(long, value_enum, default_value = "sandwich")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Input operator in the matrix JSON format; its size fixes d.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Also write the averaged matrix, without header, to this file.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DiscretizeArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value = "vacuum")]
    pub state: StateArg,
    /// Photon number for `--state fock`.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    /// Write the density matrix, without header, to this file.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write {survival, bound, measured_distance} to this file.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ProfileArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 16)]
    pub samples_per_box: usize,
    /// Add a least-squares polynomial fit of this degree.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long)]
    pub fit_degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct UeDemoArgs {
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub ell: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of round trips.
    #[arg(long, default_value_t = 100)]
    pub total: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct UeAttackArgs {
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub ell: u32,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ReportAllArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
