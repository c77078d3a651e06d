use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use cvtele_core::background::ModelKind;
use cvtele_core::modes::Vacuum;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "cvtele", version, about = "Mode evolution, particle creation and teleportation fidelity on FRW backgrounds")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Relative integrator tolerance (used by `modes`)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads, 0 = one per core
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Include per-check wall times in the `verify` report
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    /// Aligned plain text (`table` only)
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// de Sitter fidelity (1 + e^{-πk/H})/2 for several H
    Fig1(Fig1Args),
    /// Matter-era fidelity 1 - e^{-2πk/H0}
    Fig2(Fig2Args),
    /// Era comparison table
    Table(TableArgs),
    /// Integrate one mode and write the solution
    Modes(ModesArgs),
    /// Cartesian-product fidelity sweep from a JSON config
    Sweep(SweepArgs),
    /// Run the acceptance checks and write a JSON report
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Args)]
pub struct KGridArgs {
    #[arg(long)]
    pub k_min: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub k_points: Option<usize>,
    #[arg(long, value_enum)]
    pub k_spacing: Option<Spacing>,
    /// Explicit comma-separated wavenumbers, replacing the grid
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["k_min", "k_max", "k_points", "k_spacing"])]
    pub k: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct Fig1Args {
    /// Hubble rates, default 0.5,1,2,5
    #[arg(long = "H", value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    #[command(flatten)]
    pub grid: KGridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Fig2Args {
    #[arg(long = "H0", default_value_t = 1.0)]
    pub h0: f64,
    #[command(flatten)]
    pub grid: KGridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long = "H", default_value_t = 1.0)]
    pub h: f64,
    #[arg(long = "H0", default_value_t = 1.0)]
    pub h0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Minkowski,
    PowerLaw,
    Radiation,
    Matter,
    DeSitter,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Minkowski => ModelKind::Minkowski,
            ModelArg::PowerLaw => ModelKind::PowerLaw,
            ModelArg::Radiation => ModelKind::RadiationDominated,
            ModelArg::Matter => ModelKind::MatterDominated,
            ModelArg::DeSitter => ModelKind::DeSitter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VacuumArg {
    PlaneWave,
    BunchDavies,
    Hankel,
}

impl From<VacuumArg> for Vacuum {
    fn from(v: VacuumArg) -> Self {
        match v {
            VacuumArg::PlaneWave => Vacuum::PlaneWaveIn,
            VacuumArg::BunchDavies => Vacuum::BunchDavies,
            VacuumArg::Hankel => Vacuum::HankelSecond,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModesArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "H")]
    pub h: Option<f64>,
    #[arg(long = "H0")]
    pub h0: Option<f64>,
    #[arg(long)]
    pub k: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub eta_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub eta_max: f64,
    /// Initial state, default chosen from the model
    #[arg(long, value_enum)]
    pub vacuum: Option<VacuumArg>,
    /// Impose the initial state at eta_max and integrate backwards
    #[arg(long)]
    pub backward: bool,
    /// Write covariance blocks instead of the mode function
    #[arg(long)]
    pub covariance: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration
    pub config: PathBuf,
}
