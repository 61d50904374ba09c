use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_TOL_THETA: f64 = 1e-4;
pub const DEFAULT_SEED_OFFSET: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "vdp", version, about = "Equilibria, portraits, bifurcation detection and Conley certificates for the modified van der Pol oscillator")]
pub struct Cli {
    /// Format of the report printed on stdout.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Directory for written files; the report is also saved there as <command>.json.
    #[arg(long, env = "VDP_OUT_DIR", global = true)]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify E0, E1 and E2 at one parameter value.
    Equilibria(EquilibriaArgs),
    /// Write trajectory samples (CSV), a manifest and optionally an SVG.
    Portrait(PortraitArgs),
    /// Scan a theta range for connection or Hopf bifurcations and bisect each one.
    Detect(DetectArgs),
    /// Validate connection matrices, solve for transition matrices and print certificates.
    Conley(ConleyArgs),
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub d: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub e: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EquilibriaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub theta: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PortraitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub theta: f64,
    /// Integration time of every trajectory and branch.
    #[arg(long, default_value_t = 200.0)]
    pub t_end: f64,
    /// Seeds per side of the regular grid over the view box.
    #[arg(long, default_value_t = 4)]
    pub grid: usize,
    /// Rows per trajectory, equally spaced in time.
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED_OFFSET)]
    pub seed_offset: f64,
    /// Also render portrait.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectKind {
    Homoclinic,
    HeteroclinicUpper,
    HeteroclinicLower,
    Hopf,
}

impl fmt::Display for DetectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SaddleArg {
    E1,
    E2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Plus,
    Minus,
}

/// `lo:hi` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaRange {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for ThetaRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("bad number {v:?} in range {s:?}"));
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("range needs finite lo < hi, got {s:?}"));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub kind: DetectKind,
    /// Theta range `lo:hi`; optional for hopf, where it defaults to -0.5:0.5.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<ThetaRange>,
    /// Largest spacing of the scan.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_THETA)]
    pub tol_theta: f64,
    #[arg(long, default_value_t = DEFAULT_SEED_OFFSET)]
    pub seed_offset: f64,
    /// Integration time allowed for each branch to reach its section.
    #[arg(long, default_value_t = 200.0)]
    pub t_budget: f64,
    /// Saddle carrying the homoclinic loop.
    #[arg(long, value_enum, default_value_t = SaddleArg::E1)]
    pub saddle: SaddleArg,
    /// Unstable side for homoclinic gaps; defaults to the side facing the origin.
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "scenario"])))]
pub struct ConleyArgs {
    /// Built-in scenario: example4.1, example4.2-het1, example4.2-hom or example4.2-het2.
    #[arg(long)]
    pub preset: Option<String>,
    /// Scenario file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}
