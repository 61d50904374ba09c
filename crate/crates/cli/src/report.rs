//! The report bundle shared by all commands and its deterministic JSON form.

use std::io;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use thiserror::Error;
use vdp_conley::conley::{AlgebraError, Certificate, MatrixView, TransitionEntry, Violation};
use vdp_conley::flow::{FlowError, GapKind, OmegaLimit, Termination};
use vdp_conley::model::{EquilibriumReport, NormalFormCoefficients, ParamError, State};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Param(p) => p.into(),
            FlowError::Tolerance(_)
            | FlowError::Time(_)
            | FlowError::InitialState(_)
            | FlowError::SeedOffset(_)
            | FlowError::InvalidKind(_)
            | FlowError::InvalidBracket(_) => CliError::Input(e.to_string()),
            FlowError::StepUnderflow { .. } | FlowError::NotASaddle { .. } | FlowError::NoCrossing(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct Provenance<C> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// Effective configuration with every default filled in.
    pub config: C,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSample {
    pub theta: f64,
    pub value: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketReport {
    pub kind: String,
    pub gap_kind: Option<GapKind>,
    /// Neighbouring scan points whose values differ in sign.
    pub scan_lo: f64,
    pub scan_hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub refined_theta: f64,
    pub value_lo: f64,
    pub value_hi: f64,
    pub iterations: usize,
    pub exact_root: bool,
    /// The values stay large while the bracket shrinks: a jump rather than a root.
    pub jump_suspected: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct HopfReport {
    pub theta_star: f64,
    pub closed_form_theta: f64,
    pub first_lyapunov_coefficient: f64,
    pub normal_form: NormalFormCoefficients,
    pub stability: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub matrix: String,
    pub valid: bool,
    pub exhaustive: bool,
    pub violations: Vec<Violation>,
    pub messages: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub text: String,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionReport {
    pub solution_count: usize,
    pub continued: Vec<String>,
    pub forced: Vec<TransitionEntry>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ViewBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchManifest {
    pub id: String,
    pub kind: String,
    pub start: State,
    pub rows: usize,
    pub truncated: bool,
    pub termination: Termination,
    pub omega: OmegaLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct PortraitManifest {
    pub csv: String,
    pub svg: Option<String>,
    pub view: ViewBox,
    pub samples_per_branch: usize,
    pub rows: usize,
    pub branches: Vec<BranchManifest>,
}

#[derive(Debug, Serialize)]
pub struct ReportBundle<C> {
    pub provenance: Provenance<C>,
    pub equilibria: Vec<EquilibriumReport>,
    pub sweep: Vec<SweepSample>,
    pub brackets: Vec<BracketReport>,
    pub hopf: Option<HopfReport>,
    pub matrices: Vec<MatrixView>,
    pub validation: Vec<ValidationReport>,
    pub transition: Option<TransitionReport>,
    pub certificates: Vec<CertificateReport>,
    pub portrait: Option<PortraitManifest>,
    pub notes: Vec<String>,
}

impl<C: Serialize> ReportBundle<C> {
    pub fn new(command: &'static str, config: C) -> Self {
        Self {
            provenance: Provenance { tool: "vdp", version: env!("CARGO_PKG_VERSION"), command, config },
            equilibria: Vec::new(),
            sweep: Vec::new(),
            brackets: Vec::new(),
            hopf: None,
            matrices: Vec::new(),
            validation: Vec::new(),
            transition: None,
            certificates: Vec::new(),
            portrait: None,
            notes: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// `v` with 17 significant digits: fixed notation for exponents in
/// `-5..17`, scientific otherwise.
pub fn format_f64(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        format!("{v:.*}", (16 - exp) as usize)
    } else {
        sci
    }
}

struct Fixed17(PrettyFormatter<'static>);

impl Formatter for Fixed17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Fixed17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types always serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}
