use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use vdp_conley::conley::{
    infer_bifurcation, solve_transition_matrices, validate_connection_matrix, AlgebraError, EntryStatus,
    GradedMap, MatrixView, MorseDecomposition, Scenario,
};

use crate::args::ConleyArgs;
use crate::report::{CertificateReport, CliError, ReportBundle, TransitionReport, ValidationReport};

#[derive(Debug, Clone, Serialize)]
pub struct ConleyConfig {
    pub preset: Option<String>,
    pub scenario: Option<PathBuf>,
    pub name: String,
    pub theta_before: Option<f64>,
    pub theta_after: Option<f64>,
}

pub struct ConleyOutcome {
    pub bundle: ReportBundle<ConleyConfig>,
    /// Set when a connection matrix fails an axiom or no transition matrix exists.
    pub rejection: Option<String>,
}

fn load(args: &ConleyArgs) -> Result<Scenario, CliError> {
    match (&args.preset, &args.scenario) {
        (Some(name), _) => Scenario::preset(name).ok_or_else(|| {
            let known: Vec<_> = Scenario::preset_names().collect();
            CliError::Input(format!("unknown preset {name:?}; available: {}", known.join(", ")))
        }),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            Scenario::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        (None, None) => Err(CliError::Input("one of --preset or --scenario is required".into())),
    }
}

fn validation(name: &str, d: &GradedMap, m: &MorseDecomposition) -> Result<ValidationReport, CliError> {
    let report = validate_connection_matrix(d, m)?;
    Ok(ValidationReport {
        matrix: name.into(),
        valid: report.is_valid(),
        exhaustive: report.exhaustive,
        messages: report.violations.iter().map(|v| v.to_string()).collect(),
        violations: report.violations,
    })
}

pub fn run(args: &ConleyArgs) -> Result<ConleyOutcome, CliError> {
    let s = load(args)?;
    let config = ConleyConfig {
        preset: args.preset.clone(),
        scenario: args.scenario.clone(),
        name: s.name.clone(),
        theta_before: s.window.map(|w| w.before),
        theta_after: s.window.map(|w| w.after),
    };
    let mut bundle = ReportBundle::new("conley", config);
    let (name0, name1) = match s.window {
        Some(w) => (format!("Δ(θ={})", w.before), format!("Δ(θ={})", w.after)),
        None => ("Δ(θ)".to_string(), "Δ(θ')".to_string()),
    };
    bundle.matrices.push(MatrixView::of_map(&name0, &s.before_connection, &s.before, &s.before));
    bundle.matrices.push(MatrixView::of_map(&name1, &s.after_connection, &s.after, &s.after));
    bundle.validation.push(validation(&name0, &s.before_connection, &s.before)?);
    bundle.validation.push(validation(&name1, &s.after_connection, &s.after)?);

    let invalid: Vec<String> = bundle
        .validation
        .iter()
        .filter(|v| !v.valid)
        .flat_map(|v| v.messages.iter().map(move |m| format!("{}: {m}", v.matrix)))
        .collect();
    if !invalid.is_empty() {
        bundle.notes.extend(invalid.iter().cloned());
        return Ok(ConleyOutcome { bundle, rejection: Some(invalid.join("; ")) });
    }

    let sol = match solve_transition_matrices(&s.before_connection, &s.after_connection, &s.before, &s.after, &s.constraint) {
        Ok(sol) => sol,
        Err(AlgebraError::NoTransitionMatrix) => {
            let msg = "no transition matrix satisfies the equation and the constraints".to_string();
            bundle.notes.push(msg.clone());
            return Ok(ConleyOutcome { bundle, rejection: Some(msg) });
        }
        Err(e) => return Err(e.into()),
    };
    bundle.matrices.push(MatrixView::of_transition("T", &sol, &s.before, &s.after));
    bundle.transition = Some(TransitionReport {
        solution_count: sol.solution_count,
        continued: sol.continued.clone(),
        forced: sol.forced().cloned().collect(),
    });
    bundle.certificates = infer_bifurcation(&sol, s.window)
        .into_iter()
        .map(|c| CertificateReport { text: c.to_string(), certificate: c })
        .collect();
    if bundle.certificates.is_empty() {
        bundle.notes.push("no forced entry yields a certificate".into());
    }
    Ok(ConleyOutcome { bundle, rejection: None })
}

pub fn text(bundle: &ReportBundle<ConleyConfig>) -> String {
    let c = &bundle.provenance.config;
    let mut out = format!("scenario {}\n\n", c.name);
    for m in &bundle.matrices {
        out += &m.render();
        out.push('\n');
    }
    for v in &bundle.validation {
        out += &format!("{}: {}\n", v.matrix, if v.valid { "valid" } else { "INVALID" });
        for m in &v.messages {
            out += &format!("  {m}\n");
        }
    }
    if let Some(t) = &bundle.transition {
        out += &format!("transition matrices: {}\n", t.solution_count);
        if !t.forced.is_empty() {
            out += "forced entries:\n";
        }
        for e in &t.forced {
            let value = match e.status {
                EntryStatus::Fixed(v) | EntryStatus::Forced(v) => v.to_string(),
                EntryStatus::Free => "*".into(),
            };
            out += &format!("  T({},{}) in degree {} = {value}\n", e.row_set, e.col_set, e.degree);
        }
    }
    if !bundle.certificates.is_empty() {
        out += "certificates:\n";
    }
    for cert in &bundle.certificates {
        out += &format!("  {}\n", cert.text);
    }
    for n in &bundle.notes {
        out += &format!("note: {n}\n");
    }
    out
}
