//! Theta scan for sign changes followed by bisection of every bracket.

use rayon::prelude::*;
use serde::Serialize;
use vdp_conley::flow::{
    bisect_bifurcation_with, connection_gap_with, GapConfig, GapKind, HalfPlane, Side, MAX_SEED_OFFSET, MAX_TOL,
    MIN_SEED_OFFSET, MIN_TOL,
};
use vdp_conley::model::{classify, lyapunov_coefficient, Equilibrium, SystemParams};

use crate::args::{DetectArgs, DetectKind, SaddleArg, SideArg, ThetaRange};
use crate::report::{BracketReport, CliError, HopfReport, ReportBundle, SweepSample};

const DEFAULT_HOPF_RANGE: ThetaRange = ThetaRange { lo: -0.5, hi: 0.5 };
const MAX_SCAN_POINTS: usize = 100_000;
/// Slack on the scan slope before a shrinking bracket counts as a jump.
const JUMP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct DetectConfig {
    pub d: f64,
    pub e: f64,
    pub kind: DetectKind,
    pub range: ThetaRange,
    pub step: f64,
    pub scan_points: usize,
    pub tol: f64,
    pub tol_theta: f64,
    pub seed_offset: f64,
    pub t_budget: f64,
    pub gap_kind: Option<GapKind>,
    pub homoclinic_side: Option<Side>,
}

pub struct Detection {
    pub bundle: ReportBundle<DetectConfig>,
    /// Brackets whose bisection failed.
    pub failures: Vec<String>,
}

/// Same ranges the integrator and the branch seeding enforce, checked once
/// instead of failing every scan point.
pub fn check_tolerances(tol: f64, seed_offset: f64) -> Result<(), CliError> {
    if !(MIN_TOL..=MAX_TOL).contains(&tol) {
        return Err(CliError::Input(format!("tol {tol} outside [{MIN_TOL:e}, {MAX_TOL:e}]")));
    }
    if !(MIN_SEED_OFFSET..=MAX_SEED_OFFSET).contains(&seed_offset) {
        return Err(CliError::Input(format!(
            "seed offset {seed_offset} outside [{MIN_SEED_OFFSET:e}, {MAX_SEED_OFFSET:e}]"
        )));
    }
    Ok(())
}

fn resolve(args: &DetectArgs) -> Result<DetectConfig, CliError> {
    let (d, e) = (args.model.d, args.model.e);
    // parameter checks only; theta is swept
    SystemParams::new(d, e, 0.0)?;
    let range = match (args.range, args.kind) {
        (Some(r), _) => r,
        (None, DetectKind::Hopf) => DEFAULT_HOPF_RANGE,
        (None, _) => return Err(CliError::Input(format!("--range lo:hi is required for --kind {}", args.kind))),
    };
    if !(args.step.is_finite() && args.step > 0.0) {
        return Err(CliError::Input(format!("step must be positive, got {}", args.step)));
    }
    check_tolerances(args.tol, args.seed_offset)?;
    if !(args.tol_theta.is_finite() && args.tol_theta > 0.0) {
        return Err(CliError::Input(format!("tol_theta must be positive, got {}", args.tol_theta)));
    }
    if !(args.t_budget.is_finite() && args.t_budget > 0.0) {
        return Err(CliError::Input(format!("t_budget must be positive, got {}", args.t_budget)));
    }
    let cells = ((range.hi - range.lo) / args.step * (1.0 - 1e-12)).ceil().max(1.0);
    if cells >= MAX_SCAN_POINTS as f64 {
        return Err(CliError::Input(format!("range/step gives more than {MAX_SCAN_POINTS} scan points")));
    }
    let saddle = match args.saddle {
        SaddleArg::E1 => Equilibrium::E1,
        SaddleArg::E2 => Equilibrium::E2,
    };
    let gap_kind = match args.kind {
        DetectKind::Homoclinic => Some(GapKind::Homoclinic { saddle }),
        DetectKind::HeteroclinicUpper => Some(GapKind::heteroclinic(d, e, HalfPlane::Upper)),
        DetectKind::HeteroclinicLower => Some(GapKind::heteroclinic(d, e, HalfPlane::Lower)),
        DetectKind::Hopf => None,
    };
    let homoclinic_side = match gap_kind {
        Some(GapKind::Homoclinic { saddle }) => Some(match args.side {
            Some(SideArg::Plus) => Side::Plus,
            Some(SideArg::Minus) => Side::Minus,
            None => {
                let p = SystemParams::new(d, e, 0.0)?;
                Side::towards(-saddle.location(&p).x)
            }
        }),
        _ => None,
    };
    Ok(DetectConfig {
        d,
        e,
        kind: args.kind,
        range,
        step: args.step,
        scan_points: cells as usize + 1,
        tol: args.tol,
        tol_theta: args.tol_theta,
        seed_offset: args.seed_offset,
        t_budget: args.t_budget,
        gap_kind,
        homoclinic_side,
    })
}

impl DetectConfig {
    fn gap_config(&self) -> GapConfig {
        GapConfig {
            seed_offset: self.seed_offset,
            tol: self.tol,
            t_budget: self.t_budget,
            homoclinic_side: self.homoclinic_side,
        }
    }

    fn thetas(&self) -> Vec<f64> {
        let n = self.scan_points - 1;
        let ThetaRange { lo, hi } = self.range;
        (0..=n).map(|i| if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 }).collect()
    }

    fn evaluate(&self, theta: f64) -> Result<f64, CliError> {
        let p = SystemParams::new(self.d, self.e, theta)?;
        match self.gap_kind {
            Some(kind) => Ok(connection_gap_with(&p, kind, &self.gap_config())?.value),
            None => Ok(hopf_indicator(&p)),
        }
    }
}

/// Largest real part of the spectrum at E0.
fn hopf_indicator(p: &SystemParams) -> f64 {
    let (spec, _) = classify(p, Equilibrium::E0);
    spec.lambda1.re.max(spec.lambda2.re)
}

/// Cells `(i, i + 1)` of the scan over which the value changes sign. A zero
/// at a scan point opens a cell starting there.
fn sign_changes(values: &[Option<f64>]) -> Vec<usize> {
    let n = values.len();
    (0..n.saturating_sub(1))
        .filter(|&i| match (values[i], values[i + 1]) {
            (Some(a), Some(b)) => a == 0.0 || a * b < 0.0 || (i + 2 == n && b == 0.0),
            _ => false,
        })
        .collect()
}

fn bisect_hopf(cfg: &DetectConfig, lo: f64, hi: f64) -> Result<BracketReport, CliError> {
    let f = |t: f64| cfg.evaluate(t);
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    let mut iterations = 0;
    let mut exact = None;
    if fa == 0.0 {
        exact = Some(a);
    } else if fb == 0.0 {
        exact = Some(b);
    }
    while exact.is_none() && b - a > cfg.tol_theta {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        iterations += 1;
        if fm == 0.0 {
            exact = Some(m);
        } else if fa * fm < 0.0 {
            (b, fb) = (m, fm);
        } else {
            (a, fa) = (m, fm);
        }
    }
    let (theta_lo, theta_hi, refined) = match exact {
        Some(t) => (t, t, t),
        None => (a, b, 0.5 * (a + b)),
    };
    Ok(BracketReport {
        kind: cfg.kind.to_string(),
        gap_kind: None,
        scan_lo: lo,
        scan_hi: hi,
        theta_lo,
        theta_hi,
        refined_theta: refined,
        value_lo: if exact.is_some() { 0.0 } else { fa },
        value_hi: if exact.is_some() { 0.0 } else { fb },
        iterations,
        exact_root: exact.is_some(),
        jump_suspected: false,
    })
}

fn bisect_gap(cfg: &DetectConfig, kind: GapKind, lo: f64, hi: f64, scan_slope: f64) -> Result<BracketReport, CliError> {
    let b = bisect_bifurcation_with(cfg.d, cfg.e, lo, hi, kind, cfg.tol_theta, &cfg.gap_config())?;
    let residual = b.gap_lo.abs().max(b.gap_hi.abs());
    Ok(BracketReport {
        kind: cfg.kind.to_string(),
        gap_kind: Some(kind),
        scan_lo: lo,
        scan_hi: hi,
        theta_lo: b.theta_lo,
        theta_hi: b.theta_hi,
        refined_theta: b.refined_theta,
        value_lo: b.gap_lo,
        value_hi: b.gap_hi,
        iterations: b.iterations,
        exact_root: b.exact_root,
        jump_suspected: !b.exact_root && residual > JUMP_FACTOR * scan_slope * b.width(),
    })
}

pub fn run(args: &DetectArgs) -> Result<Detection, CliError> {
    let cfg = resolve(args)?;

    let thetas = cfg.thetas();
    let results: Vec<Result<f64, CliError>> = thetas.par_iter().map(|&t| cfg.evaluate(t)).collect();
    let values: Vec<Option<f64>> = results.iter().map(|r| r.as_ref().ok().copied()).collect();
    let sweep: Vec<SweepSample> = thetas
        .iter()
        .zip(&results)
        .map(|(&theta, r)| match r {
            Ok(v) => SweepSample { theta, value: Some(*v), error: None },
            Err(e) => SweepSample { theta, value: None, error: Some(e.to_string()) },
        })
        .collect();

    let cells = sign_changes(&values);
    let outcomes: Vec<Result<BracketReport, CliError>> = cells
        .par_iter()
        .map(|&i| {
            let (lo, hi) = (thetas[i], thetas[i + 1]);
            match cfg.gap_kind {
                Some(kind) => {
                    let slope = (values[i + 1].unwrap() - values[i].unwrap()).abs() / (hi - lo);
                    bisect_gap(&cfg, kind, lo, hi, slope)
                }
                None => bisect_hopf(&cfg, lo, hi),
            }
        })
        .collect();

    let mut bundle = ReportBundle::new("detect", cfg.clone());
    let mut failures = Vec::new();
    for (i, outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(b) => bundle.brackets.push(b),
            Err(e) => failures.push(format!("bisection of ({}, {}) failed: {e}", thetas[*i], thetas[i + 1])),
        }
    }

    let skipped = sweep.iter().filter(|s| s.error.is_some()).count();
    if skipped > 0 {
        bundle.notes.push(format!("{skipped} of {} scan points could not be evaluated", sweep.len()));
    }
    if cells.is_empty() {
        bundle.notes.push("no sign change found in the scanned range".into());
    }
    if bundle.brackets.iter().any(|b| b.jump_suspected) {
        bundle.notes.push("some brackets close on a jump of the gap rather than a root".into());
    }
    bundle.notes.extend(failures.iter().cloned());

    if cfg.kind == DetectKind::Hopf {
        let at_hopf = SystemParams::new(cfg.d, cfg.e, 0.0)?;
        let (normal_form, l) =
            lyapunov_coefficient(&at_hopf).map_err(|e| CliError::Numerical(e.to_string()))?;
        let stability = if l < 0.0 {
            "stable limit cycle on source side"
        } else {
            "unstable limit cycle on sink side"
        };
        if let Some(b) = bundle.brackets.first() {
            bundle.hopf = Some(HopfReport {
                theta_star: b.refined_theta,
                closed_form_theta: 0.0,
                first_lyapunov_coefficient: l,
                normal_form,
                stability: stability.into(),
            });
        }
    }
    bundle.sweep = sweep;
    Ok(Detection { bundle, failures })
}

pub fn text(bundle: &ReportBundle<DetectConfig>) -> String {
    let c = &bundle.provenance.config;
    let mut out = format!(
        "{} scan of theta in [{}, {}], {} points, d = {}, e = {}\n",
        c.kind, c.range.lo, c.range.hi, c.scan_points, c.d, c.e
    );
    for b in &bundle.brackets {
        out += &format!(
            "bracket ({:.6}, {:.6}) from scan cell ({}, {}): theta* = {:.6}{}\n",
            b.theta_lo,
            b.theta_hi,
            b.scan_lo,
            b.scan_hi,
            b.refined_theta,
            if b.jump_suspected { " (jump suspected)" } else { "" }
        );
    }
    if let Some(h) = &bundle.hopf {
        out += &format!(
            "hopf: theta* = {} (closed form {}), L = {}, {}\n",
            h.theta_star, h.closed_form_theta, h.first_lyapunov_coefficient, h.stability
        );
    }
    for n in &bundle.notes {
        out += &format!("note: {n}\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_changes_skip_missing_values() {
        let v = [Some(1.0), Some(-1.0), None, Some(2.0), Some(-3.0), Some(-1.0)];
        assert_eq!(sign_changes(&v), vec![0, 3]);
    }

    #[test]
    fn zeros_open_exactly_one_cell() {
        assert_eq!(sign_changes(&[Some(-1.0), Some(0.0), Some(1.0)]), vec![1]);
        assert_eq!(sign_changes(&[Some(-1.0), Some(0.0)]), vec![0]);
        assert!(sign_changes(&[Some(1.0), Some(2.0)]).is_empty());
    }

    #[test]
    fn scan_hits_both_ends() {
        let cfg = DetectConfig {
            d: 0.5,
            e: 2.0,
            kind: DetectKind::Hopf,
            range: ThetaRange { lo: -0.3, hi: 1.3 },
            step: 0.01,
            scan_points: 161,
            tol: 1e-9,
            tol_theta: 1e-4,
            seed_offset: 1e-6,
            t_budget: 200.0,
            gap_kind: None,
            homoclinic_side: None,
        };
        let t = cfg.thetas();
        assert_eq!((t[0], t[160]), (-0.3, 1.3));
        assert!(t.windows(2).all(|w| w[1] - w[0] <= 0.01 + 1e-12));
    }
}
