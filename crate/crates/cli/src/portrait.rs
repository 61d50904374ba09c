//! Trajectory samples from a seed grid plus saddle branches, written as CSV
//! with a JSON manifest and an optional SVG.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use vdp_conley::flow::{
    manifold_branch_with, omega_limit_estimate, BranchConfig, BranchKind, FlowError, Integrator, Sample, Side,
    Termination, Trajectory,
};
use vdp_conley::model::{classify, equilibrium_report, vector_field, Equilibrium, StabilityClass, State, SystemParams};

use crate::args::PortraitArgs;
use crate::detect::check_tolerances;
use crate::report::{format_f64, BranchManifest, CliError, PortraitManifest, ReportBundle, ViewBox};
use crate::svg;

/// Offset of the seed placed next to each source.
const SOURCE_SEED_OFFSET: f64 = 1e-2;
const MAX_GRID: usize = 50;
const MAX_SAMPLES: usize = 1_000_000;

pub const CSV_NAME: &str = "portrait.csv";
pub const SVG_NAME: &str = "portrait.svg";
pub const MANIFEST_NAME: &str = "portrait.json";

#[derive(Debug, Clone, Serialize)]
pub struct PortraitConfig {
    #[serde(flatten)]
    pub args: PortraitArgs,
    pub view: ViewBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchRole {
    Grid,
    NearSource,
    Unstable,
    Stable,
}

impl BranchRole {
    pub fn name(self) -> &'static str {
        match self {
            BranchRole::Grid => "grid",
            BranchRole::NearSource => "near_source",
            BranchRole::Unstable => "unstable",
            BranchRole::Stable => "stable",
        }
    }
}

enum Job {
    Seed { id: String, role: BranchRole, start: State },
    Branch { id: String, saddle: Equilibrium, kind: BranchKind, side: Side },
}

pub struct Branch {
    pub id: String,
    pub role: BranchRole,
    pub traj: Trajectory,
    pub rows: Vec<Sample>,
}

/// Box around the three equilibria, padded by a quarter of their spread,
/// three units wide for every two high.
pub fn view_box(d: f64, e: f64) -> ViewBox {
    let xs = [0.0, -d, -e];
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = 0.25 * (hi - lo);
    let (x_min, x_max) = (lo - pad, hi + pad);
    let half = (x_max - x_min) / 3.0;
    ViewBox { x_min, x_max, y_min: -half, y_max: half }
}

fn jobs(p: &SystemParams, args: &PortraitArgs, view: &ViewBox) -> Vec<Job> {
    let mut jobs = Vec::new();
    let n = args.grid;
    for i in 0..n {
        for j in 0..n {
            let x = view.x_min + (view.x_max - view.x_min) * (i as f64 + 0.5) / n as f64;
            let y = view.y_min + (view.y_max - view.y_min) * (j as f64 + 0.5) / n as f64;
            jobs.push(Job::Seed { id: format!("grid_{i}_{j}"), role: BranchRole::Grid, start: State::new(x, y) });
        }
    }
    for which in Equilibrium::ALL {
        match classify(p, which).1 {
            StabilityClass::Source => {
                let at = which.location(p);
                jobs.push(Job::Seed {
                    id: format!("{which}_near"),
                    role: BranchRole::NearSource,
                    start: State::new(at.x + SOURCE_SEED_OFFSET, at.y),
                });
            }
            StabilityClass::Saddle => {
                for (kind, kname) in [(BranchKind::Unstable, "unstable"), (BranchKind::Stable, "stable")] {
                    for (side, sname) in [(Side::Plus, "plus"), (Side::Minus, "minus")] {
                        jobs.push(Job::Branch { id: format!("{which}_{kname}_{sname}"), saddle: which, kind, side });
                    }
                }
            }
            _ => {}
        }
    }
    jobs
}

/// Underflow keeps the partial trajectory; other errors abort.
fn keep_partial(r: Result<Trajectory, FlowError>) -> Result<Trajectory, CliError> {
    match r {
        Ok(t) => Ok(t),
        Err(FlowError::StepUnderflow { partial, .. }) => Ok(*partial),
        Err(e) => Err(e.into()),
    }
}

fn run_job(p: &SystemParams, args: &PortraitArgs, job: &Job) -> Result<Branch, CliError> {
    let (id, role, traj) = match job {
        Job::Seed { id, role, start } => {
            let traj = keep_partial(Integrator::new(args.tol)?.run(p, *start, args.t_end))?;
            (id.clone(), *role, traj)
        }
        Job::Branch { id, saddle, kind, side } => {
            let cfg = BranchConfig { seed_offset: args.seed_offset, tol: args.tol, t_budget: args.t_end, section: None };
            let traj = keep_partial(manifold_branch_with(p, *saddle, *kind, *side, &cfg).map(|b| b.path))?;
            let role = match kind {
                BranchKind::Unstable => BranchRole::Unstable,
                BranchKind::Stable => BranchRole::Stable,
            };
            (id.clone(), role, traj)
        }
    };
    let rows = resample(p, &traj, args.samples, args.t_end);
    Ok(Branch { id, role, traj, rows })
}

/// `samples` rows equally spaced in elapsed time over `[0, t_end]`, cubic
/// Hermite between integrator steps. Stops early where the trajectory does.
pub fn resample(p: &SystemParams, traj: &Trajectory, samples: usize, t_end: f64) -> Vec<Sample> {
    let t0 = traj.first().t;
    let sign = if traj.last().t < t0 { -1.0 } else { 1.0 };
    let elapsed = |s: &Sample| (s.t - t0).abs();
    let duration = traj.duration();
    let mut out = Vec::with_capacity(samples);
    let mut j = 0;
    for k in 0..samples {
        let tau = if k + 1 == samples { t_end } else { t_end * k as f64 / (samples - 1) as f64 };
        // round-off in the step sum must not drop the final row
        if tau > duration + 1e-9 * t_end {
            break;
        }
        while j + 2 < traj.samples.len() && elapsed(&traj.samples[j + 1]) < tau {
            j += 1;
        }
        let (a, b) = (traj.samples[j], traj.samples[(j + 1).min(traj.samples.len() - 1)]);
        let h = b.t - a.t;
        let state = if h == 0.0 {
            a.state
        } else {
            let s = ((t0 + sign * tau) - a.t) / h;
            let (fa, fb) = (vector_field(p, a.state), vector_field(p, b.state));
            let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
            let h10 = s * (1.0 - s) * (1.0 - s);
            let h01 = s * s * (3.0 - 2.0 * s);
            let h11 = s * s * (s - 1.0);
            h00 * a.state + (h * h10) * fa + h01 * b.state + (h * h11) * fb
        };
        out.push(Sample { t: t0 + sign * tau, state });
    }
    out
}

fn validate(args: &PortraitArgs) -> Result<SystemParams, CliError> {
    let p = SystemParams::new(args.model.d, args.model.e, args.theta)?;
    check_tolerances(args.tol, args.seed_offset)?;
    if !(args.t_end.is_finite() && args.t_end > 0.0) {
        return Err(CliError::Input(format!("t_end must be positive, got {}", args.t_end)));
    }
    if args.grid > MAX_GRID {
        return Err(CliError::Input(format!("grid must be at most {MAX_GRID}, got {}", args.grid)));
    }
    if !(2..=MAX_SAMPLES).contains(&args.samples) {
        return Err(CliError::Input(format!("samples must be in [2, {MAX_SAMPLES}], got {}", args.samples)));
    }
    Ok(p)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn csv_bytes(branches: &[Branch]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "x", "y", "branch_id"]).expect("in-memory writer");
    for b in branches {
        for s in &b.rows {
            w.write_record([format_f64(s.t), format_f64(s.state.x), format_f64(s.state.y), b.id.clone()])
                .expect("in-memory writer");
        }
    }
    w.into_inner().expect("in-memory writer")
}

pub fn run(args: &PortraitArgs, out_dir: &Path) -> Result<ReportBundle<PortraitConfig>, CliError> {
    let p = validate(args)?;
    let view = view_box(args.model.d, args.model.e);
    let branches: Vec<Branch> =
        jobs(&p, args, &view).par_iter().map(|job| run_job(&p, args, job)).collect::<Result<_, _>>()?;

    fs::create_dir_all(out_dir).map_err(|source| CliError::Io { path: out_dir.to_path_buf(), source })?;
    write(&out_dir.join(CSV_NAME), &csv_bytes(&branches))?;
    let reports: Vec<_> = Equilibrium::ALL.iter().map(|&w| equilibrium_report(&p, w)).collect();
    if args.svg {
        write(&out_dir.join(SVG_NAME), svg::render(&p, &view, &branches, &reports).as_bytes())?;
    }

    let manifest = PortraitManifest {
        csv: CSV_NAME.into(),
        svg: args.svg.then(|| SVG_NAME.into()),
        view,
        samples_per_branch: args.samples,
        rows: branches.iter().map(|b| b.rows.len()).sum(),
        branches: branches
            .iter()
            .map(|b| BranchManifest {
                id: b.id.clone(),
                kind: b.role.name().into(),
                start: b.traj.first().state,
                rows: b.rows.len(),
                truncated: b.traj.termination != Termination::Completed,
                termination: b.traj.termination,
                omega: omega_limit_estimate(&b.traj),
            })
            .collect(),
    };
    let mut bundle = ReportBundle::new("portrait", PortraitConfig { args: args.clone(), view });
    bundle.equilibria = reports;
    let truncated = manifest.branches.iter().filter(|b| b.truncated).count();
    if truncated > 0 {
        bundle.notes.push(format!("{truncated} of {} trajectories stopped before t_end", manifest.branches.len()));
    }
    bundle.portrait = Some(manifest);
    write(&out_dir.join(MANIFEST_NAME), bundle.to_json().as_bytes())?;
    Ok(bundle)
}

pub fn text(bundle: &ReportBundle<PortraitConfig>, out_dir: &Path) -> String {
    let m = bundle.portrait.as_ref().expect("portrait bundles carry a manifest");
    let mut out = format!("wrote {} rows to {}\n", m.rows, out_dir.join(&m.csv).display());
    if let Some(svg) = &m.svg {
        out += &format!("wrote {}\n", out_dir.join(svg).display());
    }
    for b in &m.branches {
        out += &format!(
            "{:<20} {:>6} rows  {:<16} omega: {}\n",
            b.id,
            b.rows,
            format!("{:?}", b.termination).to_lowercase(),
            crate::to_json_compact(&b.omega)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use vdp_conley::flow::integrate;

    #[test]
    fn resampling_matches_the_integrator_at_its_own_steps() {
        let p = SystemParams::new(0.5, 2.0, 0.02).unwrap();
        let traj = integrate(&p, State::new(0.1, 0.0), 10.0, 1e-10).unwrap();
        let rows = resample(&p, &traj, 101, 10.0);
        assert_eq!(rows.len(), 101);
        assert_eq!(rows[100].t, 10.0);
        assert!((rows[100].state - traj.last().state).norm() < 1e-12);
        // compare against a fresh run to t = 3.7
        let mid = integrate(&p, State::new(0.1, 0.0), 3.7, 1e-12).unwrap().last().state;
        assert!((rows[37].state - mid).norm() < 1e-6, "{}", (rows[37].state - mid).norm());
    }

    #[test]
    fn backward_runs_resample_in_negative_time() {
        let p = SystemParams::new(0.5, 2.0, 0.02).unwrap();
        let traj = integrate(&p, State::new(0.1, 0.0), -2.0, 1e-10).unwrap();
        let rows = resample(&p, &traj, 5, 2.0);
        assert_eq!(rows.iter().map(|r| r.t).collect::<Vec<_>>(), [0.0, -0.5, -1.0, -1.5, -2.0]);
    }

    #[test]
    fn truncated_runs_give_fewer_rows() {
        let p = SystemParams::new(-1.0, 2.0, 0.0).unwrap();
        let traj = integrate(&p, State::new(5.0, 0.0), 50.0, 1e-9).unwrap();
        assert_eq!(traj.termination, Termination::Escaped);
        assert!(resample(&p, &traj, 501, 50.0).len() < 501);
    }

    #[test]
    fn view_box_contains_the_equilibria() {
        let v = view_box(-1.0, 2.0);
        for x in [0.0, 1.0, -2.0] {
            assert!(v.x_min < x && x < v.x_max);
        }
        assert!((v.x_max - v.x_min - 1.5 * (v.y_max - v.y_min)).abs() < 1e-12);
    }
}
