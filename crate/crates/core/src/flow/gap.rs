//! Signed section distances between saddle branches, and bisection in theta.
//!
//! Sign conventions:
//!
//! * homoclinic at saddle `s`: the unstable branch leaving `s` towards the
//!   origin and the stable branch arriving from the same side are followed to
//!   the vertical line `x = 0` on the half plane where they come back. The gap
//!   is positive when the unstable branch lies inside the stable one, i.e.
//!   closer to the origin;
//! * heteroclinic: the source's unstable branch and the target's stable branch
//!   are followed to the vertical line midway between the two saddles. The gap
//!   is `y_unstable - y_stable`, positive when the unstable branch passes above.

use std::fmt;

use serde::Serialize;

use super::integrator::{Section, Sign, Termination};
use super::manifold::{manifold_branch_with, BranchConfig, BranchKind, ManifoldBranch, Side, DEFAULT_SEED_OFFSET};
use super::FlowError;
use crate::model::{Equilibrium, State, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    fn sign(self) -> Sign {
        match self {
            HalfPlane::Upper => Sign::Positive,
            HalfPlane::Lower => Sign::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GapKind {
    Homoclinic { saddle: Equilibrium },
    Heteroclinic { source: Equilibrium, target: Equilibrium, half_plane: HalfPlane },
}

impl GapKind {
    /// Connection between E1 and E2 in the given half plane. Since `x' = y`,
    /// orbits in the upper half plane move right, so the source is the left
    /// saddle there and the right one in the lower half plane.
    pub fn heteroclinic(d: f64, e: f64, half_plane: HalfPlane) -> Self {
        let (x1, x2) = (-d, -e);
        let (left, right) = if x1 < x2 {
            (Equilibrium::E1, Equilibrium::E2)
        } else {
            (Equilibrium::E2, Equilibrium::E1)
        };
        match half_plane {
            HalfPlane::Upper => GapKind::Heteroclinic { source: left, target: right, half_plane },
            HalfPlane::Lower => GapKind::Heteroclinic { source: right, target: left, half_plane },
        }
    }
}

impl fmt::Display for GapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GapKind::Homoclinic { saddle } => write!(f, "homoclinic at {saddle}"),
            GapKind::Heteroclinic { source, target, half_plane } => {
                let hp = match half_plane {
                    HalfPlane::Upper => "upper",
                    HalfPlane::Lower => "lower",
                };
                write!(f, "heteroclinic {source} -> {target} ({hp} half plane)")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapConfig {
    pub seed_offset: f64,
    pub tol: f64,
    pub t_budget: f64,
    /// Unstable side for homoclinic gaps; `None` means towards the origin.
    pub homoclinic_side: Option<Side>,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self { seed_offset: DEFAULT_SEED_OFFSET, tol: 1e-10, t_budget: 200.0, homoclinic_side: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConnectionGap {
    pub theta: f64,
    pub value: f64,
    pub kind: GapKind,
    pub section: Section,
    pub unstable_crossing: State,
    pub stable_crossing: State,
}

pub fn connection_gap(p: &SystemParams, kind: GapKind) -> Result<ConnectionGap, FlowError> {
    connection_gap_with(p, kind, &GapConfig::default())
}

fn crossing(branch: &ManifoldBranch) -> Result<State, FlowError> {
    match branch.path.first_crossing() {
        Some(c) if branch.path.termination == Termination::SectionCrossed => Ok(c.state),
        _ => {
            let kind = match branch.kind {
                BranchKind::Unstable => "unstable",
                BranchKind::Stable => "stable",
            };
            Err(FlowError::NoCrossing(format!(
                "{kind} branch of {} at theta = {} ended ({:?}) at ({:.3e}, {:.3e}) before the section",
                branch.saddle,
                branch.path.params.theta(),
                branch.path.termination,
                branch.path.last().state.x,
                branch.path.last().state.y,
            )))
        }
    }
}

pub fn connection_gap_with(p: &SystemParams, kind: GapKind, cfg: &GapConfig) -> Result<ConnectionGap, FlowError> {
    let branch_cfg = |section| BranchConfig { seed_offset: cfg.seed_offset, tol: cfg.tol, t_budget: cfg.t_budget, section: Some(section) };
    match kind {
        GapKind::Homoclinic { saddle } => {
            let xs = saddle.location(p).x;
            let side = cfg.homoclinic_side.unwrap_or(Side::towards(-xs));
            // the branches come back through x = 0 heading against `side`
            let half = if side == Side::Plus { Sign::Negative } else { Sign::Positive };
            let section = Section::vertical(0.0, Some(half));
            let c = branch_cfg(section);
            let u = crossing(&manifold_branch_with(p, saddle, BranchKind::Unstable, side, &c)?)?;
            let s = crossing(&manifold_branch_with(p, saddle, BranchKind::Stable, side, &c)?)?;
            Ok(ConnectionGap {
                theta: p.theta(),
                value: side.sign() * (u.y - s.y),
                kind,
                section,
                unstable_crossing: u,
                stable_crossing: s,
            })
        }
        GapKind::Heteroclinic { source, target, half_plane } => {
            let (xs, xt) = (source.location(p).x, target.location(p).x);
            let rightwards = xt > xs;
            if source == target || rightwards != (half_plane == HalfPlane::Upper) {
                return Err(FlowError::InvalidKind(format!(
                    "{kind}: orbits in that half plane cannot run from x = {xs} to x = {xt}"
                )));
            }
            let section = Section::vertical(0.5 * (xs + xt), Some(half_plane.sign()));
            let c = branch_cfg(section);
            let towards = Side::towards(xt - xs);
            let away = if towards == Side::Plus { Side::Minus } else { Side::Plus };
            let u = crossing(&manifold_branch_with(p, source, BranchKind::Unstable, towards, &c)?)?;
            let s = crossing(&manifold_branch_with(p, target, BranchKind::Stable, away, &c)?)?;
            Ok(ConnectionGap {
                theta: p.theta(),
                value: u.y - s.y,
                kind,
                section,
                unstable_crossing: u,
                stable_crossing: s,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationBracket {
    pub kind: GapKind,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub gap_lo: f64,
    pub gap_hi: f64,
    pub refined_theta: f64,
    pub iterations: usize,
    /// The gap vanished exactly at `refined_theta`.
    pub exact_root: bool,
}

impl BifurcationBracket {
    pub fn width(&self) -> f64 {
        self.theta_hi - self.theta_lo
    }
}

pub fn bisect_bifurcation(
    d: f64,
    e: f64,
    theta_lo: f64,
    theta_hi: f64,
    kind: GapKind,
    tol_theta: f64,
) -> Result<BifurcationBracket, FlowError> {
    bisect_bifurcation_with(d, e, theta_lo, theta_hi, kind, tol_theta, &GapConfig::default())
}

/// Bisection on theta at fixed `(d, e)` until the bracket is no wider than
/// `tol_theta`; `refined_theta` is the final midpoint.
pub fn bisect_bifurcation_with(
    d: f64,
    e: f64,
    theta_lo: f64,
    theta_hi: f64,
    kind: GapKind,
    tol_theta: f64,
    cfg: &GapConfig,
) -> Result<BifurcationBracket, FlowError> {
    if !(theta_lo < theta_hi) || !(tol_theta > 0.0) {
        return Err(FlowError::InvalidBracket(format!(
            "need theta_lo < theta_hi and tol_theta > 0 (got {theta_lo}, {theta_hi}, {tol_theta})"
        )));
    }
    let gap = |theta: f64| -> Result<f64, FlowError> {
        Ok(connection_gap_with(&SystemParams::new(d, e, theta)?, kind, cfg)?.value)
    };
    let (mut lo, mut hi) = (theta_lo, theta_hi);
    let (mut g_lo, mut g_hi) = (gap(lo)?, gap(hi)?);
    let done = |lo, hi, g_lo, g_hi, refined, iterations, exact_root| BifurcationBracket {
        kind,
        theta_lo: lo,
        theta_hi: hi,
        gap_lo: g_lo,
        gap_hi: g_hi,
        refined_theta: refined,
        iterations,
        exact_root,
    };
    if g_lo == 0.0 {
        return Ok(done(lo, hi, g_lo, g_hi, lo, 0, true));
    }
    if g_hi == 0.0 {
        return Ok(done(lo, hi, g_lo, g_hi, hi, 0, true));
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(FlowError::InvalidBracket(format!(
            "gap has the same sign at theta = {lo} ({g_lo}) and theta = {hi} ({g_hi})"
        )));
    }
    let mut iterations = 0;
    while hi - lo > tol_theta {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = gap(mid)?;
        iterations += 1;
        if g_mid == 0.0 {
            return Ok(done(lo, hi, g_lo, g_hi, mid, iterations, true));
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    Ok(done(lo, hi, g_lo, g_hi, 0.5 * (lo + hi), iterations, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gap(d: f64, e: f64, theta: f64, kind: GapKind) -> f64 {
        connection_gap(&SystemParams::new(d, e, theta).unwrap(), kind).unwrap().value
    }

    const HOM_E1: GapKind = GapKind::Homoclinic { saddle: Equilibrium::E1 };

    #[test]
    fn heteroclinic_kind_orients_by_half_plane() {
        assert_eq!(
            GapKind::heteroclinic(-1.0, 2.0, HalfPlane::Upper),
            GapKind::Heteroclinic { source: Equilibrium::E2, target: Equilibrium::E1, half_plane: HalfPlane::Upper }
        );
        assert_eq!(
            GapKind::heteroclinic(-1.0, 2.0, HalfPlane::Lower),
            GapKind::Heteroclinic { source: Equilibrium::E1, target: Equilibrium::E2, half_plane: HalfPlane::Lower }
        );
    }

    #[test]
    fn wrong_orientation_is_rejected() {
        let p = SystemParams::new(-1.0, 2.0, 0.0).unwrap();
        let kind = GapKind::Heteroclinic { source: Equilibrium::E1, target: Equilibrium::E2, half_plane: HalfPlane::Upper };
        assert!(matches!(connection_gap(&p, kind), Err(FlowError::InvalidKind(_))));
    }

    #[test]
    fn e2_must_be_a_saddle() {
        let p = SystemParams::new(0.5, 2.0, 0.0).unwrap();
        let kind = GapKind::heteroclinic(0.5, 2.0, HalfPlane::Upper);
        assert!(matches!(connection_gap(&p, kind), Err(FlowError::NotASaddle { .. })));
    }

    #[test]
    fn homoclinic_gap_changes_sign() {
        let before = gap(0.5, 2.0, 0.02, HOM_E1);
        let after = gap(0.5, 2.0, 0.04, HOM_E1);
        assert!(before > 0.0 && after < 0.0, "{before} {after}");
    }

    #[test]
    fn upper_heteroclinic_gap_changes_sign() {
        let kind = GapKind::heteroclinic(-1.0, 2.0, HalfPlane::Upper);
        let before = gap(-1.0, 2.0, -0.2, kind);
        let after = gap(-1.0, 2.0, -0.05, kind);
        assert!(before.signum() != after.signum(), "{before} {after}");
    }

    #[test]
    fn gap_is_deterministic() {
        let p = SystemParams::new(0.5, 2.0, 0.03).unwrap();
        assert_eq!(connection_gap(&p, HOM_E1).unwrap(), connection_gap(&p, HOM_E1).unwrap());
    }

    #[test]
    fn same_sign_bracket_is_invalid() {
        let err = bisect_bifurcation(0.5, 2.0, 0.02, 0.025, HOM_E1, 1e-3).unwrap_err();
        assert!(matches!(err, FlowError::InvalidBracket(_)));
        assert!(err.to_string().starts_with("invalid bracket"));
    }

    #[test]
    fn bisection_narrows_to_tolerance() {
        let b = bisect_bifurcation(0.5, 2.0, 0.02, 0.04, HOM_E1, 1e-3).unwrap();
        assert!(b.width() <= 1e-3);
        assert!(b.theta_lo < b.refined_theta && b.refined_theta < b.theta_hi);
        assert!(b.gap_lo * b.gap_hi < 0.0);
        assert!(0.02 < b.refined_theta && b.refined_theta < 0.04);
    }
}
