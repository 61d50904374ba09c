//! Stable and unstable branches of saddle equilibria.

use serde::Serialize;

use super::integrator::{Integrator, Section, Trajectory};
use super::FlowError;
use crate::model::{classify, Equilibrium, StabilityClass, State, SystemParams};

pub const MIN_SEED_OFFSET: f64 = 1e-7;
pub const MAX_SEED_OFFSET: f64 = 1e-4;
pub const DEFAULT_SEED_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Unstable,
    Stable,
}

/// Which way along the eigenvector the seed is placed: `Plus` towards
/// increasing x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn towards(dx: f64) -> Side {
        if dx >= 0.0 {
            Side::Plus
        } else {
            Side::Minus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchConfig {
    pub seed_offset: f64,
    pub tol: f64,
    /// Integration time before the branch is cut off.
    pub t_budget: f64,
    /// Stop at the first admissible crossing of this section.
    pub section: Option<Section>,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self { seed_offset: DEFAULT_SEED_OFFSET, tol: 1e-10, t_budget: 200.0, section: None }
    }
}

/// Eigen-direction of a saddle, normalized with positive x component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenDirection {
    pub eigenvalue: f64,
    pub vector: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleDirections {
    pub stable: EigenDirection,
    pub unstable: EigenDirection,
}

/// The Jacobian at an equilibrium is `[[0, 1], [a, b]]`, so `(1, lambda)`
/// is an eigenvector for each eigenvalue.
pub fn saddle_directions(p: &SystemParams, which: Equilibrium) -> Result<SaddleDirections, FlowError> {
    let (spectrum, class) = classify(p, which);
    if class != StabilityClass::Saddle {
        return Err(FlowError::NotASaddle { which, theta: p.theta(), class });
    }
    let dir = |lambda: f64| {
        let n = 1f64.hypot(lambda);
        EigenDirection { eigenvalue: lambda, vector: State::new(1.0 / n, lambda / n) }
    };
    Ok(SaddleDirections { stable: dir(spectrum.lambda1.re), unstable: dir(spectrum.lambda2.re) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifoldBranch {
    pub saddle: Equilibrium,
    pub location: State,
    pub kind: BranchKind,
    pub side: Side,
    pub seed_offset: f64,
    pub direction: EigenDirection,
    pub seed: State,
    /// Forward in time for unstable branches, backward for stable ones.
    pub path: Trajectory,
}

pub fn manifold_branch(
    p: &SystemParams,
    which: Equilibrium,
    kind: BranchKind,
    side: Side,
    seed_offset: f64,
) -> Result<ManifoldBranch, FlowError> {
    let cfg = BranchConfig { seed_offset, ..BranchConfig::default() };
    manifold_branch_with(p, which, kind, side, &cfg)
}

pub fn manifold_branch_with(
    p: &SystemParams,
    which: Equilibrium,
    kind: BranchKind,
    side: Side,
    cfg: &BranchConfig,
) -> Result<ManifoldBranch, FlowError> {
    if !(MIN_SEED_OFFSET..=MAX_SEED_OFFSET).contains(&cfg.seed_offset) {
        return Err(FlowError::SeedOffset(cfg.seed_offset));
    }
    let dirs = saddle_directions(p, which)?;
    let (direction, t_end) = match kind {
        BranchKind::Unstable => (dirs.unstable, cfg.t_budget),
        BranchKind::Stable => (dirs.stable, -cfg.t_budget),
    };
    let location = which.location(p);
    let seed = location + (side.sign() * cfg.seed_offset) * direction.vector;
    let integrator = Integrator::new(cfg.tol)?;
    let path = match &cfg.section {
        Some(sec) => integrator.run_to_section(p, seed, t_end, sec, 1)?,
        None => integrator.run(p, seed, t_end)?,
    };
    Ok(ManifoldBranch { saddle: which, location, kind, side, seed_offset: cfg.seed_offset, direction, seed, path })
}
