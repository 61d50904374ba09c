//! Numerical flow: integration, saddle branches, cycles and connection gaps.

mod cycle;
mod gap;
mod integrator;
mod manifold;
mod omega;

use thiserror::Error;

use crate::model::{Equilibrium, ParamError, StabilityClass, State};

pub use cycle::{detect_limit_cycle, find_limit_cycle, return_map, CycleConfig, LimitCycle, NoCycle};
pub use gap::{
    bisect_bifurcation, bisect_bifurcation_with, connection_gap, connection_gap_with, BifurcationBracket,
    ConnectionGap, GapConfig, GapKind, HalfPlane,
};
pub use integrator::{
    integrate, Axis, Direction, Integrator, Sample, Section, Sign, Termination, Trajectory, MAX_TOL, MAX_Y,
    MIN_TOL,
};
pub use manifold::{
    manifold_branch, manifold_branch_with, saddle_directions, BranchConfig, BranchKind, EigenDirection,
    ManifoldBranch, SaddleDirections, Side, DEFAULT_SEED_OFFSET, MAX_SEED_OFFSET, MIN_SEED_OFFSET,
};
pub use omega::{omega_limit_estimate, OmegaLimit, EQUILIBRIUM_RADIUS, TAIL_FRACTION};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("tolerance {0} outside [1e-12, 1e-3]")]
    Tolerance(f64),
    #[error("integration time must be finite and nonzero, got {0}")]
    Time(f64),
    #[error("initial state {0} is not finite")]
    InitialState(State),
    #[error("stiff/singular segment: step size underflow at t = {t}")]
    StepUnderflow { t: f64, partial: Box<Trajectory> },
    #[error("{which} is {class} at theta = {theta}, not a saddle")]
    NotASaddle { which: Equilibrium, theta: f64, class: StabilityClass },
    #[error("seed offset {0} outside [1e-7, 1e-4]")]
    SeedOffset(f64),
    #[error("no crossing: {0}")]
    NoCrossing(String),
    #[error("invalid gap kind: {0}")]
    InvalidKind(String),
    #[error("invalid bracket: {0}")]
    InvalidBracket(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}
