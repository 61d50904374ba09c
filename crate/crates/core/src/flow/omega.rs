//! Coarse classification of where a computed orbit ends up.

use serde::Serialize;

use super::integrator::{crossings_of, Direction, Section, Sign, Termination, Trajectory};
use crate::model::{Equilibrium, State};

/// Distance from an equilibrium that counts as arrived.
pub const EQUILIBRIUM_RADIUS: f64 = 1e-6;
/// Fraction of trailing samples that must stay near the equilibrium.
pub const TAIL_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum OmegaLimit {
    Equilibrium { which: Equilibrium, location: State },
    /// Returns to `{y = 0, x > 0}` converge to a nonzero point.
    Cycle { section_point: State },
    Escaped,
    Undetermined,
}

/// Limit in the direction of integration (the alpha limit for backward runs).
pub fn omega_limit_estimate(traj: &Trajectory) -> OmegaLimit {
    if traj.termination == Termination::Escaped {
        return OmegaLimit::Escaped;
    }
    let p = &traj.params;
    let n = traj.samples.len();
    let tail = &traj.samples[n - ((n as f64 * TAIL_FRACTION).ceil() as usize).clamp(1, n)..];
    for which in Equilibrium::ALL {
        let at = which.location(p);
        if tail.iter().all(|s| (s.state - at).norm() < EQUILIBRIUM_RADIUS) {
            return OmegaLimit::Equilibrium { which, location: at };
        }
    }

    let mut section = Section::positive_x_axis();
    if traj.direction == Direction::Backward {
        section.heading = Some(Sign::Positive);
    }
    let xs: Vec<f64> = crossings_of(traj, &section).iter().map(|c| c.state.x).collect();
    if xs.len() >= 4 {
        let k = xs.len();
        let (x0, x1, x2) = (xs[k - 3], xs[k - 2], xs[k - 1]);
        let (d1, d2) = (x1 - x0, x2 - x1);
        let settled = d2.abs() <= 1e-8 * x2;
        let converging = d2.abs() <= 1e-3 * x2 && d2.abs() < d1.abs() && d1 * d2 >= 0.0;
        if settled || converging {
            // geometric extrapolation of the returns; a focus gives a limit near 0
            let limit = if settled {
                x2
            } else {
                let r = d2 / d1;
                x2 + d2 * r / (1.0 - r)
            };
            if limit > 0.5 * x2 {
                return OmegaLimit::Cycle { section_point: State::new(limit, 0.0) };
            }
        }
    }
    OmegaLimit::Undetermined
}
