//! Limit cycles around the origin from the return map on `{y = 0, x > 0}`.

use serde::Serialize;
use thiserror::Error;

use super::integrator::{Integrator, Section, Termination, Trajectory};
use super::FlowError;
use crate::model::{classify, Equilibrium, StabilityClass, State, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleConfig {
    pub tol: f64,
    /// x coordinate of the starting point on the section.
    pub start: f64,
    /// Returns taken from `start` before the fixed-point search.
    pub warmup_returns: usize,
    /// Time allowed for one return.
    pub return_budget: f64,
    pub max_iterations: usize,
    /// Accepted `|P(x) - x|`.
    pub residual_tol: f64,
}

impl Default for CycleConfig {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            start: 0.01,
            warmup_returns: 20,
            return_budget: 200.0,
            max_iterations: 100,
            residual_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitCycle {
    pub section_point: State,
    pub period: f64,
    /// One revolution starting and ending on the section.
    pub orbit: Trajectory,
    /// `P(x) - x` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

impl LimitCycle {
    pub fn amplitude(&self) -> f64 {
        self.section_point.x
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoCycle {
    #[error("E0 is {0}, not a source")]
    NotSource(StabilityClass),
    #[error("the orbit through x = {0} does not return to the section")]
    NoReturn(f64),
    #[error("return map has no sign change beyond x = {0}")]
    NoBracket(f64),
    #[error("fixed-point search stopped with residual {residual} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// One return: `(P(x), return time, orbit)`, or `None` if the orbit escapes,
/// settles elsewhere or exceeds the budget.
pub fn return_map(
    p: &SystemParams,
    x: f64,
    cfg: &CycleConfig,
) -> Result<Option<(f64, f64, Trajectory)>, FlowError> {
    let traj = Integrator::new(cfg.tol)?.run_to_section(
        p,
        State::new(x, 0.0),
        cfg.return_budget,
        &Section::positive_x_axis(),
        1,
    )?;
    if traj.termination != Termination::SectionCrossed {
        return Ok(None);
    }
    let c = traj.crossings[0];
    Ok(Some((c.state.x, c.t, traj)))
}

pub fn detect_limit_cycle(p: &SystemParams) -> Option<LimitCycle> {
    find_limit_cycle(p, &CycleConfig::default()).ok()
}

/// Finds the cycle reached from `cfg.start`: a forward run of
/// `warmup_returns` returns, then a bracketed secant (Illinois) solve of
/// `P(x) = x`.
pub fn find_limit_cycle(p: &SystemParams, cfg: &CycleConfig) -> Result<LimitCycle, NoCycle> {
    let (_, class) = classify(p, Equilibrium::E0);
    if class != StabilityClass::Source {
        return Err(NoCycle::NotSource(class));
    }
    let g = |x: f64| -> Result<Option<f64>, NoCycle> { Ok(return_map(p, x, cfg)?.map(|(px, _, _)| px - x)) };

    // warm-up along the actual orbit
    let mut x = cfg.start;
    let mut step = 0.0;
    for _ in 0..cfg.warmup_returns {
        match return_map(p, x, cfg)? {
            Some((px, _, _)) => {
                step = px - x;
                x = px;
            }
            None => return Err(NoCycle::NoReturn(x)),
        }
    }
    let gx = match g(x)? {
        Some(v) => v,
        None => return Err(NoCycle::NoReturn(x)),
    };
    if gx == 0.0 {
        return finish(p, x, cfg, 0);
    }

    // march away from x in the direction the orbit is moving until g changes sign
    let heading = gx.signum();
    let mut near = (x, gx);
    let mut stride = (4.0 * step.abs()).max(1e-6 * x);
    let mut far = None;
    for _ in 0..cfg.max_iterations {
        let cand = near.0 + heading * stride;
        if cand <= 0.0 {
            stride /= 2.0;
            continue;
        }
        match g(cand)? {
            Some(v) if v.signum() != heading => {
                far = Some((cand, v));
                break;
            }
            Some(v) => {
                near = (cand, v);
                stride *= 2.0;
            }
            None => {
                stride /= 2.0;
                if stride < 1e-12 * near.0 {
                    break;
                }
            }
        }
    }
    let Some(far) = far else {
        return Err(NoCycle::NoBracket(near.0));
    };
    if far.1 == 0.0 {
        return finish(p, far.0, cfg, 0);
    }

    let (mut a, mut ga) = near;
    let (mut b, mut gb) = far;
    let mut side = 0;
    for it in 1..=cfg.max_iterations {
        let c = (a * gb - b * ga) / (gb - ga);
        let Some(gc) = g(c)? else {
            return Err(NoCycle::NoReturn(c));
        };
        if gc.abs() <= cfg.residual_tol || (b - a).abs() <= 1e-13 * c.abs() {
            return finish(p, c, cfg, it);
        }
        if gc.signum() == gb.signum() {
            b = c;
            gb = gc;
            if side == -1 {
                ga /= 2.0;
            }
            side = -1;
        } else {
            a = b;
            ga = gb;
            b = c;
            gb = gc;
            side = 1;
        }
    }
    let residual = ga.abs().min(gb.abs());
    Err(NoCycle::NotConverged { residual, iterations: cfg.max_iterations })
}

fn finish(p: &SystemParams, x: f64, cfg: &CycleConfig, iterations: usize) -> Result<LimitCycle, NoCycle> {
    let Some((px, period, orbit)) = return_map(p, x, cfg)? else {
        return Err(NoCycle::NoReturn(x));
    };
    Ok(LimitCycle { section_point: State::new(x, 0.0), period, orbit, residual: px - x, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: f64, e: f64, theta: f64) -> SystemParams {
        SystemParams::new(d, e, theta).unwrap()
    }

    #[test]
    fn cycle_before_the_homoclinic_orbit() {
        let lc = detect_limit_cycle(&params(0.5, 2.0, 0.02)).expect("cycle");
        assert!(lc.residual.abs() < 1e-9);
        assert!(lc.period > 0.0);
        assert!(lc.amplitude() > 0.0 && lc.amplitude() < 2.0);
        let end = lc.orbit.last().state;
        assert!((end - lc.section_point).norm() < 1e-9);
    }

    #[test]
    fn no_cycle_after_the_homoclinic_orbit() {
        let err = find_limit_cycle(&params(0.5, 2.0, 0.1), &CycleConfig::default()).unwrap_err();
        assert!(matches!(err, NoCycle::NoReturn(_) | NoCycle::NoBracket(_)), "{err}");
    }

    #[test]
    fn sink_origin_has_no_cycle() {
        let err = find_limit_cycle(&params(0.5, 2.0, -0.1), &CycleConfig::default()).unwrap_err();
        assert_eq!(err, NoCycle::NotSource(StabilityClass::Sink));
        assert!(detect_limit_cycle(&params(0.5, 2.0, 0.0)).is_none());
    }

    #[test]
    fn small_cycle_matches_weakly_nonlinear_amplitude() {
        // averaging gives r = 2 sqrt(theta) for x'' - (theta - x^2) x' + x = 0
        let theta = 1e-3;
        let lc = detect_limit_cycle(&params(-100.0, 100.0, theta)).expect("cycle");
        let predicted = 2.0 * theta.sqrt();
        assert!((lc.amplitude() / predicted - 1.0).abs() < 0.01, "{}", lc.amplitude());
        assert!((lc.period - std::f64::consts::TAU).abs() < 0.01);
    }
}
