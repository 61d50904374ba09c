//! Dormand–Prince 5(4) with PI step-size control and section events.

use serde::Serialize;

use super::FlowError;
use crate::model::{vector_field, State, SystemParams};

pub const MIN_TOL: f64 = 1e-12;
pub const MAX_TOL: f64 = 1e-3;
pub const MAX_Y: f64 = 100.0;

// the field is autonomous, so the nodes c_i are not needed
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// fifth-order weights minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub state: State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Reached `t_end`.
    Completed,
    /// Left the box `|x| <= 10 max(|d|,|e|,1)`, `|y| <= 100`.
    Escaped,
    /// Recorded the requested number of section crossings.
    SectionCrossed,
    /// Ran out of steps before `t_end`.
    StepBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of(v: f64) -> Option<Sign> {
        if v > 0.0 {
            Some(Sign::Positive)
        } else if v < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

/// A coordinate line, optionally restricted to one half and one crossing
/// direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Section {
    /// `X` is the vertical line `x = level`, `Y` the horizontal line `y = level`.
    pub axis: Axis,
    pub level: f64,
    /// Sign required of the other coordinate at the crossing.
    pub half: Option<Sign>,
    /// Sign required of the change in the crossed coordinate, in integration order.
    pub heading: Option<Sign>,
}

impl Section {
    pub fn vertical(x: f64, half: Option<Sign>) -> Self {
        Self { axis: Axis::X, level: x, half, heading: None }
    }

    /// `{y = 0, x > 0}` crossed downward.
    pub fn positive_x_axis() -> Self {
        Self { axis: Axis::Y, level: 0.0, half: Some(Sign::Positive), heading: Some(Sign::Negative) }
    }

    pub fn value(&self, s: State) -> f64 {
        match self.axis {
            Axis::X => s.x - self.level,
            Axis::Y => s.y - self.level,
        }
    }

    fn other(&self, s: State) -> f64 {
        match self.axis {
            Axis::X => s.y,
            Axis::Y => s.x,
        }
    }

    /// Whether the segment from `g0` to `g1` crosses in an admissible direction.
    fn brackets(&self, g0: f64, g1: f64) -> bool {
        let crossed = (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
        crossed && self.heading.is_none_or(|h| Sign::of(g1 - g0) == Some(h))
    }

    fn admits(&self, s: State) -> bool {
        self.half.is_none_or(|h| Sign::of(self.other(s)) == Some(h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub params: SystemParams,
    pub direction: Direction,
    pub tol: f64,
    pub samples: Vec<Sample>,
    /// Admissible section crossings, if a section was given.
    pub crossings: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn first(&self) -> Sample {
        self.samples[0]
    }

    pub fn last(&self) -> Sample {
        *self.samples.last().expect("a trajectory holds its initial sample")
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Elapsed time, positive in either direction.
    pub fn duration(&self) -> f64 {
        (self.last().t - self.first().t).abs()
    }

    pub fn first_crossing(&self) -> Option<Sample> {
        self.crossings.first().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integrator {
    pub tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

struct Step {
    state: State,
    error: State,
    f_new: State,
}

fn dopri_step(p: &SystemParams, s: State, f0: State, h: f64) -> Step {
    let f = |s: State| vector_field(p, s);
    let k1 = f0;
    let k2 = f(s + (h * A21) * k1);
    let k3 = f(s + h * (A31 * k1 + A32 * k2));
    let k4 = f(s + h * (A41 * k1 + A42 * k2 + A43 * k3));
    let k5 = f(s + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    let k6 = f(s + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    let state = s + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
    let k7 = f(state);
    let error = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    Step { state, error, f_new: k7 }
}

impl Integrator {
    pub fn new(tol: f64) -> Result<Self, FlowError> {
        if !(MIN_TOL..=MAX_TOL).contains(&tol) {
            return Err(FlowError::Tolerance(tol));
        }
        Ok(Self { tol, max_step: 0.5, max_steps: 2_000_000 })
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn with_max_steps(mut self, n: usize) -> Self {
        self.max_steps = n;
        self
    }

    /// Scaled local error; accepted when `<= 1`.
    fn error_norm(&self, y0: State, y1: State, err: State) -> f64 {
        let scale = |a: f64, b: f64| self.tol * (1.0 + a.abs().max(b.abs()));
        let ex = err.x.abs() / scale(y0.x, y1.x);
        let ey = err.y.abs() / scale(y0.y, y1.y);
        if ex.is_nan() || ey.is_nan() {
            f64::INFINITY
        } else {
            ex.max(ey)
        }
    }

    pub fn run(&self, p: &SystemParams, s0: State, t_end: f64) -> Result<Trajectory, FlowError> {
        self.run_inner(p, s0, t_end, None)
    }

    /// Integrates until `count` admissible crossings of `section` have been
    /// recorded, or another termination reason applies.
    pub fn run_to_section(
        &self,
        p: &SystemParams,
        s0: State,
        t_end: f64,
        section: &Section,
        count: usize,
    ) -> Result<Trajectory, FlowError> {
        self.run_inner(p, s0, t_end, Some((section, count)))
    }

    fn run_inner(
        &self,
        p: &SystemParams,
        s0: State,
        t_end: f64,
        section: Option<(&Section, usize)>,
    ) -> Result<Trajectory, FlowError> {
        if t_end == 0.0 || !t_end.is_finite() {
            return Err(FlowError::Time(t_end));
        }
        if !s0.is_finite() {
            return Err(FlowError::InitialState(s0));
        }
        let sign = t_end.signum();
        let box_x = p.escape_box_x();
        let outside = |s: State| s.x.abs() > box_x || s.y.abs() > MAX_Y;

        let mut traj = Trajectory {
            params: *p,
            direction: if sign > 0.0 { Direction::Forward } else { Direction::Backward },
            tol: self.tol,
            samples: vec![Sample { t: 0.0, state: s0 }],
            crossings: Vec::new(),
            termination: Termination::Completed,
        };
        if outside(s0) {
            traj.termination = Termination::Escaped;
            return Ok(traj);
        }

        let mut t = 0.0;
        let mut s = s0;
        let mut f0 = vector_field(p, s);
        let mut h = self.initial_step(s, f0, t_end.abs());
        let mut err_old: f64 = 1e-4;
        let mut rejected = false;

        for _ in 0..self.max_steps {
            let remaining = (t_end - t).abs();
            if remaining <= 0.0 {
                return Ok(traj);
            }
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(FlowError::StepUnderflow { t, partial: Box::new(traj) });
            }

            let step = dopri_step(p, s, f0, sign * h);
            let err = self.error_norm(s, step.state, step.error);
            if err > 1.0 {
                let fac = (err.powf(EXPO) / SAFETY).min(1.0 / FAC_MIN);
                h /= if rejected { fac.max(2.0) } else { fac };
                rejected = true;
                continue;
            }

            let t_new = if last { t_end } else { t + sign * h };
            if let Some((sec, count)) = section {
                let (g0, g1) = (sec.value(s), sec.value(step.state));
                if sec.brackets(g0, g1) {
                    let hit = refine_crossing(p, sec, s, f0, sign * (t_new - t).abs(), g0, g1);
                    if sec.admits(hit.1) {
                        traj.crossings.push(Sample { t: t + hit.0, state: hit.1 });
                    }
                }
                if count > 0 && traj.crossings.len() >= count {
                    let c = *traj.crossings.last().expect("just pushed");
                    traj.samples.push(c);
                    traj.termination = Termination::SectionCrossed;
                    return Ok(traj);
                }
            }

            t = t_new;
            s = step.state;
            f0 = step.f_new;
            traj.samples.push(Sample { t, state: s });
            if outside(s) {
                traj.termination = Termination::Escaped;
                return Ok(traj);
            }
            if last {
                return Ok(traj);
            }

            // PI controller
            let err = err.max(1e-10);
            let fac = (err.powf(EXPO) / err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = (h / fac).min(self.max_step);
            if rejected {
                h_new = h_new.min(h);
            }
            err_old = err.max(1e-4);
            rejected = false;
            h = h_new;
        }
        traj.termination = Termination::StepBudget;
        Ok(traj)
    }

    fn initial_step(&self, s: State, f: State, span: f64) -> f64 {
        let sk = |v: f64| self.tol * (1.0 + v.abs());
        let d0 = (s.x / sk(s.x)).abs().max((s.y / sk(s.y)).abs());
        let d1 = (f.x / sk(s.x)).abs().max((f.y / sk(s.y)).abs());
        let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h.min(self.max_step).min(span)
    }
}

/// Time offset and state of the crossing inside one accepted step,
/// by Illinois iteration on single Runge–Kutta steps of varying length.
fn refine_crossing(
    p: &SystemParams,
    sec: &Section,
    s: State,
    f0: State,
    h: f64,
    g0: f64,
    g1: f64,
) -> (f64, State) {
    let at = |tau: f64| dopri_step(p, s, f0, tau).state;
    let (mut a, mut ga) = (0.0, g0);
    let (mut b, mut gb) = (h, g1);
    let mut side = 0;
    for _ in 0..60 {
        if gb == 0.0 {
            break;
        }
        let c = (a * gb - b * ga) / (gb - ga);
        let gc = sec.value(at(c));
        if gc == 0.0 || (b - a).abs() < 1e-15 * h.abs().max(1.0) {
            a = c;
            ga = gc;
            b = c;
            gb = gc;
            break;
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
        if gc.abs() < 1e-15 {
            break;
        }
    }
    let tau = if gb.abs() <= ga.abs() { b } else { a };
    let mut state = at(tau);
    // place the point exactly on the line
    match sec.axis {
        Axis::X => state.x = sec.level,
        Axis::Y => state.y = sec.level,
    }
    (tau, state)
}

/// Admissible crossings of `section` between consecutive samples of a
/// finished trajectory, located as accurately as during integration.
pub(crate) fn crossings_of(traj: &Trajectory, section: &Section) -> Vec<Sample> {
    let p = &traj.params;
    traj.samples
        .windows(2)
        .filter_map(|w| {
            let (a, b) = (w[0], w[1]);
            let (g0, g1) = (section.value(a.state), section.value(b.state));
            if !section.brackets(g0, g1) {
                return None;
            }
            let f0 = vector_field(p, a.state);
            let (tau, state) = refine_crossing(p, section, a.state, f0, b.t - a.t, g0, g1);
            section.admits(state).then_some(Sample { t: a.t + tau, state })
        })
        .collect()
}

pub fn integrate(p: &SystemParams, s0: State, t_end: f64, tol: f64) -> Result<Trajectory, FlowError> {
    Integrator::new(tol)?.run(p, s0, t_end)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Equilibrium, SystemParams};

    fn params(d: f64, e: f64, theta: f64) -> SystemParams {
        SystemParams::new(d, e, theta).unwrap()
    }

    #[test]
    fn tolerance_and_time_are_checked() {
        let p = params(0.5, 2.0, 0.03);
        assert!(matches!(integrate(&p, State::new(0.1, 0.0), 1.0, 1e-2), Err(FlowError::Tolerance(_))));
        assert!(matches!(integrate(&p, State::new(0.1, 0.0), 1.0, 1e-13), Err(FlowError::Tolerance(_))));
        assert!(matches!(integrate(&p, State::new(0.1, 0.0), 0.0, 1e-9), Err(FlowError::Time(_))));
    }

    #[test]
    fn equilibrium_stays_put() {
        let p = params(0.5, 2.0, 0.03);
        for eq in Equilibrium::ALL {
            let s0 = eq.location(&p);
            let traj = integrate(&p, s0, 100.0, 1e-9).unwrap();
            assert_eq!(traj.termination, Termination::Completed);
            assert!((traj.last().t - 100.0).abs() < 1e-12);
            assert!(traj.samples.iter().all(|s| (s.state - s0).norm() < 1e-9));
        }
    }

    #[test]
    fn times_are_strictly_monotone() {
        let p = params(0.5, 2.0, 0.03);
        let fwd = integrate(&p, State::new(0.1, 0.0), 20.0, 1e-9).unwrap();
        assert!(fwd.samples.windows(2).all(|w| w[1].t > w[0].t));
        let bwd = integrate(&p, State::new(0.1, 0.0), -5.0, 1e-9).unwrap();
        assert_eq!(bwd.direction, Direction::Backward);
        assert!(bwd.samples.windows(2).all(|w| w[1].t < w[0].t));
    }

    #[test]
    fn harmonic_limit_matches_closed_form() {
        // near the origin with theta = 0 the flow is a rotation to leading order
        let p = params(-100.0, 100.0, 0.0);
        let r = 1e-4;
        let traj = integrate(&p, State::new(r, 0.0), 1.0, 1e-12).unwrap();
        let end = traj.last().state;
        assert!((end.x - r * 1f64.cos()).abs() < 1e-11);
        assert!((end.y + r * 1f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn escapes_are_flagged() {
        // with de < 0 the cubic pushes outward
        let p = params(-1.0, 2.0, 0.03);
        let traj = integrate(&p, State::new(5.0, 0.0), 50.0, 1e-9).unwrap();
        assert_eq!(traj.termination, Termination::Escaped);
        let end = traj.last().state;
        assert!(end.x.abs() > p.escape_box_x() || end.y.abs() > MAX_Y);
    }

    #[test]
    fn crossings_land_on_the_section() {
        let p = params(0.5, 2.0, 0.03);
        let sec = Section::positive_x_axis();
        let traj = Integrator::new(1e-10).unwrap().run_to_section(&p, State::new(0.1, 0.0), 100.0, &sec, 3).unwrap();
        assert_eq!(traj.termination, Termination::SectionCrossed);
        assert_eq!(traj.crossings.len(), 3);
        for c in &traj.crossings {
            assert_eq!(c.state.y, 0.0);
            assert!(c.state.x > 0.0);
        }
        // each return takes roughly one rotation
        let dt = traj.crossings[1].t - traj.crossings[0].t;
        assert!((dt - std::f64::consts::TAU).abs() < 0.5, "return time {dt}");
        // the crossing state agrees with a fresh run to the crossing time
        let c = traj.crossings[0];
        let check = integrate(&p, State::new(0.1, 0.0), c.t, 1e-12).unwrap().last().state;
        assert!((check - c.state).norm() < 1e-8);
    }

    #[test]
    fn half_plane_filter_skips_wrong_side() {
        let p = params(0.5, 2.0, 0.03);
        let upper = Section::vertical(0.0, Some(Sign::Positive));
        let traj = Integrator::new(1e-10).unwrap().run_to_section(&p, State::new(0.1, 0.0), 50.0, &upper, 1).unwrap();
        // rotating clockwise from the right, the first pass is below and skipped
        assert!(traj.first_crossing().unwrap().state.y > 0.0);
        assert!(traj.first_crossing().unwrap().t > 3.0);
    }

    #[test]
    fn step_budget_is_reported() {
        let p = params(0.5, 2.0, 0.03);
        let traj =
            Integrator::new(1e-9).unwrap().with_max_steps(5).run(&p, State::new(0.1, 0.0), 100.0).unwrap();
        assert_eq!(traj.termination, Termination::StepBudget);
        assert_eq!(traj.len(), 6);
    }
}
