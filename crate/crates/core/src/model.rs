//! The parametrized vector field and its equilibria.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conley::GradedIndex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter {name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
    #[error("d and e must be nonzero (d = {d}, e = {e})")]
    ZeroProduct { d: f64, e: f64 },
    #[error("|d| <= |e| is required (d = {d}, e = {e})")]
    Ordering { d: f64, e: f64 },
    #[error("d = e gives only two distinct equilibria (d = e = {0})")]
    Coincident(f64),
    #[error("unsupported: alpha is fixed at 1 (got {0})")]
    UnsupportedAlpha(f64),
}

/// One member of the family, the triple `(d, e, theta)` with damping `alpha = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    d: f64,
    e: f64,
    theta: f64,
    alpha: f64,
}

impl SystemParams {
    pub fn new(d: f64, e: f64, theta: f64) -> Result<Self, ParamError> {
        Self::with_alpha(d, e, theta, 1.0)
    }

    pub fn with_alpha(d: f64, e: f64, theta: f64, alpha: f64) -> Result<Self, ParamError> {
        for (name, value) in [("d", d), ("e", e), ("theta", theta), ("alpha", alpha)] {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name, value });
            }
        }
        if alpha != 1.0 {
            return Err(ParamError::UnsupportedAlpha(alpha));
        }
        if d == 0.0 || e == 0.0 {
            return Err(ParamError::ZeroProduct { d, e });
        }
        if d == e {
            return Err(ParamError::Coincident(d));
        }
        if d.abs() > e.abs() {
            return Err(ParamError::Ordering { d, e });
        }
        Ok(Self { d, e, theta, alpha })
    }

    /// Same `(d, e)` at another theta.
    pub fn with_theta(&self, theta: f64) -> Result<Self, ParamError> {
        Self::new(self.d, self.e, theta)
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Half-width in x of the box trajectories are confined to.
    pub fn escape_box_x(&self) -> f64 {
        10.0 * self.d.abs().max(self.e.abs()).max(1.0)
    }
}

/// A point `(x, y)` of the phase plane, `y = dx/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for State {
    type Output = State;
    fn add(self, rhs: State) -> State {
        State::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, rhs: State) -> State {
        State::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<State> for f64 {
    type Output = State;
    fn mul(self, rhs: State) -> State {
        State::new(self * rhs.x, self * rhs.y)
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        State::new(-self.x, -self.y)
    }
}

pub type Matrix2 = [[f64; 2]; 2];

/// Right-hand side of the first-order system.
pub fn vector_field(p: &SystemParams, s: State) -> State {
    let State { x, y } = s;
    let restoring = x * (x + p.d) * (x + p.e) / (p.d * p.e);
    State::new(y, -(x * x - p.theta) * y - restoring)
}

pub fn jacobian(p: &SystemParams, s: State) -> Matrix2 {
    let State { x, y } = s;
    let (d, e) = (p.d, p.e);
    let dcubic = ((x + d) * (x + e) + x * (x + e) + x * (x + d)) / (d * e);
    [[0.0, 1.0], [-2.0 * x * y - dcubic, p.theta - x * x]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Equilibrium {
    E0,
    E1,
    E2,
}

impl Equilibrium {
    pub const ALL: [Equilibrium; 3] = [Equilibrium::E0, Equilibrium::E1, Equilibrium::E2];

    pub fn location(self, p: &SystemParams) -> State {
        match self {
            Equilibrium::E0 => State::new(0.0, 0.0),
            Equilibrium::E1 => State::new(-p.d, 0.0),
            Equilibrium::E2 => State::new(-p.e, 0.0),
        }
    }
}

impl fmt::Display for Equilibrium {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Equilibrium::E0 => "E0",
            Equilibrium::E1 => "E1",
            Equilibrium::E2 => "E2",
        };
        f.write_str(name)
    }
}

/// `[E0, E1, E2] = [(0,0), (-d,0), (-e,0)]`.
pub fn equilibria(p: &SystemParams) -> [State; 3] {
    Equilibrium::ALL.map(|eq| eq.location(p))
}

/// Eigenvalue pair; `lambda1` has the smaller real part (for a complex pair,
/// the negative imaginary part).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralData {
    pub lambda1: Complex64,
    pub lambda2: Complex64,
}

impl SpectralData {
    /// Roots of `lambda^2 - trace * lambda + det = 0` written as
    /// `(trace +- sqrt(disc)) / 2` with the discriminant passed explicitly.
    /// The real/complex split is an exact sign test on `disc`.
    fn from_trace_disc(trace: f64, disc: f64) -> Self {
        if disc >= 0.0 {
            let root = disc.sqrt();
            Self {
                lambda1: Complex64::new((trace - root) / 2.0, 0.0),
                lambda2: Complex64::new((trace + root) / 2.0, 0.0),
            }
        } else {
            let im = (-disc).sqrt() / 2.0;
            Self {
                lambda1: Complex64::new(trace / 2.0, -im),
                lambda2: Complex64::new(trace / 2.0, im),
            }
        }
    }

    pub fn is_real(&self) -> bool {
        self.lambda1.im == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateCondition {
    ThetaEqualsDSquared,
    ThetaEqualsESquared,
}

impl fmt::Display for DegenerateCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegenerateCondition::ThetaEqualsDSquared => f.write_str("theta = d^2"),
            DegenerateCondition::ThetaEqualsESquared => f.write_str("theta = e^2"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityClass {
    Sink,
    Source,
    Saddle,
    WeakSink,
    Degenerate(DegenerateCondition),
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityClass::Sink => f.write_str("sink"),
            StabilityClass::Source => f.write_str("source"),
            StabilityClass::Saddle => f.write_str("saddle"),
            StabilityClass::WeakSink => f.write_str("weak sink"),
            StabilityClass::Degenerate(c) => write!(f, "degenerate ({c})"),
        }
    }
}

/// Closed-form eigenvalues and stability class of one equilibrium.
pub fn classify(p: &SystemParams, which: Equilibrium) -> (SpectralData, StabilityClass) {
    let (d, e, theta) = (p.d, p.e, p.theta);
    match which {
        Equilibrium::E0 => {
            let spectrum = SpectralData::from_trace_disc(theta, theta * theta - 4.0);
            let class = if theta > 0.0 {
                StabilityClass::Source
            } else if theta < 0.0 {
                StabilityClass::Sink
            } else {
                StabilityClass::WeakSink
            };
            (spectrum, class)
        }
        Equilibrium::E1 => {
            let a = theta - d * d;
            let spectrum = SpectralData::from_trace_disc(a, a * a + 4.0 * (1.0 - d / e));
            let class = if a == 0.0 {
                StabilityClass::Degenerate(DegenerateCondition::ThetaEqualsDSquared)
            } else {
                StabilityClass::Saddle
            };
            (spectrum, class)
        }
        Equilibrium::E2 => {
            let a = theta - e * e;
            let spectrum = SpectralData::from_trace_disc(a, a * a + 4.0 * (1.0 - e / d));
            let class = if d.signum() != e.signum() {
                StabilityClass::Saddle
            } else if a < 0.0 {
                StabilityClass::Sink
            } else if a > 0.0 {
                StabilityClass::Source
            } else {
                StabilityClass::Degenerate(DegenerateCondition::ThetaEqualsESquared)
            };
            (spectrum, class)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("Lyapunov coefficient needs theta = 0 (got theta = {0})")]
pub struct NotHopfPoint(pub f64);

/// Quadratic and cubic Taylor coefficients of the system written as
/// `x' = y + sum mu[i][j] x^i y^j`, `y' = -x + sum nu[i][j] x^i y^j`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NormalFormCoefficients {
    pub mu: [[f64; 4]; 4],
    pub nu: [[f64; 4]; 4],
}

impl NormalFormCoefficients {
    /// First Lyapunov coefficient in Hubbard–West form.
    pub fn lyapunov(&self) -> f64 {
        let mu = |i: usize, j: usize| self.mu[i][j];
        let nu = |i: usize, j: usize| self.nu[i][j];
        3.0 * mu(3, 0) + mu(1, 2) + nu(2, 1) + 3.0 * nu(0, 3) - mu(2, 0) * mu(1, 1)
            + nu(1, 1) * nu(0, 2)
            - 2.0 * mu(0, 2) * nu(0, 2)
            - mu(0, 2) * mu(1, 1)
            + 2.0 * mu(2, 0) * nu(2, 0)
            + nu(1, 1) * nu(2, 0)
    }
}

/// Normal-form coefficients at the Hopf point and the Lyapunov coefficient.
///
/// At `theta = 0` the second equation expands to
/// `y' = -x - (d+e)/(de) x^2 - x^3/(de) - x^2 y`, so only `nu20`, `nu30`
/// and `nu21` are nonzero.
pub fn lyapunov_coefficient(
    p: &SystemParams,
) -> Result<(NormalFormCoefficients, f64), NotHopfPoint> {
    if p.theta != 0.0 {
        return Err(NotHopfPoint(p.theta));
    }
    let de = p.d * p.e;
    let mut coeffs = NormalFormCoefficients::default();
    coeffs.nu[2][0] = -(p.d + p.e) / de;
    coeffs.nu[3][0] = -1.0 / de;
    coeffs.nu[2][1] = -1.0;
    let l = coeffs.lyapunov();
    Ok((coeffs, l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MorseSetKind {
    Sink,
    Saddle,
    Source,
    StableCycle,
}

impl fmt::Display for MorseSetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MorseSetKind::Sink => "sink",
            MorseSetKind::Saddle => "saddle",
            MorseSetKind::Source => "source",
            MorseSetKind::StableCycle => "stable cycle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("non-hyperbolic: Conley index by continuation not assigned ({0})")]
pub struct NonHyperbolic(pub StabilityClass);

impl TryFrom<StabilityClass> for MorseSetKind {
    type Error = NonHyperbolic;

    fn try_from(class: StabilityClass) -> Result<Self, Self::Error> {
        match class {
            StabilityClass::Sink => Ok(MorseSetKind::Sink),
            StabilityClass::Saddle => Ok(MorseSetKind::Saddle),
            StabilityClass::Source => Ok(MorseSetKind::Source),
            other => Err(NonHyperbolic(other)),
        }
    }
}

/// Graded Z2 Conley index of a hyperbolic planar Morse set.
pub fn conley_index_of(kind: MorseSetKind) -> GradedIndex {
    match kind {
        MorseSetKind::Sink => GradedIndex::from_ranks([1, 0, 0]),
        MorseSetKind::Saddle => GradedIndex::from_ranks([0, 1, 0]),
        MorseSetKind::Source => GradedIndex::from_ranks([0, 0, 1]),
        MorseSetKind::StableCycle => GradedIndex::from_ranks([1, 1, 0]),
    }
}

pub fn conley_index_of_class(class: StabilityClass) -> Result<GradedIndex, NonHyperbolic> {
    MorseSetKind::try_from(class).map(conley_index_of)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub which: Equilibrium,
    pub location: State,
    pub spectrum: SpectralData,
    pub class: StabilityClass,
    /// `None` for non-hyperbolic classes.
    pub conley_index: Option<GradedIndex>,
}

pub fn equilibrium_report(p: &SystemParams, which: Equilibrium) -> EquilibriumReport {
    let (spectrum, class) = classify(p, which);
    EquilibriumReport {
        which,
        location: which.location(p),
        spectrum,
        class,
        conley_index: conley_index_of_class(class).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: f64, e: f64, theta: f64) -> SystemParams {
        SystemParams::new(d, e, theta).unwrap()
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(matches!(SystemParams::new(1.0, 1.0, 0.0), Err(ParamError::Coincident(_))));
        assert!(matches!(SystemParams::new(0.0, 1.0, 0.0), Err(ParamError::ZeroProduct { .. })));
        assert!(matches!(SystemParams::new(3.0, 1.0, 0.0), Err(ParamError::Ordering { .. })));
        assert!(matches!(
            SystemParams::with_alpha(0.5, 2.0, 0.0, 2.0),
            Err(ParamError::UnsupportedAlpha(_))
        ));
        assert!(matches!(
            SystemParams::new(0.5, 2.0, f64::NAN),
            Err(ParamError::NotFinite { name: "theta", .. })
        ));
        // d = -e satisfies |d| <= |e| and d != e
        assert!(SystemParams::new(1.0, -1.0, 0.0).is_ok());
    }

    #[test]
    fn vector_field_values() {
        let p = params(0.5, 2.0, 0.03);
        assert_eq!(vector_field(&p, State::new(0.0, 0.0)), State::new(0.0, 0.0));
        assert_eq!(vector_field(&p, State::new(-0.5, 0.0)).y, 0.0);
        let p0 = params(0.5, 2.0, 0.0);
        assert_eq!(vector_field(&p0, State::new(1.0, 1.0)), State::new(1.0, -5.5));
    }

    #[test]
    fn jacobian_at_origin_and_saddle() {
        let p = params(0.5, 2.0, 0.03);
        assert_eq!(jacobian(&p, State::new(0.0, 0.0)), [[0.0, 1.0], [-1.0, 0.03]]);
        let j = jacobian(&p, State::new(-0.5, 0.0));
        assert_eq!(j[0], [0.0, 1.0]);
        assert!((j[1][0] - 0.75).abs() < 1e-15);
        assert!((j[1][1] - (0.03 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn equilibria_locations() {
        let loc = equilibria(&params(0.5, 2.0, 0.0));
        assert_eq!(loc, [State::new(0.0, 0.0), State::new(-0.5, 0.0), State::new(-2.0, 0.0)]);
        let loc = equilibria(&params(-1.0, 2.0, 0.0));
        assert_eq!(loc[1], State::new(1.0, 0.0));
        let loc = equilibria(&params(1.0, -1.0, 0.0));
        assert_eq!(loc[1], State::new(-1.0, 0.0));
        assert_eq!(loc[2], State::new(1.0, 0.0));
    }

    #[test]
    fn classification_example_one() {
        let p = params(0.5, 2.0, 0.03);
        let (spec, class) = classify(&p, Equilibrium::E0);
        assert_eq!(class, StabilityClass::Source);
        let im = (4.0f64 - 0.0009).sqrt() / 2.0;
        assert_eq!(spec.lambda1, Complex64::new(0.015, -im));
        assert_eq!(spec.lambda2, Complex64::new(0.015, im));

        let (spec, class) = classify(&p, Equilibrium::E1);
        assert_eq!(class, StabilityClass::Saddle);
        // (-0.22 +- sqrt(0.0484 + 3)) / 2
        assert!((spec.lambda1.re - (-0.982_983_390_449_096_7)).abs() < 1e-12);
        assert!((spec.lambda2.re - 0.762_983_390_449_096_7).abs() < 1e-12);

        assert_eq!(classify(&p, Equilibrium::E2).1, StabilityClass::Sink);
        assert_eq!(classify(&params(0.5, 2.0, 0.0), Equilibrium::E0).1, StabilityClass::WeakSink);
    }

    #[test]
    fn degenerate_cases_are_values() {
        let (_, class) = classify(&params(0.5, 2.0, 0.25), Equilibrium::E1);
        assert_eq!(class, StabilityClass::Degenerate(DegenerateCondition::ThetaEqualsDSquared));
        let (_, class) = classify(&params(0.5, 2.0, 4.0), Equilibrium::E2);
        assert_eq!(class, StabilityClass::Degenerate(DegenerateCondition::ThetaEqualsESquared));
        // different signs: E2 stays a saddle at theta = e^2
        let (_, class) = classify(&params(-1.0, 2.0, 4.0), Equilibrium::E2);
        assert_eq!(class, StabilityClass::Saddle);
        let (_, class) = classify(&params(1.0, -1.0, 0.5), Equilibrium::E2);
        assert_eq!(class, StabilityClass::Saddle);
    }

    #[test]
    fn repeated_root_reported_real() {
        // theta = 2 makes the E0 discriminant exactly zero
        let (spec, class) = classify(&params(0.5, 2.0, 2.0), Equilibrium::E0);
        assert!(spec.is_real());
        assert_eq!(spec.lambda1, spec.lambda2);
        assert_eq!(class, StabilityClass::Source);
    }

    #[test]
    fn lyapunov_coefficient_is_minus_one() {
        for (d, e) in [(0.5, 2.0), (-1.0, 2.0), (1.0, -1.0), (0.3, -7.0)] {
            let (coeffs, l) = lyapunov_coefficient(&params(d, e, 0.0)).unwrap();
            assert_eq!(l, -1.0);
            assert_eq!(coeffs.nu[2][0], -(d + e) / (d * e));
            assert_eq!(coeffs.nu[3][0], -1.0 / (d * e));
            assert!(coeffs.mu.iter().flatten().all(|&m| m == 0.0));
        }
        assert!(lyapunov_coefficient(&params(0.5, 2.0, 0.1)).is_err());
    }

    #[test]
    fn table_of_conley_indices() {
        assert_eq!(conley_index_of(MorseSetKind::Saddle).ranks(), [0, 1, 0]);
        assert_eq!(conley_index_of(MorseSetKind::StableCycle).ranks(), [1, 1, 0]);
        assert_eq!(conley_index_of(MorseSetKind::Sink).ranks(), [1, 0, 0]);
        assert_eq!(conley_index_of(MorseSetKind::Source).ranks(), [0, 0, 1]);
        let err = conley_index_of_class(StabilityClass::WeakSink).unwrap_err();
        assert!(err.to_string().starts_with("non-hyperbolic"));
    }
}
