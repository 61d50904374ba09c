use proptest::prelude::*;
use vdp_conley::flow::{
    bisect_bifurcation, connection_gap, integrate, manifold_branch, manifold_branch_with, omega_limit_estimate,
    BranchConfig, BranchKind, GapKind, HalfPlane, OmegaLimit, Section, Side, Sign, Termination,
};
use vdp_conley::model::{Equilibrium, State, SystemParams};

fn params(d: f64, e: f64, theta: f64) -> SystemParams {
    SystemParams::new(d, e, theta).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_then_backward_returns_to_start(
        x in -0.4f64..0.4,
        y in -0.4f64..0.4,
        theta in -0.2f64..0.2,
        t in 0.5f64..5.0,
    ) {
        let p = params(0.5, 2.0, theta);
        let tol = 1e-10;
        let s0 = State::new(x, y);
        let fwd = integrate(&p, s0, t, tol).unwrap();
        prop_assume!(fwd.termination == Termination::Completed);
        let back = integrate(&p, fwd.last().state, -t, tol).unwrap();
        // local errors grow at most like e^t near the saddle
        let bound = 100.0 * tol * t.exp();
        prop_assert!((back.last().state - s0).norm() <= bound, "{} > {bound}", (back.last().state - s0).norm());
    }

    #[test]
    fn area_contracts_where_the_trace_is_negative(
        x in -0.3f64..0.3,
        y in -0.3f64..0.3,
        theta in -0.5f64..-0.05,
    ) {
        // trace of the Jacobian is theta - x^2 < 0 everywhere for theta < 0
        let p = params(0.5, 2.0, theta);
        let (t, h, tol) = (2.0, 1e-5, 1e-12);
        let s0 = State::new(x, y);
        let a = integrate(&p, s0, t, tol).unwrap();
        let bx = integrate(&p, State::new(x + h, y), t, tol).unwrap().last().state - a.last().state;
        let by = integrate(&p, State::new(x, y + h), t, tol).unwrap().last().state - a.last().state;
        let ratio = (bx.x * by.y - bx.y * by.x) / (h * h);
        // Liouville: ratio = exp(int (theta - x^2) dt), by the trapezoid rule on the samples
        let integral: f64 = a.samples.windows(2).map(|w| {
            let f = |s: State| theta - s.x * s.x;
            0.5 * (f(w[0].state) + f(w[1].state)) * (w[1].t - w[0].t)
        }).sum();
        let expected = integral.exp();
        prop_assert!(ratio < 1.0);
        prop_assert!((ratio / expected - 1.0).abs() < 0.1, "{ratio} vs {expected}");
    }
}

#[test]
fn halving_tolerance_halves_the_error() {
    let p = params(0.5, 2.0, 0.03);
    let s0 = State::new(0.1, 0.0);
    let t = 20.0;
    let reference = integrate(&p, s0, t, 1e-12).unwrap().last().state;
    let err = |tol: f64| (integrate(&p, s0, t, tol).unwrap().last().state - reference).norm();
    let tols: Vec<f64> = (0..7).map(|k| 1e-6 / 2f64.powi(k)).collect();
    let errs: Vec<f64> = tols.iter().map(|&t| err(t)).collect();
    for w in errs.windows(2) {
        // error proportional to tol, with 10% slack per halving
        assert!(w[1] <= 0.55 * w[0], "{errs:?}");
    }
    assert!(errs[6] <= errs[0] / 64.0 * 1.2, "{errs:?}");
}

#[test]
fn forward_orbit_from_near_origin_settles_on_a_closed_orbit() {
    let p = params(0.5, 2.0, 0.03);
    let traj = integrate(&p, State::new(0.01, 0.0), 1500.0, 1e-10).unwrap();
    assert!(matches!(omega_limit_estimate(&traj), OmegaLimit::Cycle { .. }));
}

#[test]
fn unstable_branch_winds_onto_the_cycle_before_the_loop() {
    let p = params(0.5, 2.0, 0.02);
    let cfg = BranchConfig { t_budget: 1500.0, ..Default::default() };
    let b = manifold_branch_with(&p, Equilibrium::E1, BranchKind::Unstable, Side::Plus, &cfg).unwrap();
    assert!(matches!(omega_limit_estimate(&b.path), OmegaLimit::Cycle { .. }));
}

#[test]
fn unstable_branch_reaches_the_sink_after_the_loop() {
    let p = params(0.5, 2.0, 0.1);
    for side in [Side::Plus, Side::Minus] {
        let b = manifold_branch(&p, Equilibrium::E1, BranchKind::Unstable, side, 1e-6).unwrap();
        assert_eq!(
            omega_limit_estimate(&b.path),
            OmegaLimit::Equilibrium { which: Equilibrium::E2, location: State::new(-2.0, 0.0) },
            "{side:?}"
        );
    }
}

#[test]
fn halving_the_seed_offset_moves_the_crossing_by_less_than_the_offset() {
    let p = params(0.5, 2.0, 0.02);
    let section = Section::vertical(0.0, Some(Sign::Negative));
    let crossing = |off: f64| {
        let cfg = BranchConfig { seed_offset: off, tol: 1e-12, t_budget: 200.0, section: Some(section) };
        manifold_branch_with(&p, Equilibrium::E1, BranchKind::Unstable, Side::Plus, &cfg)
            .unwrap()
            .path
            .first_crossing()
            .unwrap()
            .state
    };
    for off in [1e-4, 1e-5, 1e-6] {
        let shift = (crossing(off) - crossing(off / 2.0)).norm();
        assert!(shift <= off, "offset {off}: shift {shift}");
    }
}

#[test]
fn gap_is_continuous_inside_the_bracket() {
    let kind = GapKind::Homoclinic { saddle: Equilibrium::E1 };
    let g = |theta: f64| connection_gap(&params(0.5, 2.0, theta), kind).unwrap().value;
    let theta = 0.03;
    let base = g(theta);
    let mut previous = f64::INFINITY;
    for delta in [1e-2, 1e-3, 1e-4, 1e-5] {
        let jump = (g(theta + delta) - base).abs();
        assert!(jump < previous, "delta {delta}: {jump}");
        assert!(jump < 2.0 * delta, "delta {delta}: {jump}");
        previous = jump;
    }
}

#[test]
fn all_four_brackets_contain_a_sign_change() {
    let hom = GapKind::Homoclinic { saddle: Equilibrium::E1 };
    let cases = [
        (0.5, 2.0, 0.02, 0.04, hom),
        (-1.0, 2.0, -0.2, -0.05, GapKind::heteroclinic(-1.0, 2.0, HalfPlane::Upper)),
        (-1.0, 2.0, 0.1, 0.2, hom),
        (-1.0, 2.0, 1.1, 1.2, GapKind::heteroclinic(-1.0, 2.0, HalfPlane::Lower)),
    ];
    for (d, e, lo, hi, kind) in cases {
        let a = connection_gap(&params(d, e, lo), kind).unwrap().value;
        let b = connection_gap(&params(d, e, hi), kind).unwrap().value;
        assert!(a * b < 0.0, "{kind} on ({lo}, {hi}): {a} {b}");
    }
}

#[test]
fn refined_theta_is_stable_under_tighter_tolerance() {
    let kind = GapKind::heteroclinic(-1.0, 2.0, HalfPlane::Lower);
    let mut previous: Option<(f64, f64)> = None;
    for tol_theta in [1e-2, 1e-3, 1e-4, 1e-5] {
        let b = bisect_bifurcation(-1.0, 2.0, 1.1, 1.2, kind, tol_theta).unwrap();
        if let Some((theta, tol)) = previous {
            assert!((b.refined_theta - theta).abs() < tol, "{tol_theta}: {} vs {theta}", b.refined_theta);
        }
        previous = Some((b.refined_theta, tol_theta));
    }
}
