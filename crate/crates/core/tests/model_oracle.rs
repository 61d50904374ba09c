use nalgebra::Matrix2;
use proptest::prelude::*;
use vdp_conley::model::{
    classify, equilibria, jacobian, lyapunov_coefficient, vector_field, Equilibrium, StabilityClass, State,
    SystemParams,
};

fn valid_params() -> impl Strategy<Value = SystemParams> {
    (0.05f64..3.0, any::<bool>(), 0.01f64..3.0, any::<bool>(), -3.0f64..3.0).prop_map(|(ad, sd, gap, se, theta)| {
        let d = if sd { ad } else { -ad };
        let e = if se { ad + gap } else { -(ad + gap) };
        SystemParams::new(d, e, theta).expect("valid by construction")
    })
}

/// Eigenvalues of the Jacobian from nalgebra, sorted like the closed forms.
fn numeric_eigenvalues(p: &SystemParams, which: Equilibrium) -> [(f64, f64); 2] {
    let j = jacobian(p, which.location(p));
    let m = Matrix2::new(j[0][0], j[0][1], j[1][0], j[1][1]);
    let ev = m.complex_eigenvalues();
    let mut v = [(ev[0].re, ev[0].im), (ev[1].re, ev[1].im)];
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn closed_form_eigenvalues_match_numeric(p in valid_params()) {
        for which in Equilibrium::ALL {
            let (spec, _) = classify(&p, which);
            let j = jacobian(&p, which.location(&p));
            let disc = j[1][1] * j[1][1] + 4.0 * j[1][0];
            // repeated roots are ill-conditioned for any eigensolver
            prop_assume!(disc.abs() > 1e-6);
            let num = numeric_eigenvalues(&p, which);
            for (a, (re, im)) in [spec.lambda1, spec.lambda2].iter().zip(num) {
                let scale = a.norm().max(1.0);
                prop_assert!((a.re - re).abs() <= 1e-9 * scale, "{which} {a} vs {re}+{im}i");
                prop_assert!((a.im - im).abs() <= 1e-9 * scale, "{which} {a} vs {re}+{im}i");
            }
        }
    }

    #[test]
    fn equilibria_are_zeros_of_the_field(p in valid_params()) {
        for s in equilibria(&p) {
            prop_assert!(vector_field(&p, s).norm() < 1e-12);
        }
    }

    #[test]
    fn class_agrees_with_eigenvalue_signs(p in valid_params()) {
        for which in Equilibrium::ALL {
            let (spec, class) = classify(&p, which);
            let (r1, r2) = (spec.lambda1.re, spec.lambda2.re);
            match class {
                StabilityClass::Sink => prop_assert!(r1 < 0.0 && r2 < 0.0),
                StabilityClass::Source => prop_assert!(r1 > 0.0 && r2 > 0.0),
                StabilityClass::Saddle => prop_assert!(r1 < 0.0 && r2 > 0.0),
                StabilityClass::WeakSink => prop_assert!(r1 == 0.0 && r2 == 0.0),
                StabilityClass::Degenerate(_) => prop_assert!(r1 + r2 == 0.0),
            }
        }
    }

    #[test]
    fn lyapunov_coefficient_is_minus_one(p in valid_params()) {
        let at_hopf = p.with_theta(0.0).unwrap();
        let (_, l) = lyapunov_coefficient(&at_hopf).unwrap();
        prop_assert_eq!(l, -1.0);
    }

    #[test]
    fn jacobian_matches_finite_differences(p in valid_params(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let j = jacobian(&p, State::new(x, y));
        let h = 1e-6;
        let dx = vector_field(&p, State::new(x + h, y)) - vector_field(&p, State::new(x - h, y));
        let dy = vector_field(&p, State::new(x, y + h)) - vector_field(&p, State::new(x, y - h));
        let scale = j.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!((dx.y / (2.0 * h) - j[1][0]).abs() < 1e-6 * scale);
        prop_assert!((dy.y / (2.0 * h) - j[1][1]).abs() < 1e-6 * scale);
        prop_assert!((dy.x / (2.0 * h) - j[0][1]).abs() < 1e-9);
    }
}
