use proptest::prelude::*;

use gencol::testfn::{make_aq, TestFunction};

fn test_function() -> impl Strategy<Value = TestFunction> {
    (
        -2.0f64..2.0,
        0.05f64..3.0,
        prop::collection::vec(-2.0f64..2.0, 1..5),
    )
        .prop_filter_map("non-zero polynomial", |(c, r, mut p)| {
            p[0] += 3.0;
            TestFunction::new(c, r, p).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn action_laws(phi in test_function(), r in 0.1f64..4.0, s in 0.1f64..4.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        prop_assert_eq!(phi.scale(1.0).unwrap(), phi.clone());
        prop_assert_eq!(phi.scale(s).unwrap().scale(r).unwrap(), phi.scale(r * s).unwrap());
        prop_assert_eq!(phi.translate(0.0), phi.clone());
        prop_assert_eq!(phi.translate(y).translate(x), phi.translate(x + y));
        prop_assert_eq!(phi.translate(x).scale(r).unwrap(), phi.scale(r).unwrap().translate(r * x));
    }

    #[test]
    fn actions_preserve_mass_and_scale_supports(phi in test_function(), r in 0.1f64..4.0, x in -3.0f64..3.0) {
        let m = phi.mass();
        prop_assert!((phi.scale(r).unwrap().mass() - m).abs() <= 1e-9 * m.abs().max(1.0));
        prop_assert!((phi.translate(x).mass() - m).abs() <= 1e-9 * m.abs().max(1.0));
        let d = phi.scale(r).unwrap().diam_supp();
        prop_assert!((d - r * phi.diam_supp()).abs() <= 1e-12 * d.max(1.0));
    }

    #[test]
    fn actions_are_free(phi in test_function(), r in 0.1f64..4.0, x in -3.0f64..3.0) {
        prop_assert_eq!(phi.scale(r).unwrap() == phi, (r - 1.0).abs() <= 1e-12);
        prop_assert_eq!(phi.translate(x) == phi, x.abs() <= 1e-12);
    }

    #[test]
    fn derivative_matches_central_difference(phi in test_function(), t in -0.95f64..0.95) {
        let y = phi.center() + t * phi.radius();
        let h = 1e-6 * phi.radius();
        let fd = (phi.eval(y + h, 0) - phi.eval(y - h, 0)) / (2.0 * h);
        let scale = phi.coeffs().iter().map(|c| c.abs()).sum::<f64>() / phi.radius();
        prop_assert!((phi.eval(y, 1) - fd).abs() <= 1e-5 * scale.max(1.0));
    }

    #[test]
    fn first_moment_of_a_translate(phi in test_function(), a in -2.0f64..2.0) {
        let m0 = phi.moment(0).unwrap();
        let m1 = phi.moment(1).unwrap();
        let shifted = phi.translate(a).moment(1).unwrap();
        prop_assert!((shifted - (m1 + a * m0)).abs() <= 1e-9 * (1.0 + m1.abs() + (a * m0).abs()));
    }

    #[test]
    fn text_form_round_trips(phi in test_function()) {
        let back: TestFunction = phi.to_string().parse().unwrap();
        prop_assert_eq!(back, phi);
    }
}

#[test]
fn moment_classes_nest() {
    for q in 0..=6 {
        let phi = make_aq(q, 1.0).unwrap();
        assert!((phi.mass() - 1.0).abs() <= 1e-9);
        for j in 1..=q {
            assert!(
                phi.moment_with(j, 128, 1e-13).unwrap().abs() <= 1e-9,
                "q {q}, j {j}"
            );
        }
        assert!(phi.vanishing_order(6, 1e-9).unwrap() >= q);
    }
}

#[test]
fn closed_form_values() {
    let b = TestFunction::bump(0.0, 1.0).unwrap();
    assert!((b.eval(0.0, 0) - (-1f64).exp()).abs() < 1e-15);
    for d in 0..=4 {
        assert_eq!(b.eval(1.0, d), 0.0);
        assert_eq!(b.eval(-1.0, d), 0.0);
    }
    assert_eq!(b.diam_supp(), 2.0);
    assert_eq!(b.scale(0.25).unwrap().diam_supp(), 0.5);
    assert_eq!(
        TestFunction::new(0.0, 1.0, vec![0.0]).unwrap().diam_supp(),
        0.0
    );
}
