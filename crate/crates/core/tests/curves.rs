use approx::assert_relative_eq;
use proptest::prelude::*;

use difgeo::curvebuild::{curve_points, reconstruct_space, rigid_align, IntrinsicSpec, ScalarFn};
use difgeo::curves::CurveSpec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn helix_invariants(a in 0.2f64..3.0, b in -3.0f64..3.0, t in 0.0f64..10.0) {
        prop_assume!(b.abs() > 0.05);
        let c = CurveSpec::analytic(&format!("{a}*cos(t)"), &format!("{a}*sin(t)"), &format!("{b}*t"), 0.0, 10.0, false).unwrap();
        let d = a * a + b * b;
        let f = c.frenet(t).unwrap();
        prop_assert!((f.kappa - a / d).abs() <= 1e-10 * (a / d));
        prop_assert!((f.tau - b / d).abs() <= 1e-10 * (b / d).abs());
    }

    #[test]
    fn curvature_ignores_parametrization_speed(k in 0.5f64..3.0, t in 0.1f64..1.9) {
        let slow = CurveSpec::analytic("cos(t)", "sin(2*t)", "t^2", 0.0, 2.0, false).unwrap();
        let fast = CurveSpec::analytic(
            &format!("cos({k}*t)"), &format!("sin(2*{k}*t)"), &format!("({k}*t)^2"), 0.0, 2.0 / k, false,
        ).unwrap();
        let (a, b) = (slow.frenet(t).unwrap(), fast.frenet(t / k).unwrap());
        prop_assert!((a.kappa - b.kappa).abs() < 1e-9 * (1.0 + a.kappa));
        prop_assert!((a.tau - b.tau).abs() < 1e-9 * (1.0 + a.tau.abs()));
    }

    #[test]
    fn scaling_divides_curvature(k in 0.2f64..5.0, t in 0.0f64..6.0) {
        let c = CurveSpec::analytic("cos(t)", "2*sin(t)", "0.3*t", 0.0, 6.3, false).unwrap();
        let s = c.scaled(k);
        prop_assert!((s.kappa(t).unwrap() * k - c.kappa(t).unwrap()).abs() < 1e-10);
        prop_assert!((s.tau(t).unwrap() * k - c.tau(t).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn arclength_reparametrization_has_unit_speed() {
    let c = CurveSpec::analytic("t", "t^2", "t^3", 0.0, 1.0, false).unwrap();
    let r = c.arclength_reparam(4000).unwrap();
    let pts = curve_points(&r).unwrap();
    let total = c.length(4000).unwrap();
    let h = total / (pts.len() - 1) as f64;
    for w in pts.windows(2) {
        assert_relative_eq!(w[0].distance(w[1]), h, max_relative = 1e-5);
    }
}

#[test]
fn constant_curvature_and_torsion_rebuild_a_helix() {
    let (a, b) = (1.5f64, 0.5f64);
    let d = a * a + b * b;
    let spec = IntrinsicSpec::space(ScalarFn::constant(a / d), ScalarFn::constant(b / d), 0.0, 8.0);
    let rebuilt = reconstruct_space(&spec, 8000).unwrap();
    let speed = d.sqrt();
    let helix = CurveSpec::analytic(
        &format!("{a}*cos(t/{speed})"),
        &format!("{a}*sin(t/{speed})"),
        &format!("{b}*t/{speed}"),
        0.0,
        8.0,
        false,
    )
    .unwrap();
    let truth = helix.polyline(8000).unwrap();
    let got = curve_points(&rebuilt.curve).unwrap();
    assert!(rigid_align(&got, &truth).unwrap().residual < 1e-8);
}

#[test]
fn plane_curve_turning_number_sign_follows_orientation() {
    let ccw = CurveSpec::plane("cos(t)", "0.5*sin(t)", 0.0, std::f64::consts::TAU, true).unwrap();
    let cw = CurveSpec::plane("cos(t)", "-0.5*sin(t)", 0.0, std::f64::consts::TAU, true).unwrap();
    assert_relative_eq!(ccw.total_signed_curvature(2000).unwrap(), std::f64::consts::TAU, epsilon = 1e-9);
    assert_relative_eq!(cw.total_signed_curvature(2000).unwrap(), -std::f64::consts::TAU, epsilon = 1e-9);
}
