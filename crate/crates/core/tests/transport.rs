use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use difgeo::gallery::{latitude_circle, rect_loop};
use difgeo::surfaces::{Builtin, Region, SurfaceSpec};
use difgeo::transport::{
    angle_mod_tau, corner_angles, gauss_bonnet, holonomy, parallel_transport, total_geodesic_curvature, OnSurfaceCurve,
    Resolution,
};
use difgeo::{Expr, Vec2};

fn sphere() -> SurfaceSpec {
    SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn latitude_holonomy_is_enclosed_area(phi in 0.2f64..2.9) {
        let h = holonomy(&sphere(), &latitude_circle(phi, true), 2000).unwrap();
        let area = TAU * (1.0 - phi.cos());
        prop_assert!(angle_mod_tau(h - area).abs() < 1e-6);
    }

    #[test]
    fn transport_preserves_length(a in 0.1f64..0.5, b in 0.1f64..0.5, wu in -1.0f64..1.0, wv in -1.0f64..1.0) {
        prop_assume!(wu.abs() + wv.abs() > 0.1);
        let t = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        let c = OnSurfaceCurve::from_exprs(&format!("{a}*cos(t)"), &format!("1 + {b}*sin(t)"), 0.0, TAU, true).unwrap();
        let r = parallel_transport(&t, &c, Vec2::new(wu, wv), 1000).unwrap();
        prop_assert!(r.norm_drift < 1e-9);
    }

    #[test]
    fn ellipse_regions_satisfy_gauss_bonnet(cu in -0.5f64..0.5, cv in -0.4f64..0.4, a in 0.2f64..0.6, b in 0.1f64..0.4) {
        let s = sphere();
        let c = OnSurfaceCurve::from_exprs(&format!("{cu} + {a}*cos(t)"), &format!("{cv} + {b}*sin(t)"), 0.0, TAU, true).unwrap();
        let g = Expr::parse(&format!("((u - {cu})/{a})^2 + ((v - {cv})/{b})^2 - 1"), &["u", "v"]).unwrap();
        let region = Region::Indicator { u: (cu - a, cu + a), v: (cv - b, cv + b), g };
        let r = gauss_bonnet(&s, &c, &region, Resolution { boundary: 400, grid: 400 }).unwrap();
        // midpoint sums over a curved boundary converge slowly
        prop_assert!(r.residual.abs() < 2e-2, "residual {}", r.residual);
        let psi = total_geodesic_curvature(&s, &c, 400).unwrap();
        let h = holonomy(&s, &c, 2000).unwrap();
        prop_assert!(angle_mod_tau(h + psi).abs() < 1e-6);
    }
}

#[test]
fn rectangle_corners_are_right_angles_on_orthogonal_charts() {
    let s = sphere();
    let angles = corner_angles(&s, &rect_loop((-0.5, 0.5), (-0.3, 0.4)).unwrap()).unwrap();
    assert_eq!(angles.len(), 4);
    for a in angles {
        assert!((a - PI / 2.0).abs() < 1e-12);
    }
}

#[test]
fn exact_rectangle_gauss_bonnet() {
    let r = gauss_bonnet(&sphere(), &rect_loop((-1.0, 1.0), (-0.5, 0.7)).unwrap(), &Region::Rect { u: (-1.0, 1.0), v: (-0.5, 0.7) }, Resolution::default())
        .unwrap();
    assert!(r.residual.abs() < 1e-4);
    assert!(r.refinement_delta < 1e-4);
}

#[test]
fn wrong_orientation_is_detected() {
    let c = rect_loop((-1.0, 1.0), (-0.5, 0.5)).unwrap().reversed();
    assert!(gauss_bonnet(&sphere(), &c, &Region::Rect { u: (-1.0, 1.0), v: (-0.5, 0.5) }, Resolution::default()).is_err());
}

#[test]
fn geodesic_pieces_have_no_geodesic_curvature() {
    let s = sphere();
    let piece = OnSurfaceCurve::geodesic_piece(&s, (0.0, 0.0), Vec2::new(0.6, 0.8), 1.0, 400).unwrap();
    let c = OnSurfaceCurve { pieces: vec![piece], closed: false };
    assert!(total_geodesic_curvature(&s, &c, 200).unwrap().abs() < 1e-8);
}
