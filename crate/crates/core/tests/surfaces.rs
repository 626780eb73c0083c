use approx::assert_relative_eq;
use proptest::prelude::*;

use difgeo::gallery::surface_gallery;
use difgeo::intrinsic::intrinsic_k_conformal;
use difgeo::surfaces::{Builtin, Integrand, Region, SurfaceSpec};
use difgeo::Expr;

fn unit() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..1.0, 0.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn report_identities_over_gallery(i in 0usize..7, (a, b) in unit()) {
        let s = &surface_gallery()[i];
        let ((u0, u1), (v0, v1)) = s.interior;
        let (u, v) = (u0 + a * (u1 - u0), v0 + b * (v1 - v0));
        let r = s.surface.curvature_report(u, v).unwrap();
        prop_assert!(r.k1 <= r.k2);
        prop_assert!((r.gauss - r.k1 * r.k2).abs() < 1e-12 * (1.0 + r.gauss.abs()));
        prop_assert!((r.mean - (r.k1 + r.k2)).abs() < 1e-12 * (1.0 + r.mean.abs()));
        prop_assert!(r.dir1.dot(r.dir2).abs() < 1e-8 || r.umbilic);
        prop_assert!(r.dir1.dot(r.normal).abs() < 1e-10);
        prop_assert!((r.normal.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_and_flipping(k in 0.3f64..4.0, (a, b) in unit()) {
        let s = SurfaceSpec::builtin(Builtin::Catenoid { c: 1.0, half_height: 1.5 });
        let (u, v) = (-1.2 + 2.4 * a, -3.0 + 6.0 * b);
        let r = s.curvature_report(u, v).unwrap();
        let big = s.scaled(k).curvature_report(u, v).unwrap();
        prop_assert!((big.gauss * k * k - r.gauss).abs() < 1e-10);
        prop_assert!((big.k1 * k - r.k1).abs() < 1e-10);
        let flipped = s.clone().with_flipped_normal().curvature_report(u, v).unwrap();
        prop_assert!((flipped.gauss - r.gauss).abs() < 1e-12);
        prop_assert!((flipped.k1 + r.k2).abs() < 1e-12);
    }

    #[test]
    fn graph_and_parametric_charts_agree(x in -0.8f64..0.8, y in -0.8f64..0.8) {
        let g = SurfaceSpec::graph("x^2*y - y^3/3", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let p = SurfaceSpec::parametric("u", "v", "u^2*v - v^3/3", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let (a, b) = (g.curvature_report(x, y).unwrap(), p.curvature_report(x, y).unwrap());
        prop_assert!((a.gauss - b.gauss).abs() < 1e-12);
        prop_assert!((a.mean - b.mean).abs() < 1e-12);
    }
}

#[test]
fn sphere_area_and_total_curvature() {
    for r in [0.5, 2.0] {
        let s = SurfaceSpec::builtin(Builtin::Sphere { radius: r });
        let full = s.full_region();
        assert_relative_eq!(s.area(&full, 300).unwrap(), 4.0 * std::f64::consts::PI * r * r, max_relative = 1e-4);
        assert_relative_eq!(s.total_gauss_curvature(&full, 300).unwrap(), 4.0 * std::f64::consts::PI, max_relative = 1e-4);
    }
}

#[test]
fn torus_total_curvature_vanishes() {
    let s = SurfaceSpec::builtin(Builtin::Torus { major: 3.0, minor: 1.0 });
    assert!(s.total_gauss_curvature(&s.full_region(), 200).unwrap().abs() < 1e-10);
}

#[test]
fn indicator_region_disk_area() {
    let plane = SurfaceSpec::graph("0", (-2.0, 2.0), (-2.0, 2.0)).unwrap();
    let g = Expr::parse("u^2 + v^2 - 1", &["u", "v"]).unwrap();
    let disk = Region::Indicator { u: (-1.0, 1.0), v: (-1.0, 1.0), g };
    let r = plane.integrate_refined(&Integrand::One, &disk, 200).unwrap();
    assert!((r.fine - std::f64::consts::PI).abs() < 5e-3);
    assert!(r.delta < 1e-2);
}

#[test]
fn conformal_formula_matches_model_spaces() {
    let hyperbolic = Expr::parse("1/v", &["u", "v"]).unwrap();
    let round = Expr::parse("2/(1 + u^2 + v^2)", &["u", "v"]).unwrap();
    for (u, v) in [(0.1, 0.5), (-1.0, 2.0), (0.3, 0.9)] {
        assert_relative_eq!(intrinsic_k_conformal(&hyperbolic, u, v).unwrap(), -1.0, epsilon = 1e-12);
        assert_relative_eq!(intrinsic_k_conformal(&round, u, v).unwrap(), 1.0, epsilon = 1e-12);
    }
}
