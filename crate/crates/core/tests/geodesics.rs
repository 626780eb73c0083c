use proptest::prelude::*;

use difgeo::geodesy::{exp_map, metric_norm, orthonormal_basis, shoot_log, trace_geodesic, ShootOptions};
use difgeo::surfaces::{Builtin, SurfaceSpec};
use difgeo::{Vec2, Vec3};

fn geographic(p: (f64, f64)) -> Vec3 {
    Vec3::new(p.1.cos() * p.0.cos(), p.1.cos() * p.0.sin(), p.1.sin())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sphere_exp_follows_great_circles(u in -3.0f64..3.0, v in -0.8f64..0.8, th in 0.0f64..6.28, r in 0.05f64..1.0) {
        let s = SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 });
        let (e1, e2) = orthonormal_basis(&s, (u, v)).unwrap();
        let w = e1 * (r * th.cos()) + e2 * (r * th.sin());
        let Ok(q) = exp_map(&s, (u, v), w) else { return Ok(()) };
        let (p3, q3) = (geographic((u, v)), geographic(q));
        prop_assert!((p3.angle_to(q3) - r).abs() < 1e-7);
    }

    #[test]
    fn log_inverts_exp_on_torus(u in -2.5f64..2.5, v in -2.5f64..2.5, th in 0.0f64..6.28, r in 0.05f64..0.6) {
        let s = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        let (e1, e2) = orthonormal_basis(&s, (u, v)).unwrap();
        let w = e1 * (r * th.cos()) + e2 * (r * th.sin());
        let q = exp_map(&s, (u, v), w).unwrap();
        let res = shoot_log(&s, (u, v), q, &ShootOptions::default()).unwrap();
        prop_assert!(res.converged);
        prop_assert!((res.distance - r).abs() < 1e-7, "distance {} vs {r}", res.distance);
        prop_assert!((metric_norm(&s, (u, v), res.w).unwrap() - r).abs() < 1e-7);
    }
}

#[test]
fn plane_geodesics_are_lines() {
    let plane = SurfaceSpec::graph("0", (-5.0, 5.0), (-5.0, 5.0)).unwrap();
    let path = trace_geodesic(&plane, (0.5, -1.0), Vec2::new(0.6, 0.8), 3.0, 300).unwrap();
    let end = path.end();
    assert!((end.u - 2.3).abs() < 1e-12 && (end.v - 1.4).abs() < 1e-12);
    assert!(path.speed_drift < 1e-14);
}

#[test]
fn cylinder_geodesics_are_helices() {
    let c = SurfaceSpec::builtin(Builtin::Cylinder { radius: 2.0, height: 5.0 });
    let path = trace_geodesic(&c, (0.0, -1.0), Vec2::new(0.3, 0.5), 4.0, 2000).unwrap();
    let end = path.end();
    assert!((end.u - 1.2).abs() < 1e-10);
    assert!((end.v - 1.0).abs() < 1e-10);
}

#[test]
fn leaving_the_chart_truncates() {
    let saddle = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
    let path = trace_geodesic(&saddle, (0.0, 0.0), Vec2::new(1.0, 0.0), 10.0, 2000).unwrap();
    assert!(path.truncated());
    assert!(exp_map(&saddle, (0.0, 0.0), Vec2::new(10.0, 0.0)).is_err());
}

#[test]
fn clairaut_is_conserved_on_revolution_surfaces() {
    let cat = SurfaceSpec::builtin(Builtin::Catenoid { c: 1.0, half_height: 1.5 });
    let (e1, e2) = orthonormal_basis(&cat, (-0.5, 0.0)).unwrap();
    let path = trace_geodesic(&cat, (-0.5, 0.0), e1 * 0.6 + e2 * 0.8, 2.0, 4000).unwrap();
    assert!(path.clairaut_drift.unwrap() < 1e-9);
}
