//! Named curves and surfaces used as test oracles and by `verify-gallery`.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::curves::CurveSpec;
use crate::error::Result;
use crate::numcore::Vec2;
use crate::surfaces::{Builtin, SurfaceSpec};
use crate::transport::OnSurfaceCurve;

#[derive(Debug, Clone)]
pub struct NamedCurve {
    pub name: &'static str,
    pub curve: CurveSpec,
}

fn named(name: &'static str, curve: Result<CurveSpec>) -> NamedCurve {
    NamedCurve { name, curve: curve.expect("gallery curve") }
}

/// Simple closed plane curves; the last one runs clockwise.
pub fn plane_closed_curves() -> Vec<NamedCurve> {
    vec![
        named("circle", CurveSpec::plane("cos(t)", "sin(t)", 0.0, TAU, true)),
        named("ellipse", CurveSpec::plane("2*cos(t)", "sin(t)", 0.0, TAU, true)),
        named("limacon", CurveSpec::plane("(2 + cos(t))*cos(t)", "(2 + cos(t))*sin(t)", 0.0, TAU, true)),
        named("rounded-triangle", CurveSpec::plane("(1 + 0.2*cos(3*t))*cos(t)", "(1 + 0.2*cos(3*t))*sin(t)", 0.0, TAU, true)),
        named("clockwise-egg", CurveSpec::plane("cos(t) + 0.2*cos(2*t)", "-0.8*sin(t)", 0.0, TAU, true)),
    ]
}

pub fn space_closed_curves() -> Vec<NamedCurve> {
    vec![
        named("trefoil", CurveSpec::analytic("(2 + cos(3*t))*cos(2*t)", "(2 + cos(3*t))*sin(2*t)", "sin(3*t)", 0.0, TAU, true)),
        named("viviani", CurveSpec::analytic("(1 + cos(t))/2", "sin(t)/2", "sin(t/2)", 0.0, 2.0 * TAU, true)),
        named(
            "torus-knot-2-5",
            CurveSpec::analytic("(3 + cos(5*t))*cos(2*t)", "(3 + cos(5*t))*sin(2*t)", "sin(5*t)", 0.0, TAU, true),
        ),
        named("tilted-circle", CurveSpec::analytic("cos(t)", "0.6*sin(t)", "0.8*sin(t)", 0.0, TAU, true)),
        named("saddle-loop", CurveSpec::analytic("cos(t)", "sin(t)", "0.5*cos(2*t)", 0.0, TAU, true)),
    ]
}

#[derive(Debug, Clone)]
pub struct NamedSurface {
    pub name: &'static str,
    pub surface: SurfaceSpec,
    /// Parameter box away from chart singularities and edges.
    pub interior: ((f64, f64), (f64, f64)),
}

impl NamedSurface {
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let ((u0, u1), (v0, v1)) = self.interior;
        (rng.gen_range(u0..u1), rng.gen_range(v0..v1))
    }

    /// A random ellipse `center + (a cos t, b sin t)` inside the interior box, counterclockwise in the chart.
    pub fn random_loop<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<OnSurfaceCurve> {
        let ((u0, u1), (v0, v1)) = self.interior;
        let (wu, wv) = (u1 - u0, v1 - v0);
        let a = rng.gen_range(0.05..0.25) * wu;
        let b = rng.gen_range(0.05..0.25) * wv;
        let cu = rng.gen_range(u0 + a..u1 - a);
        let cv = rng.gen_range(v0 + b..v1 - b);
        OnSurfaceCurve::from_exprs(&format!("{cu} + {a}*cos(t)"), &format!("{cv} + {b}*sin(t)"), 0.0, TAU, true)
    }

    /// A random sub-rectangle of the interior box.
    pub fn random_rect<R: Rng + ?Sized>(&self, rng: &mut R) -> ((f64, f64), (f64, f64)) {
        let ((u0, u1), (v0, v1)) = self.interior;
        let pick = |rng: &mut R, lo: f64, hi: f64| {
            let w = rng.gen_range(0.2..0.7) * (hi - lo);
            let a = rng.gen_range(lo..hi - w);
            (a, a + w)
        };
        let u = pick(rng, u0, u1);
        let v = pick(rng, v0, v1);
        (u, v)
    }
}

fn surface(name: &'static str, surface: SurfaceSpec, interior: ((f64, f64), (f64, f64))) -> NamedSurface {
    NamedSurface { name, surface, interior }
}

pub fn surface_gallery() -> Vec<NamedSurface> {
    vec![
        surface("sphere", SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 }), ((-PI, PI), (-1.2, 1.2))),
        surface("cylinder", SurfaceSpec::builtin(Builtin::Cylinder { radius: 1.0, height: 2.0 }), ((-PI, PI), (-1.5, 1.5))),
        surface("torus", SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 }), ((-PI, PI), (-PI, PI))),
        surface("catenoid", SurfaceSpec::builtin(Builtin::Catenoid { c: 1.0, half_height: 1.5 }), ((-1.2, 1.2), (-PI, PI))),
        surface("helicoid", SurfaceSpec::builtin(Builtin::Helicoid { c: 1.0, half_width: 2.0 }), ((-1.5, 1.5), (-2.5, 2.5))),
        surface("pseudosphere", SurfaceSpec::builtin(Builtin::Pseudosphere { s_max: 4.0 }), ((0.3, 3.0), (-PI, PI))),
        surface("saddle", SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 }), ((-0.8, 0.8), (-0.8, 0.8))),
    ]
}

/// Convex graph `(x² + y²)/2`.
pub fn bowl() -> SurfaceSpec {
    SurfaceSpec::graph("(x^2 + y^2)/2", (-3.0, 3.0), (-3.0, 3.0)).expect("gallery surface")
}

/// Unit sphere by inverse stereographic projection from the south pole; outward normal.
pub fn stereographic_sphere() -> SurfaceSpec {
    SurfaceSpec::parametric(
        "2*u/(1 + u^2 + v^2)",
        "2*v/(1 + u^2 + v^2)",
        "(1 - u^2 - v^2)/(1 + u^2 + v^2)",
        (-3.0, 3.0),
        (-3.0, 3.0),
    )
    .expect("gallery surface")
}

/// Boundary of the octant `x, y, z ≥ 0` of the unit sphere in the stereographic chart,
/// counterclockwise seen from outside.
pub fn octant_loop() -> OnSurfaceCurve {
    let a = OnSurfaceCurve::expr_piece("t", "0", 0.0, 1.0).expect("literal");
    let b = OnSurfaceCurve::expr_piece("cos(t)", "sin(t)", 0.0, PI / 2.0).expect("literal");
    let c = OnSurfaceCurve::expr_piece("0", "1 - t", 0.0, 1.0).expect("literal");
    OnSurfaceCurve { pieces: vec![a, b, c], closed: true }
}

/// Latitude circle on the geographic unit sphere at polar angle `phi`;
/// eastward circles have the polar cap on their left.
pub fn latitude_circle(phi: f64, eastward: bool) -> OnSurfaceCurve {
    let v = PI / 2.0 - phi;
    OnSurfaceCurve::from_exprs(if eastward { "t" } else { "-t" }, &format!("{v}"), -PI, PI, true).expect("literal")
}

/// Counterclockwise boundary of a parameter rectangle.
pub fn rect_loop(u: (f64, f64), v: (f64, f64)) -> Result<OnSurfaceCurve> {
    OnSurfaceCurve::polygon(&[Vec2::new(u.0, v.0), Vec2::new(u.1, v.0), Vec2::new(u.1, v.1), Vec2::new(u.0, v.1)], true)
}
