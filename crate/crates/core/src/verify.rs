//! The acceptance suite over the gallery: twelve criteria, each reduced to a
//! pass/fail verdict with the worst measured quantity.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curvebuild::{curve_points, reconstruct_plane, reconstruct_space, rigid_align, IntrinsicSpec, RigidMotion, ScalarFn};
use crate::curves::{CurveSpec, TheoremOptions};
use crate::error::Result;
use crate::gallery::{self, NamedSurface};
use crate::geodesy::{geodesic_circle_length, geodesic_residual, min_height_acceleration, orthonormal_basis, shoot_log, trace_geodesic, ShootOptions};
use crate::intrinsic::{alexandrov_signs, comparison_check, egregium_check, jacobi_residual, max_abs, polar_field};
use crate::numcore::{Vec2, Vec3};
use crate::surfaces::{Builtin, Region, SurfaceSpec};
use crate::transport::{angle_mod_tau, gauss_bonnet, gauss_bonnet_general, holonomy, total_geodesic_curvature, Resolution};

/// Seed used by the acceptance target and `verify-gallery` unless overridden.
pub const DEFAULT_SEED: u64 = 20_240_601;

pub const CRITERIA: [&str; 12] = [
    "helix curvature and torsion",
    "curve reconstruction round trips",
    "closed-curve total curvature",
    "Crofton estimators",
    "surface gallery curvatures",
    "Euler formula band",
    "geodesic monitors and shooting",
    "parallel transport and holonomy",
    "Gauss-Bonnet",
    "intrinsic curvature",
    "comparison triangles",
    "global theorems via local substitutes",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} [{mark}] {}: {}", self.id, self.title, self.detail)
    }
}

/// Worst value of a metric against its bound.
struct Tally {
    parts: Vec<String>,
    ok: bool,
}

impl Tally {
    fn new() -> Tally {
        Tally { parts: Vec::new(), ok: true }
    }

    /// Records `value ≤ bound`.
    fn below(&mut self, what: &str, value: f64, bound: f64) {
        let ok = value <= bound;
        self.ok &= ok;
        self.parts.push(format!("{what} {value:.3e} (≤ {bound:.0e})"));
    }

    /// Records `value ≥ bound`.
    fn above(&mut self, what: &str, value: f64, bound: f64) {
        let ok = value >= bound;
        self.ok &= ok;
        self.parts.push(format!("{what} {value:.3e} (≥ {bound:.0e})"));
    }

    fn flag(&mut self, what: &str, ok: bool) {
        self.ok &= ok;
        self.parts.push(format!("{what} {}", if ok { "yes" } else { "no" }));
    }

    fn fail(&mut self, what: &str, err: impl std::fmt::Display) {
        self.ok = false;
        self.parts.push(format!("{what}: error {err}"));
    }

    fn finish(self, id: usize) -> Outcome {
        Outcome { id, title: CRITERIA[id - 1], passed: self.ok, detail: self.parts.join("; ") }
    }
}

fn rng_for(seed: u64, id: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(id as u64 + 1)))
}

/// Runs one criterion (1-based).
pub fn run_criterion(id: usize, seed: u64) -> Outcome {
    let mut t = Tally::new();
    let mut rng = rng_for(seed, id);
    let r = match id {
        1 => helix(&mut t, &mut rng),
        2 => round_trips(&mut t),
        3 => closed_curves(&mut t),
        4 => crofton(&mut t, &mut rng),
        5 => gallery_curvatures(&mut t),
        6 => euler_band(&mut t, &mut rng),
        7 => geodesics(&mut t, &mut rng),
        8 => transport(&mut t, &mut rng),
        9 => gauss_bonnet_suite(&mut t, &mut rng),
        10 => intrinsic(&mut t),
        11 => comparison(&mut t, &mut rng),
        12 => {
            let deps = [3, 10, 11].map(|i| run_criterion(i, seed).passed);
            t.flag("items 3, 10, 11 pass", deps.iter().all(|x| *x));
            Ok(())
        }
        _ => {
            t.fail("criterion", format!("no criterion {id}"));
            Ok(())
        }
    };
    if let Err(e) = r {
        t.fail("unexpected", e);
    }
    t.finish(id)
}

/// Runs every criterion; criterion 12 reuses the verdicts of 3, 10 and 11.
pub fn run_all(seed: u64) -> Vec<Outcome> {
    let mut out: Vec<Outcome> = (1..=11).map(|i| run_criterion(i, seed)).collect();
    let mut t = Tally::new();
    t.flag("items 3, 10, 11 pass", [2, 9, 10].iter().all(|&i| out[i].passed));
    out.push(t.finish(12));
    out
}

fn helix(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = rng.gen_range(0.2..3.0);
        let b = rng.gen_range(0.1..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let c = CurveSpec::analytic(&format!("{a}*cos(t)"), &format!("{a}*sin(t)"), &format!("{b}*t"), 0.0, 10.0, false)?;
        let d = a * a + b * b;
        for k in 0..5 {
            let f = c.frenet(2.0 * k as f64 + 0.3)?;
            worst = worst.max(((f.kappa - a / d) / (a / d)).abs()).max(((f.tau - b / d) / (b / d)).abs());
        }
    }
    t.below("max relative error", worst, 1e-8);
    Ok(())
}

fn round_trips(t: &mut Tally) -> Result<()> {
    let ellipse = CurveSpec::plane("2*cos(t)", "sin(t)", 0.0, TAU, true)?;
    let steps = 20_000;
    let rebuilt = reconstruct_plane(&IntrinsicSpec::measure(&ellipse, 4000)?, steps)?;
    let mut a = curve_points(&rebuilt)?;
    a.pop();
    let b = curve_points(&ellipse.arclength_reparam(steps)?)?;
    t.below("ellipse", rigid_align(&a, &b)?.residual, 1e-3);

    let moment = CurveSpec::analytic("t", "t^2", "t^3", 0.0, 1.0, false)?;
    let rec = reconstruct_space(&IntrinsicSpec::measure(&moment, 2000)?, 10_000)?;
    let truth = moment.arclength_reparam(10_000)?;
    t.below("moment curve", rigid_align(&curve_points(&rec.curve)?, &curve_points(&truth)?)?.residual, 1e-3);

    let helix = CurveSpec::analytic("2*cos(t)", "2*sin(t)", "t", 0.0, 4.0, false)?;
    let rec = reconstruct_space(&IntrinsicSpec::measure(&helix, 2000)?, 10_000)?;
    let truth = helix.arclength_reparam(10_000)?;
    t.below("helix", rigid_align(&curve_points(&rec.curve)?, &curve_points(&truth)?)?.residual, 1e-3);

    let spec = IntrinsicSpec::space(ScalarFn::parse("1 + 0.3*cos(s)")?, ScalarFn::parse("0.5*sin(2*s)")?, 0.0, 6.0);
    let m = RigidMotion::from_axis_angle(Vec3::new(1.0, -2.0, 0.5), 1.1, Vec3::new(3.0, 1.0, -2.0));
    let moved = spec.clone().with_frame(m.apply(Vec3::ZERO), m.apply(Vec3::X) - m.translation, m.apply(Vec3::Y) - m.translation);
    let p = curve_points(&reconstruct_space(&spec, 6000)?.curve)?;
    let q = curve_points(&reconstruct_space(&moved, 6000)?.curve)?;
    t.below("two frames", rigid_align(&p, &q)?.residual, 1e-8);
    Ok(())
}

/// Scales a curve about the origin so its samples fit in the unit ball.
fn into_unit_ball(c: &CurveSpec) -> Result<CurveSpec> {
    let r = c.polyline(4096)?.iter().map(|p| p.norm()).fold(0.0, f64::max);
    Ok(c.scaled(1.0 / (r * (1.0 + 1e-9))))
}

fn closed_curves(t: &mut Tally) -> Result<()> {
    let mut turning = 0.0f64;
    for c in gallery::plane_closed_curves() {
        let psi = c.curve.total_signed_curvature(4000)?;
        turning = turning.max((psi.abs() - TAU).abs());
    }
    t.below("| |Ψ| − 2π |", turning, 1e-6);
    let opts = TheoremOptions::default();
    let mut fenchel = f64::INFINITY;
    let mut dna = f64::INFINITY;
    for c in gallery::space_closed_curves() {
        let r = c.curve.theorem_checks(&opts)?;
        fenchel = fenchel.min(r.fenchel.margin().unwrap_or(f64::NEG_INFINITY));
    }
    for c in gallery::space_closed_curves().iter().chain(&gallery::plane_closed_curves()) {
        let r = into_unit_ball(&c.curve)?.theorem_checks(&opts)?;
        dna = dna.min(r.dna.margin().unwrap_or(f64::NEG_INFINITY));
    }
    t.above("min Fenchel margin", fenchel, -1e-6);
    t.above("min DNA margin", dna, -1e-6);
    Ok(())
}

fn crofton(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let circle = CurveSpec::plane("cos(t)", "sin(t)", 0.0, TAU, true)?;
    let est = circle.crofton_plane(10_000, rng)?;
    t.below("plane circle rel. error", (est - TAU).abs() / TAU, 0.01);
    let segment = CurveSpec::analytic("t", "0.5*t", "-t", 0.0, 1.0, false)?;
    let len = 1.5;
    let est = segment.crofton_space_lines(100_000, rng)?;
    t.below("segment via lines rel. error", (est - len).abs() / len, 0.01);
    let est = circle.crofton_space_planes(100_000, rng)?;
    t.below("circle via planes rel. error", (est - TAU).abs() / TAU, 0.01);
    Ok(())
}

fn gallery_curvatures(t: &mut Tally) -> Result<()> {
    let ps = SurfaceSpec::builtin(Builtin::Pseudosphere { s_max: 4.0 });
    let mut e = 0.0f64;
    for k in 0..20 {
        let s = 0.2 + 3.6 * k as f64 / 19.0;
        e = e.max((ps.curvature_report(s, 0.1 * k as f64)?.gauss + 1.0).abs());
    }
    t.below("pseudosphere |K + 1|", e, 1e-5);
    let grid = |u: (f64, f64), v: (f64, f64)| {
        (0..25).map(move |k| (u.0 + (u.1 - u.0) * (k % 5) as f64 / 4.0, v.0 + (v.1 - v.0) * (k / 5) as f64 / 4.0))
    };
    let mut h = 0.0f64;
    let cat = SurfaceSpec::builtin(Builtin::Catenoid { c: 1.0, half_height: 1.5 });
    let hel = SurfaceSpec::builtin(Builtin::Helicoid { c: 1.0, half_width: 2.0 });
    for (u, v) in grid((-1.4, 1.4), (-3.0, 3.0)) {
        h = h.max(cat.curvature_report(u, v)?.mean.abs());
        h = h.max(hel.curvature_report(u, v)?.mean.abs());
    }
    t.below("minimal |H|", h, 1e-8);
    let mut e = 0.0f64;
    for r in [0.5, 1.0, 2.0, 3.7] {
        let s = SurfaceSpec::builtin(Builtin::Sphere { radius: r });
        for (u, v) in grid((-3.0, 3.0), (-1.3, 1.3)) {
            e = e.max((s.curvature_report(u, v)?.gauss - 1.0 / (r * r)).abs());
        }
    }
    t.below("sphere |K − 1/R²|", e, 1e-8);
    let torus = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
    let outside = torus.curvature_report(0.0, 0.4)?.gauss > 0.0 && torus.curvature_report(0.8, 1.0)?.gauss > 0.0;
    let inside = torus.curvature_report(PI, 0.4)?.gauss < 0.0 && torus.curvature_report(-2.5, 2.0)?.gauss < 0.0;
    t.flag("torus K > 0 outside and < 0 inside", outside && inside);
    let mut e = 0.0f64;
    for k in 0..40 {
        let s = -PI + TAU * (k as f64 + 0.5) / 40.0;
        if (s.abs() - PI / 2.0).abs() < 0.05 {
            continue;
        }
        let (km, kp) = torus.revolution_principal(s)?;
        let r = torus.curvature_report(s, 0.3)?;
        e = e.max((r.gauss.abs() - (km * kp).abs()).abs());
        let mut pair = [km.abs(), kp.abs()];
        pair.sort_by(f64::total_cmp);
        let mut got = [r.k1.abs(), r.k2.abs()];
        got.sort_by(f64::total_cmp);
        e = e.max((pair[0] - got[0]).abs()).max((pair[1] - got[1]).abs());
    }
    t.below("torus closed-form mismatch", e, 1e-6);
    Ok(())
}

fn euler_band(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let surfaces = gallery::surface_gallery();
    let (mut band, mut euler) = (f64::NEG_INFINITY, 0.0f64);
    for i in 0..1000 {
        let s = &surfaces[i % surfaces.len()];
        let (u, v) = s.random_point(rng);
        let r = s.surface.curvature_report(u, v)?;
        let th = rng.gen_range(0.0..TAU);
        let dir = r.chart_dir1 * th.cos() + r.chart_dir2 * th.sin();
        let kn = s.surface.normal_curvature(u, v, dir)?;
        band = band.max(r.k1 - kn).max(kn - r.k2);
        euler = euler.max((kn - (r.k1 * th.cos().powi(2) + r.k2 * th.sin().powi(2))).abs());
        let random_dir = Vec2::from_angle(rng.gen_range(0.0..TAU));
        let kr = s.surface.normal_curvature(u, v, random_dir)?;
        band = band.max(r.k1 - kr).max(kr - r.k2);
    }
    t.below("band violation", band, 1e-8);
    t.below("Euler formula error", euler, 1e-8);
    Ok(())
}

/// Unit-speed start direction at angle `th` to the first coordinate line.
fn unit_direction(s: &SurfaceSpec, p: (f64, f64), th: f64) -> Result<Vec2> {
    let (e1, e2) = orthonormal_basis(s, p)?;
    Ok(e1 * th.cos() + e2 * th.sin())
}

fn geodesics(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let (mut speed, mut residual, mut clairaut) = (0.0f64, 0.0f64, 0.0f64);
    for s in gallery::surface_gallery() {
        for _ in 0..3 {
            let path = random_trace(&s, rng)?;
            speed = speed.max(path.speed_drift);
            residual = residual.max(geodesic_residual(&s.surface, &path)? / s.surface.scale());
            if let Some(c) = path.clairaut_drift {
                clairaut = clairaut.max(c);
            }
        }
    }
    t.below("speed drift", speed, 1e-6);
    t.below("residual / scale", residual, 1e-7);
    t.below("Clairaut drift", clairaut, 1e-6);
    let bowl = gallery::bowl();
    let mut lib = f64::INFINITY;
    for _ in 0..5 {
        let p = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let w = unit_direction(&bowl, p, rng.gen_range(0.0..TAU))?;
        let path = trace_geodesic(&bowl, p, w, 3.0, 6000)?;
        lib = lib.min(min_height_acceleration(&bowl, &path)?);
    }
    t.above("min z″ on convex graph", lib, -1e-8);

    let sphere = SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 });
    let pairs = sphere_pairs(rng, 50);
    let opts = ShootOptions { steps: 800, ..ShootOptions::default() };
    let errs: Vec<f64> = pairs
        .par_iter()
        .map(|&(p, q, angle)| match shoot_log(&sphere, p, q, &opts) {
            Ok(r) if r.converged => (r.distance - angle).abs(),
            _ => f64::INFINITY,
        })
        .collect();
    t.below("sphere distance error", errs.iter().copied().fold(0.0, f64::max), 1e-6);
    Ok(())
}

fn random_trace(s: &NamedSurface, rng: &mut ChaCha8Rng) -> Result<crate::geodesy::GeodesicPath> {
    let p = s.random_point(rng);
    // on the sphere keep away from the poles of the chart
    let p = if s.name == "sphere" { (p.0, p.1 * 0.4) } else { p };
    let th = if s.name == "sphere" { rng.gen_range(-0.8..0.8) } else { rng.gen_range(0.0..TAU) };
    let w = unit_direction(&s.surface, p, th)?;
    trace_geodesic(&s.surface, p, w, 10.0, 10_000)
}

fn lat_lon(p: Vec3) -> (f64, f64) {
    (p.y.atan2(p.x), p.z.clamp(-1.0, 1.0).asin())
}

/// Random non-antipodal pairs on the unit sphere whose connecting minor arc
/// stays below latitude 1.4, in geographic chart coordinates, with their angle.
pub fn sphere_pairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<((f64, f64), (f64, f64), f64)> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = crate::numcore::sample_unit_sphere(rng);
        let b = crate::numcore::sample_unit_sphere(rng);
        let angle = a.angle_to(b);
        if !(angle > 1e-3 && angle < PI - 0.05) {
            continue;
        }
        let high = (0..=64).any(|k| {
            let s = k as f64 / 64.0;
            let m = ((a * ((1.0 - s) * angle).sin() + b * (s * angle).sin()) / angle.sin()).normalized().unwrap_or(a);
            m.z.abs() > 1.4f64.sin()
        });
        if high {
            continue;
        }
        out.push((lat_lon(a), lat_lon(b), angle));
    }
    out
}

fn transport(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let h = holonomy(&gallery::stereographic_sphere(), &gallery::octant_loop(), 4000)?;
    t.below("octant |holonomy − π/2|", (h - PI / 2.0).abs(), 1e-4);
    let mut worst = 0.0f64;
    for s in gallery::surface_gallery() {
        for _ in 0..10 {
            let c = s.random_loop(rng)?;
            let h = holonomy(&s.surface, &c, 4000)?;
            let psi = total_geodesic_curvature(&s.surface, &c, 1000)?;
            worst = worst.max(angle_mod_tau(h + psi).abs());
        }
    }
    t.below("|holonomy + Ψ| mod 2π", worst, 1e-5);
    Ok(())
}

fn gauss_bonnet_suite(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let sphere = SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 });
    let res = Resolution { boundary: 200, grid: 200 };
    let mut caps = 0.0f64;
    for phi in [0.3, 0.7, 1.1, 1.6, 2.4] {
        let region = Region::Rect { u: (-PI, PI), v: (PI / 2.0 - phi, PI / 2.0) };
        caps = caps.max(gauss_bonnet(&sphere, &gallery::latitude_circle(phi, true), &region, res)?.residual.abs());
    }
    t.below("cap residual", caps, 1e-4);
    let mut rects = 0.0f64;
    for s in gallery::surface_gallery() {
        for _ in 0..5 {
            let (u, v) = s.random_rect(rng);
            let r = gauss_bonnet(&s.surface, &gallery::rect_loop(u, v)?, &Region::Rect { u, v }, res)?;
            rects = rects.max(r.residual.abs());
        }
    }
    t.below("rectangle residual", rects, 1e-4);
    let k = sphere.total_gauss_curvature(&sphere.full_region(), 400)?;
    t.below("sphere |∬K − 4π|", (k - 4.0 * PI).abs(), 1e-3);
    let torus = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
    let chi = gauss_bonnet_general(&torus, &[], &torus.full_region(), Resolution::default())?;
    t.below("torus |χ|", chi.raw.abs(), 0.02);
    Ok(())
}

fn intrinsic(t: &mut Tally) -> Result<()> {
    let sphere = SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 });
    let plane = SurfaceSpec::graph("0", (-3.0, 3.0), (-3.0, 3.0))?;
    let saddle = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
    let (mut gauss, mut jacobi, mut bsin) = (0.0f64, 0.0f64, 0.0f64);
    for (s, p, r) in [(&sphere, (0.3, 0.2), 1.0), (&plane, (0.1, -0.2), 1.0), (&saddle, (0.0, 0.0), 0.5), (&saddle, (0.2, -0.1), 0.4)] {
        let f = polar_field(s, p, r, 200, 24)?;
        if !f.complete() {
            t.fail("polar field", "a ray left the chart");
        }
        gauss = gauss.max(f.gauss_lemma_residual());
        jacobi = jacobi.max(max_abs(&jacobi_residual(&f, s)?));
        if std::ptr::eq(s, &sphere) {
            for ray in &f.rays {
                for (k, n) in ray.iter().enumerate() {
                    bsin = bsin.max((n.b - f.rs[k].sin()).abs());
                }
            }
        }
    }
    t.below("Gauss lemma", gauss, 1e-5);
    t.below("Jacobi residual", jacobi, 1e-3);
    t.below("sphere |b − sin r|", bsin, 1e-5);

    let pts = [(0.3, 0.2), (-0.5, 1.0), (0.7, -2.0), (1.2, 0.6)];
    let mut eg = 0.0f64;
    for b in [
        Builtin::Sphere { radius: 1.0 },
        Builtin::Catenoid { c: 1.0, half_height: 1.5 },
        Builtin::Torus { major: 2.0, minor: 1.0 },
    ] {
        eg = eg.max(egregium_check(&SurfaceSpec::builtin(b), &pts)?);
    }
    let ps = SurfaceSpec::builtin(Builtin::Pseudosphere { s_max: 4.0 });
    eg = eg.max(egregium_check(&ps, &[(0.5, 0.2), (1.3, -1.0), (2.2, 2.0), (3.0, 0.0)])?);
    t.below("Egregium discrepancy", eg, 1e-4);

    let torus = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
    let mut circle = 0.0f64;
    for (s, p) in [(&sphere, (0.4, 0.3)), (&saddle, (0.0, 0.0)), (&torus, (0.0, 0.5)), (&torus, (PI, 0.5)), (&ps, (1.0, 0.0))] {
        let k = s.curvature_report(p.0, p.1)?.gauss;
        let est = geodesic_circle_length(s, p, 0.05, 2048)?.k_estimate;
        circle = circle.max(((est - k) / k).abs());
    }
    t.below("circle K estimate rel. error", circle, 0.05);
    Ok(())
}

fn small_triangles(rng: &mut ChaCha8Rng, n: usize, center: ((f64, f64), (f64, f64)), radius: f64) -> Vec<[(f64, f64); 3]> {
    (0..n)
        .map(|_| {
            let c = (rng.gen_range(center.0 .0..center.0 .1), rng.gen_range(center.1 .0..center.1 .1));
            let base = rng.gen_range(0.0..TAU);
            let mut tri = [(0.0, 0.0); 3];
            for (i, v) in tri.iter_mut().enumerate() {
                let ang = base + TAU * i as f64 / 3.0 + rng.gen_range(-0.6..0.6);
                let r = radius * rng.gen_range(0.4..1.0);
                *v = (c.0 + r * ang.cos(), c.1 + r * ang.sin());
            }
            tri
        })
        .collect()
}

fn comparison(t: &mut Tally, rng: &mut ChaCha8Rng) -> Result<()> {
    let opts = ShootOptions::default();
    let sphere = SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 });
    let tris = small_triangles(rng, 100, ((-PI, PI), (-1.0, 1.0)), 0.15);
    let v = comparison_check(&sphere, &tris, &opts)?;
    let skipped = v.iter().filter(|x| x.skipped.is_some()).count();
    let fat = v.iter().filter(|x| x.skipped.is_none()).map(|x| x.min_margin()).fold(f64::INFINITY, f64::min);
    t.flag("sphere triangles all measured", skipped == 0);
    t.above("sphere min margin", fat, -1e-5);
    let saddle = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
    let tris = small_triangles(rng, 100, ((-0.5, 0.5), (-0.5, 0.5)), 0.15);
    let v = comparison_check(&saddle, &tris, &opts)?;
    let skipped = v.iter().filter(|x| x.skipped.is_some()).count();
    let thin = v.iter().filter(|x| x.skipped.is_none()).map(|x| x.max_margin()).fold(f64::NEG_INFINITY, f64::max);
    t.flag("saddle triangles all measured", skipped == 0);
    t.below("saddle max margin", thin, 1e-5);
    let mut agree = 0;
    let mut tried = 0;
    while tried < 1000 {
        let mut pt = || Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let (p, x, y, z) = (pt(), pt(), pt(), pt());
        let Ok(s) = alexandrov_signs(p, x, y, z) else { continue };
        tried += 1;
        if s.consistent() {
            agree += 1;
        }
    }
    t.flag(&format!("Alexandrov signs agree on {agree}/1000"), agree == 1000);
    Ok(())
}
