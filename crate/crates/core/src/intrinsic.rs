//! Intrinsic geometry: polar coordinates, Gauss-lemma and Jacobi residuals,
//! intrinsic curvature formulas, and comparison-triangle checks.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::exprparse::Expr;
use crate::geodesy::{embedded_acceleration, exp_map, orthonormal_basis, shoot_log, GeodesicState, ShootOptions};
use crate::numcore::{rk4_step, Vec2, Vec3};
use crate::surfaces::SurfaceSpec;

/// Step of the directional difference used to linearize the geodesic flow.
const LINEARIZE_EPS: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarNode {
    pub u: f64,
    pub v: f64,
    /// `|s_θ|`.
    pub b: f64,
    /// `|s_r|`.
    pub radial_speed: f64,
    pub s_r: Vec3,
    pub s_theta: Vec3,
    /// `∂_r s_r`, the embedded geodesic acceleration.
    pub d_r_s_r: Vec3,
    /// `∂_θ s_r`.
    pub d_theta_s_r: Vec3,
}

/// Polar coordinates around a base point: geodesic rays at `nθ` angles sampled at `nr + 1` radii.
#[derive(Debug, Clone)]
pub struct PolarField {
    pub base: (f64, f64),
    pub r_max: f64,
    pub rs: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `rays[j][k]` is the node at `thetas[j]`, `rs[k]`; rays that leave the chart are shorter.
    pub rays: Vec<Vec<PolarNode>>,
}

fn rhs8(surface: &SurfaceSpec, y: &[f64; 8]) -> Result<[f64; 8]> {
    let s = [y[0], y[1], y[2], y[3]];
    let f = crate::geodesy::geodesic_rhs(surface, &GeodesicState::from_array(s))?;
    let j = [y[4], y[5], y[6], y[7]];
    let jn = j.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut dj = [0.0; 4];
    if jn > 0.0 {
        let e = LINEARIZE_EPS;
        let shift = |sg: f64| {
            let mut z = s;
            for i in 0..4 {
                z[i] += sg * e * j[i] / jn;
            }
            crate::geodesy::geodesic_rhs(surface, &GeodesicState::from_array(z))
        };
        let (a, b) = (shift(1.0)?, shift(-1.0)?);
        for i in 0..4 {
            dj[i] = (a[i] - b[i]) / (2.0 * e) * jn;
        }
    }
    Ok([f[0], f[1], f[2], f[3], dj[0], dj[1], dj[2], dj[3]])
}

fn node(surface: &SurfaceSpec, y: &[f64; 8]) -> Result<PolarNode> {
    let jet = surface.chart_jet(y[0], y[1])?;
    let (du, dv) = (y[2], y[3]);
    let (ju, jv) = (y[4], y[5]);
    let s_r = jet.push(Vec2::new(du, dv));
    let s_theta = jet.push(Vec2::new(ju, jv));
    let d_theta_s_r = (jet.s_uu * ju + jet.s_uv * jv) * du + (jet.s_uv * ju + jet.s_vv * jv) * dv + jet.push(Vec2::new(y[6], y[7]));
    let d_r_s_r = embedded_acceleration(surface, &GeodesicState::from_array([y[0], y[1], du, dv]))?;
    Ok(PolarNode { u: y[0], v: y[1], b: s_theta.norm(), radial_speed: s_r.norm(), s_r, s_theta, d_r_s_r, d_theta_s_r })
}

/// Integrates unit-speed geodesic rays and their Jacobi fields `∂_θ` from `p`.
pub fn polar_field(surface: &SurfaceSpec, p: (f64, f64), r_max: f64, nr: usize, ntheta: usize) -> Result<PolarField> {
    if nr < 2 || ntheta < 3 || !(r_max > 0.0) {
        return Err(GeoError::InvalidArgument("polar field needs nr ≥ 2, nθ ≥ 3 and r_max > 0".into()));
    }
    let (e1, e2) = orthonormal_basis(surface, p)?;
    let h = r_max / nr as f64;
    let rs: Vec<f64> = (0..=nr).map(|k| k as f64 * h).collect();
    let thetas: Vec<f64> = (0..ntheta).map(|j| TAU * j as f64 / ntheta as f64).collect();
    let rays: Vec<Result<Vec<PolarNode>>> = thetas
        .par_iter()
        .map(|&th| {
            let (s, c) = th.sin_cos();
            let w = e1 * c + e2 * s;
            let dw = e2 * c - e1 * s;
            let mut y = [p.0, p.1, w.x, w.y, 0.0, 0.0, dw.x, dw.y];
            let mut out = vec![node(surface, &y)?];
            let mut rhs = |_t: f64, z: &[f64; 8]| rhs8(surface, z);
            for k in 0..nr {
                let next = match rk4_step(&mut rhs, k as f64 * h, &y, h) {
                    Ok(n) => n,
                    Err(GeoError::DegenerateChart { .. }) | Err(GeoError::NotPositiveDefinite) => break,
                    Err(e) => return Err(e),
                };
                if !surface.domain.contains(next[0], next[1]) {
                    break;
                }
                let Ok(nd) = node(surface, &next) else { break };
                y = next;
                out.push(nd);
            }
            Ok(out)
        })
        .collect();
    let rays = rays.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(PolarField { base: p, r_max, rs, thetas, rays })
}

impl PolarField {
    pub fn h(&self) -> f64 {
        self.rs[1] - self.rs[0]
    }

    /// Whether every ray reached `r_max`.
    pub fn complete(&self) -> bool {
        self.rays.iter().all(|r| r.len() == self.rs.len())
    }

    /// Max of `|⟨s_θ, s_r⟩| / |s_θ|` over nodes with `r > 0`.
    pub fn gauss_lemma_residual(&self) -> f64 {
        self.rays
            .iter()
            .flat_map(|r| r.iter().skip(1))
            .map(|n| n.s_theta.dot(n.s_r).abs() / n.b)
            .fold(0.0, f64::max)
    }

    /// Max deviation of `|s_r|` from 1.
    pub fn radial_speed_defect(&self) -> f64 {
        self.rays.iter().flatten().map(|n| (n.radial_speed - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `b_r` at node `k` of ray `j` from central differences (one-sided at the ends).
    pub fn b_r(&self, j: usize, k: usize) -> f64 {
        let ray = &self.rays[j];
        let h = self.h();
        if k == 0 {
            (-3.0 * ray[0].b + 4.0 * ray[1].b - ray[2].b) / (2.0 * h)
        } else if k + 1 == ray.len() {
            (3.0 * ray[k].b - 4.0 * ray[k - 1].b + ray[k - 2].b) / (2.0 * h)
        } else {
            (ray[k + 1].b - ray[k - 1].b) / (2.0 * h)
        }
    }

    /// Max over interior nodes of `|⟨u⃗_r, u⃗⟩|`, `|⟨u⃗_r, v⃗⟩|`, `|⟨u⃗_θ, u⃗⟩|` and
    /// `|⟨u⃗_θ, v⃗⟩ − b_r|`, where `u⃗ = s_r` and `v⃗ = s_θ / b`.
    pub fn semigeodesic_identities(&self) -> [f64; 4] {
        let mut m = [0.0f64; 4];
        for (j, ray) in self.rays.iter().enumerate() {
            for k in 1..ray.len().saturating_sub(1) {
                let n = &ray[k];
                let vv = n.s_theta / n.b;
                m[0] = m[0].max(n.d_r_s_r.dot(n.s_r).abs());
                m[1] = m[1].max(n.d_r_s_r.dot(vv).abs());
                m[2] = m[2].max(n.d_theta_s_r.dot(n.s_r).abs());
                m[3] = m[3].max((n.d_theta_s_r.dot(vv) - self.b_r(j, k)).abs());
            }
        }
        m
    }
}

/// `b_rr + K·b` at interior nodes, with `b_rr` from second differences and `K` from the shape operator.
pub fn jacobi_residual(field: &PolarField, surface: &SurfaceSpec) -> Result<Vec<Vec<f64>>> {
    if field.rs.len() < 6 {
        return Err(GeoError::InvalidArgument("the Jacobi residual needs nr ≥ 5".into()));
    }
    let h = field.h();
    field
        .rays
        .par_iter()
        .map(|ray| {
            let mut out = Vec::with_capacity(ray.len());
            for k in 1..ray.len().saturating_sub(1) {
                let b_rr = (ray[k + 1].b - 2.0 * ray[k].b + ray[k - 1].b) / (h * h);
                let k_gauss = surface.curvature_report(ray[k].u, ray[k].v)?.gauss;
                out.push(b_rr + k_gauss * ray[k].b);
            }
            Ok(out)
        })
        .collect()
}

pub fn max_abs(grid: &[Vec<f64>]) -> f64 {
    grid.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Step of the outer central difference in [`intrinsic_k_orthogonal`].
pub const ORTHOGONAL_STEP: f64 = 1e-3;

/// `K = −(1/(a·b))·(∂_u(b_u/a) + ∂_v(a_v/b))` with `a = |s_u|`, `b = |s_v|`.
/// Inner derivatives come from first-form jets, the outer ones from a
/// five-point stencil of step `h`.
pub fn intrinsic_k_orthogonal(surface: &SurfaceSpec, u: f64, v: f64, h: f64) -> Result<f64> {
    let lengths = |u: f64, v: f64| -> Result<(f64, f64, f64, f64)> {
        let [_, su, sv, _, suv, _] = surface.raw_jet(u, v)?;
        let (a, b) = (su.norm(), sv.norm());
        let f = su.dot(sv);
        if f.abs() > 1e-8 * a * b {
            return Err(GeoError::NonOrthogonalChart { u, v, f });
        }
        if !(a > 0.0 && b > 0.0) {
            return Err(GeoError::DegenerateChart { u, v });
        }
        Ok((a, b, su.dot(suv) / a, sv.dot(suv) / b))
    };
    let (a, b, _, _) = lengths(u, v)?;
    let (ap, _, _, b_u_p) = lengths(u + h, v)?;
    let (am, _, _, b_u_m) = lengths(u - h, v)?;
    let (_, bp, a_v_p, _) = lengths(u, v + h)?;
    let (_, bm, a_v_m, _) = lengths(u, v - h)?;
    let du = (b_u_p / ap - b_u_m / am) / (2.0 * h);
    let dv = (a_v_p / bp - a_v_m / bm) / (2.0 * h);
    Ok(-(du + dv) / (a * b))
}

/// `K = −Δ(ln b)/b²` for the metric `b²·(du² + dv²)`, exactly from jets.
pub fn intrinsic_k_conformal(b: &Expr, u: f64, v: f64) -> Result<f64> {
    let j = b.eval_jet2x2(u, v)?;
    if !(j.f > 0.0) {
        return Err(GeoError::InvalidArgument(format!("conformal factor must be positive, b({u}, {v}) = {}", j.f)));
    }
    let grad2 = j.f_u * j.f_u + j.f_v * j.f_v;
    let lap_ln = j.laplacian() / j.f - grad2 / (j.f * j.f);
    Ok(-lap_ln / (j.f * j.f))
}

/// Max of `|K_shape − K_intrinsic|` over the points.
pub fn egregium_check(surface: &SurfaceSpec, points: &[(f64, f64)]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &(u, v) in points {
        let ext = surface.curvature_report(u, v)?.gauss;
        let int = intrinsic_k_orthogonal(surface, u, v, ORTHOGONAL_STEP)?;
        worst = worst.max((ext - int).abs());
    }
    Ok(worst)
}

/// Model angle between sides `a` and `b` opposite `c`.
pub fn model_angle(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && c >= 0.0) {
        return Err(GeoError::InvalidArgument("model angle needs positive sides".into()));
    }
    if c > a + b || a > b + c || b > a + c {
        return Err(GeoError::DegenerateConfiguration(format!("sides {a}, {b}, {c} violate the triangle inequality")));
    }
    Ok(((a * a + b * b - c * c) / (2.0 * a * b)).clamp(-1.0, 1.0).acos())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelTriangle {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Angles opposite `a`, `b`, `c`.
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub degenerate: bool,
}

impl ModelTriangle {
    pub fn new(a: f64, b: f64, c: f64) -> Result<ModelTriangle> {
        let alpha = model_angle(b, c, a)?;
        let beta = model_angle(a, c, b)?;
        let gamma = model_angle(a, b, c)?;
        let s = a.max(b).max(c);
        let degenerate = a + b + c - 2.0 * s <= 1e-12 * s;
        Ok(ModelTriangle { a, b, c, alpha, beta, gamma, degenerate })
    }
}

/// First-form angle at `p` between the shortest-path directions to `q1` and `q2`.
pub fn hinge_angle(surface: &SurfaceSpec, p: (f64, f64), q1: (f64, f64), q2: (f64, f64), opts: &ShootOptions) -> Result<f64> {
    let r1 = shoot_log(surface, p, q1, opts)?;
    let r2 = shoot_log(surface, p, q2, opts)?;
    if !(r1.converged && r2.converged) {
        return Err(GeoError::NoConvergence { residual: r1.residual.max(r2.residual) });
    }
    angle_between(surface, p, r1.w, r2.w)
}

fn angle_between(surface: &SurfaceSpec, p: (f64, f64), a: Vec2, b: Vec2) -> Result<f64> {
    let f = surface.forms(p.0, p.1)?.first();
    let c = f.form(a, b) / (f.form(a, a) * f.form(b, b)).sqrt();
    Ok(c.clamp(-1.0, 1.0).acos())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleVerdict {
    pub vertices: [(f64, f64); 3],
    pub sides: [f64; 3],
    /// Measured minus model angle at each vertex.
    pub angle_margins: [f64; 3],
    /// Distance from each vertex to the midpoint of the opposite side, minus the model distance.
    pub midpoint_margins: [f64; 3],
    pub skipped: Option<String>,
}

impl TriangleVerdict {
    pub fn min_margin(&self) -> f64 {
        self.angle_margins.iter().chain(&self.midpoint_margins).copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_margin(&self) -> f64 {
        self.angle_margins.iter().chain(&self.midpoint_margins).copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn triangle_verdict(surface: &SurfaceSpec, tri: [(f64, f64); 3], opts: &ShootOptions) -> Result<TriangleVerdict> {
    let skip = |reason: String| TriangleVerdict {
        vertices: tri,
        sides: [f64::NAN; 3],
        angle_margins: [f64::NAN; 3],
        midpoint_margins: [f64::NAN; 3],
        skipped: Some(reason),
    };
    // shots[i][j]: from vertex i to vertex j
    let mut shots: Vec<Vec<Option<crate::geodesy::ShootResult>>> = vec![vec![None, None, None], vec![None, None, None], vec![None, None, None]];
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let r = shoot_log(surface, tri[i], tri[j], opts)?;
            if !r.converged || r.path.is_none() {
                return Ok(skip(format!("side {i}-{j} did not converge (residual {:.3e})", r.residual)));
            }
            shots[i][j] = Some(r);
        }
    }
    let d = |i: usize, j: usize| shots[i][j].as_ref().expect("shot").distance;
    let sides = [d(1, 2), d(0, 2), d(0, 1)];
    let mut angle_margins = [0.0; 3];
    let mut midpoint_margins = [0.0; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let (wj, wk) = (shots[i][j].as_ref().expect("shot").w, shots[i][k].as_ref().expect("shot").w);
        let measured = angle_between(surface, tri[i], wj, wk)?;
        let model = match model_angle(d(i, j), d(i, k), d(j, k)) {
            Ok(m) => m,
            Err(e) => return Ok(skip(e.to_string())),
        };
        angle_margins[i] = measured - model;
        let path = shots[j][k].as_ref().expect("shot").path.as_ref().expect("path");
        let mid = path.trajectory.states[path.trajectory.len() / 2];
        let mid = surface.domain.normalize(mid[0], mid[1]).unwrap_or((mid[0], mid[1]));
        let to_mid = shoot_log(surface, tri[i], mid, opts)?;
        if !to_mid.converged {
            return Ok(skip(format!("median from vertex {i} did not converge")));
        }
        let (a, b, c) = (d(i, j), d(i, k), d(j, k));
        let model_median = (0.5 * a * a + 0.5 * b * b - 0.25 * c * c).max(0.0).sqrt();
        midpoint_margins[i] = to_mid.distance - model_median;
    }
    Ok(TriangleVerdict { vertices: tri, sides, angle_margins, midpoint_margins, skipped: None })
}

/// Angle and median comparison against model triangles. Positive margins
/// witness fat triangles, negative ones thin triangles.
pub fn comparison_check(surface: &SurfaceSpec, triangles: &[[(f64, f64); 3]], opts: &ShootOptions) -> Result<Vec<TriangleVerdict>> {
    let inner = ShootOptions { multistart: false, ..*opts };
    triangles.par_iter().map(|t| triangle_verdict(surface, *t, &inner)).collect()
}

fn unsigned_angle(at: Vec2, a: Vec2, b: Vec2) -> f64 {
    let (x, y) = (a - at, b - at);
    x.cross(y).abs().atan2(x.dot(y))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlexandrovSigns {
    pub values: [f64; 3],
    pub signs: [i8; 3],
}

impl AlexandrovSigns {
    /// Whether the nonzero signs agree.
    pub fn consistent(&self) -> bool {
        let nz: Vec<i8> = self.signs.iter().copied().filter(|s| *s != 0).collect();
        nz.windows(2).all(|w| w[0] == w[1])
    }
}

/// For a plane quadrilateral `pxyz`, builds `p′x′y′z′` with equal sides and
/// `y′` on `[x′, z′]`, and returns `|p−y| − |p′−y′|`, `∠x(p,y) − ∠x′(p′,y′)`
/// and `π − ∠y(p,x) − ∠y(p,z)`.
pub fn alexandrov_signs(p: Vec2, x: Vec2, y: Vec2, z: Vec2) -> Result<AlexandrovSigns> {
    let (px, xy, yz, zp) = ((p - x).norm(), (x - y).norm(), (y - z).norm(), (z - p).norm());
    let scale = px.max(xy).max(yz).max(zp);
    if [px, xy, yz, zp, (p - y).norm()].iter().any(|d| *d <= 1e-12 * scale) {
        return Err(GeoError::DegenerateConfiguration("coincident points".into()));
    }
    let xz = xy + yz;
    // p′ from |p′x′| = px, |p′z′| = zp with x′ = 0, z′ = (xz, 0)
    let a = (px * px - zp * zp + xz * xz) / (2.0 * xz);
    let h2 = px * px - a * a;
    if !(h2 > 1e-24 * scale * scale) {
        return Err(GeoError::DegenerateConfiguration("p′ would be collinear with x′z′".into()));
    }
    let p2 = Vec2::new(a, h2.sqrt());
    let (x2, y2) = (Vec2::ZERO, Vec2::new(xy, 0.0));
    let values = [
        (p - y).norm() - (p2 - y2).norm(),
        unsigned_angle(x, p, y) - unsigned_angle(x2, p2, y2),
        PI - unsigned_angle(y, p, x) - unsigned_angle(y, p, z),
    ];
    let tol = [1e-10 * scale, 1e-10, 1e-10];
    let mut signs = [0i8; 3];
    for i in 0..3 {
        signs[i] = if values[i].abs() <= tol[i] { 0 } else { values[i].signum() as i8 };
    }
    Ok(AlexandrovSigns { values, signs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RauchMargin {
    pub embedded: f64,
    pub preimage: f64,
    /// `embedded − preimage`.
    pub margin: f64,
}

/// Compares the length of a closed tangent-plane polygon (orthonormal coordinates
/// at `p`) against the length of its image under `exp_p`.
pub fn rauch_check(surface: &SurfaceSpec, p: (f64, f64), polygon: &[Vec2], r_max: f64) -> Result<RauchMargin> {
    if polygon.len() < 3 {
        return Err(GeoError::InvalidArgument("need a closed polygon of at least 3 points".into()));
    }
    if polygon.iter().any(|w| w.norm() > r_max) {
        return Err(GeoError::InvalidArgument("polygon leaves the polar disk".into()));
    }
    let (e1, e2) = orthonormal_basis(surface, p)?;
    let pts: Vec<Result<Vec3>> = polygon
        .par_iter()
        .map(|w| {
            let q = exp_map(surface, p, e1 * w.x + e2 * w.y)?;
            surface.point(q.0, q.1)
        })
        .collect();
    let pts = pts.into_iter().collect::<Result<Vec<_>>>()?;
    let n = polygon.len();
    let embedded: f64 = (0..n).map(|i| pts[i].distance(pts[(i + 1) % n])).sum();
    let preimage: f64 = (0..n).map(|i| (polygon[(i + 1) % n] - polygon[i]).norm()).sum();
    Ok(RauchMargin { embedded, preimage, margin: embedded - preimage })
}

/// Regular `n`-gon of radius `r` in the tangent plane.
pub fn tangent_circle(r: f64, n: usize) -> Vec<Vec2> {
    (0..n).map(|k| Vec2::from_angle(TAU * k as f64 / n as f64) * r).collect()
}

/// Geodesic distance from `p` to `q` by shooting, for callers that only need the number.
pub fn distance(surface: &SurfaceSpec, p: (f64, f64), q: (f64, f64), opts: &ShootOptions) -> Result<f64> {
    let r = shoot_log(surface, p, q, opts)?;
    if !r.converged {
        return Err(GeoError::NoConvergence { residual: r.residual });
    }
    Ok(r.distance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::Builtin;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sphere() -> SurfaceSpec {
        SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 })
    }

    fn plane() -> SurfaceSpec {
        SurfaceSpec::graph("0", (-5.0, 5.0), (-5.0, 5.0)).unwrap()
    }

    #[test]
    fn polar_field_on_plane_and_sphere() {
        let f = polar_field(&plane(), (0.2, 0.1), 1.0, 50, 12).unwrap();
        for ray in &f.rays {
            for (k, n) in ray.iter().enumerate() {
                assert!((n.b - f.rs[k]).abs() < 1e-9);
            }
        }
        let f = polar_field(&sphere(), (0.3, 0.2), 1.0, 200, 16).unwrap();
        assert!(f.complete());
        for ray in &f.rays {
            for (k, n) in ray.iter().enumerate() {
                assert!((n.b - f.rs[k].sin()).abs() < 1e-5);
            }
        }
        assert!(f.gauss_lemma_residual() < 1e-5);
        assert!(f.radial_speed_defect() < 1e-6);
        assert!((0..16).all(|j| (f.b_r(j, 0) - 1.0).abs() < 1e-3));
        let id = f.semigeodesic_identities();
        assert!(id[0] < 1e-5 && id[1] < 1e-5 && id[2] < 1e-5 && id[3] < 1e-4, "{id:?}");
        assert!(max_abs(&jacobi_residual(&f, &sphere()).unwrap()) < 1e-4);
    }

    #[test]
    fn saddle_b_dominates_r() {
        let s = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
        let f = polar_field(&s, (0.0, 0.0), 0.5, 100, 16).unwrap();
        assert!(f.complete());
        for ray in &f.rays {
            for (k, n) in ray.iter().enumerate() {
                assert!(n.b >= f.rs[k] - 1e-6);
            }
        }
        assert!(f.gauss_lemma_residual() < 1e-5);
        assert!(max_abs(&jacobi_residual(&f, &s).unwrap()) < 1e-3);
    }

    #[test]
    fn pseudosphere_jacobi() {
        let s = SurfaceSpec::builtin(Builtin::Pseudosphere { s_max: 4.0 });
        let f = polar_field(&s, (1.5, 0.0), 0.5, 100, 12).unwrap();
        assert!(max_abs(&jacobi_residual(&f, &s).unwrap()) < 1e-3);
    }

    #[test]
    fn intrinsic_formulas() {
        let k = intrinsic_k_orthogonal(&sphere(), 0.4, 0.3, ORTHOGONAL_STEP).unwrap();
        assert!((k - 1.0).abs() < 1e-4);
        let flat = SurfaceSpec::parametric("u", "v", "0", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        assert_eq!(intrinsic_k_orthogonal(&flat, 0.1, 0.2, ORTHOGONAL_STEP).unwrap(), 0.0);
        let saddle = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
        assert!(matches!(intrinsic_k_orthogonal(&saddle, 0.3, 0.4, 1e-3), Err(GeoError::NonOrthogonalChart { .. })));
        let st = Expr::parse("2/(1 + u^2 + v^2)", &["u", "v"]).unwrap();
        assert!((intrinsic_k_conformal(&st, 0.3, -0.7).unwrap() - 1.0).abs() < 1e-10);
        let hp = Expr::parse("1/v", &["u", "v"]).unwrap();
        assert!((intrinsic_k_conformal(&hp, 0.3, 0.7).unwrap() + 1.0).abs() < 1e-10);
        let one = Expr::parse("1", &["u", "v"]).unwrap();
        assert_eq!(intrinsic_k_conformal(&one, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn egregium_on_builtins() {
        let pts = [(0.3, 0.2), (-0.5, 1.0), (0.7, -2.0)];
        for b in [
            Builtin::Sphere { radius: 1.0 },
            Builtin::Catenoid { c: 1.0, half_height: 1.5 },
            Builtin::Torus { major: 2.0, minor: 1.0 },
        ] {
            assert!(egregium_check(&SurfaceSpec::builtin(b), &pts).unwrap() < 1e-4, "{b:?}");
        }
        let ps = SurfaceSpec::builtin(Builtin::Pseudosphere { s_max: 4.0 });
        assert!(egregium_check(&ps, &[(0.5, 0.1), (2.0, -1.0)]).unwrap() < 1e-4);
        let cyl = SurfaceSpec::builtin(Builtin::Cylinder { radius: 1.0, height: 1.0 });
        assert!(egregium_check(&cyl, &pts[..1]).unwrap() < 1e-8);
    }

    #[test]
    fn model_triangles() {
        let t = ModelTriangle::new(3.0, 4.0, 5.0).unwrap();
        assert!((t.gamma - PI / 2.0).abs() < 1e-12);
        assert!((t.alpha + t.beta + t.gamma - PI).abs() < 1e-12);
        assert!(ModelTriangle::new(1.0, 1.0, 2.0).unwrap().degenerate);
        assert!(model_angle(1.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn comparison_on_plane_sphere_saddle() {
        let opts = ShootOptions::default();
        let flat = comparison_check(&plane(), &[[(0.0, 0.0), (1.0, 0.2), (0.3, 0.9)]], &opts).unwrap();
        assert!(flat[0].skipped.is_none());
        assert!(flat[0].min_margin() > -1e-6 && flat[0].max_margin() < 1e-6);
        let sph = comparison_check(&sphere(), &[[(0.0, 0.0), (0.3, 0.05), (0.1, 0.25)]], &opts).unwrap();
        assert!(sph[0].min_margin() >= -1e-5, "{:?}", sph[0]);
        let saddle = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
        let th = comparison_check(&saddle, &[[(-0.1, -0.1), (0.2, -0.05), (0.0, 0.2)]], &opts).unwrap();
        assert!(th[0].max_margin() <= 1e-5, "{:?}", th[0]);
    }

    #[test]
    fn alexandrov() {
        let (x, z) = (Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0));
        let y = Vec2::new(1.0, 0.0);
        let p = Vec2::new(1.0, 1.5);
        let s = alexandrov_signs(p, x, y, z).unwrap();
        assert_eq!(s.signs, [0, 0, 0]);
        let s = alexandrov_signs(p, x, Vec2::new(1.0, -0.2), z).unwrap();
        assert_eq!(s.signs, [1, 1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 1000 {
            let mut pt = || Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (p, x, y, z) = (pt(), pt(), pt(), pt());
            let Ok(s) = alexandrov_signs(p, x, y, z) else { continue };
            assert!(s.consistent(), "{p:?} {x:?} {y:?} {z:?}: {:?}", s.values);
            checked += 1;
        }
    }

    #[test]
    fn rauch() {
        let m = rauch_check(&plane(), (0.0, 0.0), &tangent_circle(0.5, 64), 1.0).unwrap();
        assert!(m.margin.abs() < 1e-9);
        let m = rauch_check(&sphere(), (0.1, 0.2), &tangent_circle(0.5, 256), 1.0).unwrap();
        assert!(m.margin <= 1e-6);
        let s = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
        let m = rauch_check(&s, (0.0, 0.0), &tangent_circle(0.3, 256), 0.5).unwrap();
        assert!(m.margin >= -1e-6);
    }
}
