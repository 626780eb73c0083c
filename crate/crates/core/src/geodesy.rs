//! Geodesics by the chart ODE: tracing, the exponential map, two-point
//! shooting and conserved-quantity monitors.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::numcore::{rk4_step, OdeTrajectory, Vec2, Vec3};
use crate::surfaces::{Chart, ChartJet, SurfaceSpec};

/// RK4 steps per unit time used by the exponential map.
pub const DEFAULT_EXP_STEPS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
}

impl GeodesicState {
    pub fn new(p: (f64, f64), w: Vec2) -> Self {
        GeodesicState { u: p.0, v: p.1, du: w.x, dv: w.y }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.u, self.v, self.du, self.dv]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        GeodesicState { u: a[0], v: a[1], du: a[2], dv: a[3] }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.u, self.v)
    }

    pub fn velocity(&self) -> Vec2 {
        Vec2::new(self.du, self.dv)
    }
}

/// Quadratic part `s_uu·u′² + 2·s_uv·u′v′ + s_vv·v′²` of `γ″`.
fn quadratic_part(jet: &ChartJet, du: f64, dv: f64) -> Vec3 {
    jet.s_uu * (du * du) + jet.s_uv * (2.0 * du * dv) + jet.s_vv * (dv * dv)
}

fn accel(jet: &ChartJet, du: f64, dv: f64) -> Result<Vec2> {
    let a = quadratic_part(jet, du, dv);
    let f = jet.forms();
    f.first().solve(Vec2::new(-a.dot(jet.s_u), -a.dot(jet.s_v))).ok_or(GeoError::NotPositiveDefinite)
}

/// `(u′, v′, u″, v″)` with `(u″, v″)` making `γ″` normal to the surface.
pub fn geodesic_rhs(surface: &SurfaceSpec, state: &GeodesicState) -> Result<[f64; 4]> {
    let jet = surface.chart_jet(state.u, state.v)?;
    let a = accel(&jet, state.du, state.dv)?;
    Ok([state.du, state.dv, a.x, a.y])
}

/// Embedded acceleration `γ″` of the geodesic through `state`.
pub fn embedded_acceleration(surface: &SurfaceSpec, state: &GeodesicState) -> Result<Vec3> {
    let jet = surface.chart_jet(state.u, state.v)?;
    let a = accel(&jet, state.du, state.dv)?;
    Ok(quadratic_part(&jet, state.du, state.dv) + jet.push(a))
}

pub fn embedded_speed(surface: &SurfaceSpec, state: &GeodesicState) -> Result<f64> {
    let jet = surface.chart_jet(state.u, state.v)?;
    Ok(jet.push(state.velocity()).norm())
}

#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub trajectory: OdeTrajectory<4>,
    pub points: Vec<Vec3>,
    pub speed: Vec<f64>,
    /// Max relative deviation of the speed from its initial value.
    pub speed_drift: f64,
    /// `r·cos θ` on surfaces of revolution.
    pub clairaut: Option<Vec<f64>>,
    pub clairaut_drift: Option<f64>,
    /// Time at which the trace left the chart domain, if it did.
    pub exit_time: Option<f64>,
}

impl GeodesicPath {
    pub fn states(&self) -> impl Iterator<Item = GeodesicState> + '_ {
        self.trajectory.states.iter().map(|s| GeodesicState::from_array(*s))
    }

    pub fn end(&self) -> GeodesicState {
        GeodesicState::from_array(*self.trajectory.states.last().expect("path has a start"))
    }

    pub fn truncated(&self) -> bool {
        self.exit_time.is_some()
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}

enum Flow {
    Done(OdeTrajectory<4>),
    Exited(OdeTrajectory<4>, f64),
}

fn flow(surface: &SurfaceSpec, start: GeodesicState, duration: f64, steps: usize, record: bool) -> Result<Flow> {
    if steps == 0 {
        return Err(GeoError::InvalidArgument("steps must be at least 1".into()));
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(GeoError::InvalidArgument(format!("duration must be ≥ 0, got {duration}")));
    }
    surface.chart_jet(start.u, start.v)?;
    if !surface.domain.contains(start.u, start.v) {
        return Err(GeoError::InvalidArgument(format!("start ({}, {}) is outside the chart domain", start.u, start.v)));
    }
    let h = duration / steps as f64;
    let mut y = start.to_array();
    let mut traj = OdeTrajectory { times: vec![0.0], states: vec![y] };
    let mut rhs = |_t: f64, s: &[f64; 4]| geodesic_rhs(surface, &GeodesicState::from_array(*s));
    for k in 0..steps {
        let t = k as f64 * h;
        let next = match rk4_step(&mut rhs, t, &y, h) {
            Ok(n) => n,
            Err(GeoError::DegenerateChart { .. }) | Err(GeoError::NotPositiveDefinite) | Err(GeoError::Domain { .. }) => {
                return Ok(Flow::Exited(traj, t));
            }
            Err(e) => return Err(e),
        };
        if next.iter().any(|x| !x.is_finite()) {
            return Err(GeoError::Diverged { t: t + h });
        }
        if !surface.domain.contains(next[0], next[1]) || surface.chart_jet(next[0], next[1]).is_err() {
            return Ok(Flow::Exited(traj, t));
        }
        y = next;
        if record || k + 1 == steps {
            traj.times.push(t + h);
            traj.states.push(y);
        }
    }
    Ok(Flow::Done(traj))
}

fn clairaut_value(surface: &SurfaceSpec, s: &GeodesicState, speed: f64) -> Result<Option<f64>> {
    let Chart::Revolution { y, .. } = &surface.chart else {
        return Ok(None);
    };
    let r = y.eval(&[s.u])?;
    Ok(Some(r * r * s.dv / speed))
}

/// Integrates the geodesic from `p` with chart velocity `w` for time `duration`.
/// Leaving the chart domain truncates the path and sets `exit_time`.
pub fn trace_geodesic(surface: &SurfaceSpec, p: (f64, f64), w: Vec2, duration: f64, steps: usize) -> Result<GeodesicPath> {
    let (traj, exit_time) = match flow(surface, GeodesicState::new(p, w), duration, steps, true)? {
        Flow::Done(t) => (t, None),
        Flow::Exited(t, at) => (t, Some(at)),
    };
    let mut points = Vec::with_capacity(traj.len());
    let mut speed = Vec::with_capacity(traj.len());
    let mut clairaut = Vec::new();
    for s in &traj.states {
        let st = GeodesicState::from_array(*s);
        let jet = surface.chart_jet(st.u, st.v)?;
        let sp = jet.push(st.velocity()).norm();
        points.push(jet.p);
        speed.push(sp);
        if sp > 0.0 {
            if let Some(c) = clairaut_value(surface, &st, sp)? {
                clairaut.push(c);
            }
        }
    }
    let s0 = speed[0];
    let speed_drift = if s0 > 0.0 { speed.iter().map(|s| (s - s0).abs() / s0).fold(0.0, f64::max) } else { 0.0 };
    let (clairaut, clairaut_drift) = if clairaut.is_empty() {
        (None, None)
    } else {
        let c0 = clairaut[0];
        let d = clairaut.iter().map(|c| (c - c0).abs()).fold(0.0, f64::max);
        (Some(clairaut), Some(d))
    };
    Ok(GeodesicPath { trajectory: traj, points, speed, speed_drift, clairaut, clairaut_drift, exit_time })
}

/// Max of `|⟨γ″, s_u⟩| + |⟨γ″, s_v⟩|` along a path, with `γ″` from a
/// five-point difference of the embedded samples (interior samples only).
pub fn geodesic_residual(surface: &SurfaceSpec, path: &GeodesicPath) -> Result<f64> {
    let t = &path.trajectory.times;
    let n = path.points.len();
    if n < 5 {
        return Ok(0.0);
    }
    let h = t[1] - t[0];
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        let p = &path.points;
        let acc = (p[i - 2] * -1.0 + p[i - 1] * 16.0 - p[i] * 30.0 + p[i + 1] * 16.0 - p[i + 2]) / (12.0 * h * h);
        let st = GeodesicState::from_array(path.trajectory.states[i]);
        let jet = surface.chart_jet(st.u, st.v)?;
        worst = worst.max(acc.dot(jet.s_u).abs() + acc.dot(jet.s_v).abs());
    }
    Ok(worst)
}

/// Minimum of the height acceleration `z″` along a path.
pub fn min_height_acceleration(surface: &SurfaceSpec, path: &GeodesicPath) -> Result<f64> {
    let mut lo = f64::INFINITY;
    for st in path.states() {
        lo = lo.min(embedded_acceleration(surface, &st)?.z);
    }
    Ok(lo)
}

/// `exp_p(w)`: the chart endpoint of the geodesic with initial velocity `w` at time 1.
pub fn exp_map(surface: &SurfaceSpec, p: (f64, f64), w: Vec2) -> Result<(f64, f64)> {
    exp_map_steps(surface, p, w, DEFAULT_EXP_STEPS)
}

pub fn exp_map_steps(surface: &SurfaceSpec, p: (f64, f64), w: Vec2, steps: usize) -> Result<(f64, f64)> {
    if w == Vec2::ZERO {
        return Ok(p);
    }
    match flow(surface, GeodesicState::new(p, w), 1.0, steps, false)? {
        Flow::Done(t) => {
            let s = t.states.last().expect("nonempty");
            Ok((s[0], s[1]))
        }
        Flow::Exited(_, at) => Err(GeoError::DomainExit { t: at }),
    }
}

/// First-form orthonormal basis `(e1, e2)` of the tangent plane at `p`, in chart components.
pub fn orthonormal_basis(surface: &SurfaceSpec, p: (f64, f64)) -> Result<(Vec2, Vec2)> {
    let f = surface.forms(p.0, p.1)?;
    let e1 = Vec2::new(1.0 / f.e.sqrt(), 0.0);
    let w = Vec2::new(-f.f / f.e, 1.0);
    let e2 = w / f.first().form(w, w).sqrt();
    Ok((e1, e2))
}

/// First-form length of a chart vector at `p`.
pub fn metric_norm(surface: &SurfaceSpec, p: (f64, f64), w: Vec2) -> Result<f64> {
    let f = surface.forms(p.0, p.1)?;
    Ok(f.first().form(w, w).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    pub max_iter: usize,
    /// Embedded endpoint tolerance.
    pub tol: f64,
    pub multistart: bool,
    pub steps: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        ShootOptions { max_iter: 40, tol: 1e-10, multistart: true, steps: DEFAULT_EXP_STEPS }
    }
}

#[derive(Debug, Clone)]
pub struct ShootResult {
    pub w: Vec2,
    pub path: Option<GeodesicPath>,
    pub converged: bool,
    /// `|w|` in the first-form metric on convergence; otherwise the length
    /// of the embedded straight parameter segment from `p` to `q`.
    pub distance: f64,
    /// Embedded endpoint miss of the best candidate.
    pub residual: f64,
}

struct Candidate {
    w: Vec2,
    residual: f64,
    converged: bool,
}

fn newton(surface: &SurfaceSpec, p: (f64, f64), q: (f64, f64), target: Vec3, w0: Vec2, opts: &ShootOptions) -> Candidate {
    let dom = &surface.domain;
    let qv = Vec2::new(q.0, q.1);
    let miss = |w: Vec2| -> Option<(Vec2, f64)> {
        let e = exp_map_steps(surface, p, w, opts.steps).ok()?;
        let pt = surface.point(e.0, e.1).ok()?;
        Some((dom.difference(qv, Vec2::new(e.0, e.1)), pt.distance(target)))
    };
    let mut w = w0;
    let Some((mut f, mut res)) = miss(w) else {
        return Candidate { w, residual: f64::INFINITY, converged: false };
    };
    for _ in 0..opts.max_iter {
        if res < opts.tol {
            break;
        }
        let d = 1e-6 * w.norm().max(1e-2);
        let mut cols = [Vec2::ZERO; 2];
        for (k, e) in [Vec2::new(d, 0.0), Vec2::new(0.0, d)].into_iter().enumerate() {
            match (miss(w + e), miss(w - e)) {
                (Some((a, _)), Some((b, _))) => cols[k] = (a - b) / (2.0 * d),
                _ => return Candidate { w, residual: res, converged: false },
            }
        }
        let jac = crate::numcore::Mat2::new(cols[0].x, cols[1].x, cols[0].y, cols[1].y);
        let Some(step) = jac.solve(-f) else {
            break;
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            if let Some((nf, nres)) = miss(w + step * lambda) {
                if nres < res {
                    w = w + step * lambda;
                    f = nf;
                    res = nres;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Candidate { w, residual: res, converged: res < opts.tol }
}

/// Searches for `w` with `exp_p(w) = q` by damped Newton shooting.
pub fn shoot_log(surface: &SurfaceSpec, p: (f64, f64), q: (f64, f64), opts: &ShootOptions) -> Result<ShootResult> {
    let dom = &surface.domain;
    let (Some(p), Some(q)) = (dom.normalize(p.0, p.1), dom.normalize(q.0, q.1)) else {
        return Err(GeoError::InvalidArgument("shoot_log endpoints must lie in the chart domain".into()));
    };
    let (pv, qv) = (Vec2::new(p.0, p.1), Vec2::new(q.0, q.1));
    let direct = dom.difference(pv, qv);
    let source = surface.point(p.0, p.1)?;
    let target = surface.point(q.0, q.1)?;
    let chord = source.distance(target);
    if chord <= opts.tol {
        return Ok(ShootResult { w: Vec2::ZERO, path: None, converged: true, distance: 0.0, residual: chord });
    }
    let mut starts = vec![(f64::NEG_INFINITY, direct)];
    if opts.multistart {
        let (e1, e2) = orthonormal_basis(surface, p)?;
        for k in 0..8 {
            let th = TAU * k as f64 / 8.0;
            starts.push((th, (e1 * th.cos() + e2 * th.sin()) * chord));
        }
    }
    let cands: Vec<(f64, Candidate)> = starts
        .par_iter()
        .map(|&(angle, w0)| (angle, newton(surface, p, q, target, w0, opts)))
        .collect();
    let mut best: Option<(f64, f64, &Candidate)> = None;
    let mut closest: Option<&Candidate> = None;
    for (angle, c) in &cands {
        if closest.map_or(true, |b| c.residual < b.residual) {
            closest = Some(c);
        }
        if !c.converged {
            continue;
        }
        let dist = metric_norm(surface, p, c.w)?;
        let better = match best {
            None => true,
            Some((bd, ba, _)) => dist < bd - opts.tol || ((dist - bd).abs() <= opts.tol && *angle < ba),
        };
        if better {
            best = Some((dist, *angle, c));
        }
    }
    if let Some((distance, _, c)) = best {
        let path = trace_geodesic(surface, p, c.w, 1.0, opts.steps)?;
        return Ok(ShootResult { w: c.w, path: Some(path), converged: true, distance, residual: c.residual });
    }
    let fallback = segment_length(surface, pv, direct, 512)?;
    let c = closest.expect("at least one start");
    Ok(ShootResult { w: c.w, path: None, converged: false, distance: fallback, residual: c.residual })
}

fn segment_length(surface: &SurfaceSpec, p: Vec2, d: Vec2, n: usize) -> Result<f64> {
    let mut prev = surface.point(p.x, p.y)?;
    let mut total = 0.0;
    for k in 1..=n {
        let x = p + d * (k as f64 / n as f64);
        let cur = surface.point(x.x, x.y)?;
        total += prev.distance(cur);
        prev = cur;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleEstimate {
    pub length: f64,
    /// `3·(2πr − c)/(π·r³)`.
    pub k_estimate: f64,
}

/// Polygonal length of the geodesic circle `{exp_p(r·e(θ))}` and the curvature
/// estimate it implies. Radii beyond the injectivity radius give a closed
/// curve that is not a circle; that is not detected.
pub fn geodesic_circle_length(surface: &SurfaceSpec, p: (f64, f64), r: f64, n_dirs: usize) -> Result<CircleEstimate> {
    if n_dirs < 16 {
        return Err(GeoError::InvalidArgument("geodesic circles need at least 16 directions".into()));
    }
    if !(r > 0.0) {
        return Err(GeoError::InvalidArgument("radius must be positive".into()));
    }
    let (e1, e2) = orthonormal_basis(surface, p)?;
    let pts: Vec<Result<Vec3>> = (0..n_dirs)
        .into_par_iter()
        .map(|k| {
            let th = TAU * k as f64 / n_dirs as f64;
            let w = (e1 * th.cos() + e2 * th.sin()) * r;
            let e = exp_map(surface, p, w).map_err(|err| match err {
                GeoError::DomainExit { t } => {
                    GeoError::InvalidArgument(format!("direction {k} (θ = {th:.6}) leaves the chart at t = {t:.6}"))
                }
                other => other,
            })?;
            surface.point(e.0, e.1)
        })
        .collect();
    let pts = pts.into_iter().collect::<Result<Vec<_>>>()?;
    let length: f64 = (0..n_dirs).map(|k| pts[k].distance(pts[(k + 1) % n_dirs])).sum();
    let k_estimate = 3.0 * (TAU * r - length) / (std::f64::consts::PI * r * r * r);
    Ok(CircleEstimate { length, k_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::Builtin;
    use std::f64::consts::PI;

    fn sphere() -> SurfaceSpec {
        SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 })
    }

    fn plane() -> SurfaceSpec {
        SurfaceSpec::graph("0", (-10.0, 10.0), (-10.0, 10.0)).unwrap()
    }

    #[test]
    fn plane_geodesics_are_lines() {
        let r = geodesic_rhs(&plane(), &GeodesicState { u: 0.3, v: 0.1, du: 1.0, dv: -2.0 }).unwrap();
        assert_eq!(r, [1.0, -2.0, 0.0, 0.0]);
        let e = exp_map(&plane(), (0.5, 0.5), Vec2::new(1.25, -0.75)).unwrap();
        assert!((e.0 - 1.75).abs() < 1e-12 && (e.1 + 0.25).abs() < 1e-12);
        assert_eq!(exp_map(&sphere(), (0.3, 0.2), Vec2::ZERO).unwrap(), (0.3, 0.2));
    }

    #[test]
    fn rhs_kills_tangential_acceleration() {
        let s = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        let st = GeodesicState { u: 0.4, v: 1.1, du: 0.7, dv: -0.3 };
        let a = embedded_acceleration(&s, &st).unwrap();
        let j = s.chart_jet(st.u, st.v).unwrap();
        assert!(a.dot(j.s_u).abs() + a.dot(j.s_v).abs() < 1e-10 * s.scale());
    }

    #[test]
    fn equator_and_cylinder_helix() {
        let path = trace_geodesic(&sphere(), (0.0, 0.0), Vec2::new(1.0, 0.0), TAU, 2000).unwrap();
        assert!(path.points.iter().all(|p| (p.norm() - 1.0).abs() < 1e-8 && p.z.abs() < 1e-12));
        assert!(path.exit_time.is_none());
        let cyl = SurfaceSpec::builtin(Builtin::Cylinder { radius: 1.0, height: 5.0 });
        let path = trace_geodesic(&cyl, (0.0, 0.0), Vec2::new(1.0, 1.0), 3.0, 3000).unwrap();
        for (t, p) in path.trajectory.times.iter().zip(&path.points) {
            assert!((*p - Vec3::new(t.cos(), t.sin(), *t)).norm() < 1e-9);
        }
    }

    #[test]
    fn monitors() {
        let torus = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        let path = trace_geodesic(&torus, (0.3, 0.0), Vec2::new(0.6, 0.35), 10.0, 10_000).unwrap();
        assert!(path.speed_drift < 1e-6);
        assert!(path.clairaut_drift.unwrap() < 1e-6);
        assert!(geodesic_residual(&torus, &path).unwrap() < 1e-7 * torus.scale());
        let bowl = SurfaceSpec::graph("(x^2 + y^2)/2", (-3.0, 3.0), (-3.0, 3.0)).unwrap();
        let path = trace_geodesic(&bowl, (-1.0, 0.5), Vec2::new(1.0, 0.2), 2.5, 5000).unwrap();
        assert!(path.exit_time.is_none());
        assert!(min_height_acceleration(&bowl, &path).unwrap() >= -1e-8);
    }

    #[test]
    fn exits_truncate() {
        let s = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
        let path = trace_geodesic(&s, (0.0, 0.0), Vec2::new(1.0, 0.0), 5.0, 1000).unwrap();
        let t = path.exit_time.unwrap();
        assert!(t > 1.0 && t < 2.0, "{t}");
        assert!(matches!(exp_map(&s, (0.0, 0.0), Vec2::new(3.0, 0.0)), Err(GeoError::DomainExit { .. })));
    }

    #[test]
    fn sphere_exp_reaches_antipode() {
        let e = exp_map_steps(&sphere(), (0.0, 0.0), Vec2::new(PI, 0.0), 2000).unwrap();
        let q = sphere().point(e.0, e.1).unwrap();
        assert!((q - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn reparametrization() {
        let s = SurfaceSpec::builtin(Builtin::Catenoid { c: 1.0, half_height: 1.5 });
        let w = Vec2::new(0.2, 0.5);
        let lam = 2.0;
        let a = trace_geodesic(&s, (0.1, 0.0), w, 2.0, 4000).unwrap().end();
        let b = trace_geodesic(&s, (0.1, 0.0), w * lam, 2.0 / lam, 4000).unwrap().end();
        assert!((a.u - b.u).abs() < 1e-8 && (a.v - b.v).abs() < 1e-8);
    }

    #[test]
    fn shooting() {
        let r = shoot_log(&plane(), (0.0, 0.0), (1.0, 2.0), &ShootOptions::default()).unwrap();
        assert!(r.converged && (r.distance - 5f64.sqrt()).abs() < 1e-9);
        let s = sphere();
        let (p, q) = ((0.2, 0.3), (1.4, -0.5));
        let r = shoot_log(&s, p, q, &ShootOptions::default()).unwrap();
        let angle = s.point(p.0, p.1).unwrap().angle_to(s.point(q.0, q.1).unwrap());
        assert!(r.converged && (r.distance - angle).abs() < 1e-6, "{} vs {angle}", r.distance);
        let back = shoot_log(&s, q, p, &ShootOptions::default()).unwrap();
        assert!((back.distance - r.distance).abs() < 2e-10 + 1e-9);
        // across the periodic seam
        let r = shoot_log(&s, (3.0, 0.1), (-3.0, 0.2), &ShootOptions::default()).unwrap();
        let angle = s.point(3.0, 0.1).unwrap().angle_to(s.point(-3.0, 0.2).unwrap());
        assert!(r.converged && (r.distance - angle).abs() < 1e-6);
    }

    #[test]
    fn near_antipodal_sphere_pair() {
        let s = sphere();
        let r = shoot_log(&s, (0.0, 0.0), (PI - 1e-3, 0.0), &ShootOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.distance - PI).abs() < 1e-2 && (r.distance - (PI - 1e-3)).abs() < 1e-6);
    }

    #[test]
    fn geodesic_circles() {
        let c = geodesic_circle_length(&plane(), (0.0, 0.0), 0.5, 64).unwrap();
        assert!((c.length - 64.0 * (PI / 64.0).sin()).abs() < 1e-12);
        let c = geodesic_circle_length(&sphere(), (0.4, 0.2), 0.1, 2048).unwrap();
        assert!((c.length - TAU * 0.1f64.sin()).abs() < 1e-6);
        assert!((c.k_estimate - 1.0).abs() < 1e-2);
        let saddle = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
        let c = geodesic_circle_length(&saddle, (0.0, 0.0), 0.05, 2048).unwrap();
        assert!((c.k_estimate + 4.0).abs() < 0.2, "{}", c.k_estimate);
    }
}
