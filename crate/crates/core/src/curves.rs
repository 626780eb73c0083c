//! Curves in the plane and in space: length, Frenet apparatus, total
//! curvature, osculating objects, vertices and Crofton-type length estimates.

use std::f64::consts::{PI, TAU};

use nalgebra::{SMatrix, SVector};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::exprparse::Expr;
use crate::numcore::{pairwise_sum, sample_unit_circle, sample_unit_sphere, try_quad_simpson, Vec2, Vec3};

/// Speeds below this are treated as a stopped parametrization.
pub const SPEED_FLOOR: f64 = 1e-12;

/// Relative constant of the curvature floor, see [`CurveSpec::curvature_floor`].
pub const CURVATURE_FLOOR: f64 = 1e-9;

const PERIODIC_TOL: f64 = 1e-8;
const CROFTON_SEGMENTS: usize = 4096;

/// A curve given by three expressions of `t`.
#[derive(Debug, Clone)]
pub struct AnalyticCurve {
    pub x: Expr,
    pub y: Expr,
    pub z: Expr,
    pub t0: f64,
    pub t1: f64,
    pub closed: bool,
}

/// An ordered list of points with optional parameter values.
///
/// Closed sampled curves do not repeat their first point; `period_end` is the
/// parameter at which the curve returns to `points[0]`.
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub points: Vec<Vec3>,
    pub params: Vec<f64>,
    pub closed: bool,
    pub period_end: Option<f64>,
}

#[derive(Debug, Clone)]
pub enum CurveSpec {
    Analytic(AnalyticCurve),
    Sampled(SampledCurve),
}

/// Position and the first three parameter derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub p: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub t: f64,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub kappa: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneFrenetData {
    pub t: f64,
    pub tangent: Vec2,
    /// `tangent` rotated by +π/2.
    pub normal: Vec2,
    pub k_signed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsculatingCircle {
    pub center: Vec2,
    pub radius: f64,
}

fn parse_t(text: &str) -> Result<Expr> {
    Ok(Expr::parse(text, &["t"])?)
}

impl CurveSpec {
    /// Space curve from expressions in `t`; closed curves are checked for
    /// position and velocity periodicity.
    pub fn analytic(x: &str, y: &str, z: &str, t0: f64, t1: f64, closed: bool) -> Result<CurveSpec> {
        CurveSpec::from_exprs(parse_t(x)?, parse_t(y)?, parse_t(z)?, t0, t1, closed)
    }

    /// Plane curve `(x(t), y(t), 0)`.
    pub fn plane(x: &str, y: &str, t0: f64, t1: f64, closed: bool) -> Result<CurveSpec> {
        CurveSpec::analytic(x, y, "0", t0, t1, closed)
    }

    pub fn from_exprs(x: Expr, y: Expr, z: Expr, t0: f64, t1: f64, closed: bool) -> Result<CurveSpec> {
        if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
            return Err(GeoError::InvalidArgument(format!("curve domain [{t0}, {t1}] is empty")));
        }
        for e in [&x, &y, &z] {
            if e.variables() != ["t"] {
                return Err(GeoError::InvalidArgument("curve expressions must be in the single variable `t`".into()));
            }
        }
        let c = CurveSpec::Analytic(AnalyticCurve { x, y, z, t0, t1, closed });
        if closed {
            let a = c.jet(t0)?;
            let b = c.jet(t1)?;
            let gap = (a.p - b.p).norm().max((a.d1 - b.d1).norm());
            let scale = 1.0 + a.p.norm().max(a.d1.norm());
            if gap > PERIODIC_TOL * scale {
                return Err(GeoError::NotPeriodic { gap });
            }
        }
        Ok(c)
    }

    /// Sampled curve. Without `params` the cumulative chord length is used.
    /// A closed curve may repeat its first point at the end, and may carry one
    /// more parameter than points (the period end).
    pub fn sampled(points: Vec<Vec3>, params: Option<Vec<f64>>, closed: bool) -> Result<CurveSpec> {
        let mut points = points;
        let mut params = params;
        if points.iter().any(|p| !p.is_finite()) {
            return Err(GeoError::InvalidArgument("sampled curve has non-finite points".into()));
        }
        let mut period_end = None;
        if closed && points.len() > 2 && points[0].distance(points[points.len() - 1]) == 0.0 {
            points.pop();
            if let Some(ps) = params.as_mut() {
                if ps.len() == points.len() + 1 {
                    period_end = ps.pop();
                }
            }
        }
        if points.len() < 2 {
            return Err(GeoError::InvalidArgument("sampled curve needs at least 2 points".into()));
        }
        let n = points.len();
        let params = match params {
            None => {
                let mut acc = 0.0;
                let mut ps = Vec::with_capacity(n);
                ps.push(0.0);
                for w in points.windows(2) {
                    acc += w[0].distance(w[1]);
                    ps.push(acc);
                }
                if closed {
                    period_end = Some(acc + points[n - 1].distance(points[0]));
                }
                ps
            }
            Some(mut ps) => {
                if closed && ps.len() == n + 1 {
                    period_end = ps.pop();
                }
                if ps.len() != n {
                    return Err(GeoError::InvalidArgument(format!("{} params for {} points", ps.len(), n)));
                }
                if closed && period_end.is_none() {
                    period_end = Some(ps[n - 1] + (ps[n - 1] - ps[0]) / (n - 1) as f64);
                }
                ps
            }
        };
        let increasing = params.windows(2).all(|w| w[1] > w[0]) && period_end.is_none_or(|e| e > params[n - 1]);
        if !increasing {
            return Err(GeoError::InvalidArgument("sampled params must be strictly increasing".into()));
        }
        Ok(CurveSpec::Sampled(SampledCurve { points, params, closed, period_end }))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            CurveSpec::Analytic(a) => a.closed,
            CurveSpec::Sampled(s) => s.closed,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            CurveSpec::Analytic(a) => (a.t0, a.t1),
            CurveSpec::Sampled(s) => (s.params[0], s.period_end.unwrap_or(s.params[s.params.len() - 1])),
        }
    }

    /// The curve scaled by `k` about the origin.
    pub fn scaled(&self, k: f64) -> CurveSpec {
        match self {
            CurveSpec::Analytic(a) => CurveSpec::Analytic(AnalyticCurve {
                x: a.x.scaled(k),
                y: a.y.scaled(k),
                z: a.z.scaled(k),
                ..a.clone()
            }),
            CurveSpec::Sampled(s) => CurveSpec::Sampled(SampledCurve {
                points: s.points.iter().map(|p| *p * k).collect(),
                ..s.clone()
            }),
        }
    }

    pub fn point(&self, t: f64) -> Result<Vec3> {
        match self {
            CurveSpec::Analytic(a) => Ok(Vec3::new(a.x.eval(&[t])?, a.y.eval(&[t])?, a.z.eval(&[t])?)),
            CurveSpec::Sampled(_) => Ok(self.jet(t)?.p),
        }
    }

    /// Position and derivatives at `t`: exact for analytic curves, a local
    /// quartic fit through the five nearest samples for sampled ones (O(h²)
    /// for the third derivative).
    pub fn jet(&self, t: f64) -> Result<CurveJet> {
        match self {
            CurveSpec::Analytic(a) => {
                let x = a.x.eval_jet3("t", t)?;
                let y = a.y.eval_jet3("t", t)?;
                let z = a.z.eval_jet3("t", t)?;
                Ok(CurveJet {
                    p: Vec3::new(x.f, y.f, z.f),
                    d1: Vec3::new(x.d1, y.d1, z.d1),
                    d2: Vec3::new(x.d2, y.d2, z.d2),
                    d3: Vec3::new(x.d3, y.d3, z.d3),
                })
            }
            CurveSpec::Sampled(s) => s.local_fit(t),
        }
    }

    /// Points along the curve: `n + 1` uniform parameter samples, without the
    /// repeated endpoint for closed curves. Sampled curves return their points.
    pub fn polyline(&self, n: usize) -> Result<Vec<Vec3>> {
        match self {
            CurveSpec::Analytic(a) => {
                let n = n.max(1);
                let count = if a.closed { n } else { n + 1 };
                (0..count).map(|i| self.point(a.t0 + (a.t1 - a.t0) * i as f64 / n as f64)).collect()
            }
            CurveSpec::Sampled(s) => Ok(s.points.clone()),
        }
    }

    /// Bounding-box diagonal of the curve, sampled.
    pub fn diameter(&self) -> Result<f64> {
        let pts = self.polyline(64)?;
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in &pts {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        Ok((hi - lo).norm())
    }

    /// Curvature below which the Frenet frame is treated as undefined:
    /// `1e-9 / diameter`.
    pub fn curvature_floor(&self) -> Result<f64> {
        Ok(CURVATURE_FLOOR / self.diameter()?.max(f64::MIN_POSITIVE))
    }

    /// Checks that the curve lies in the plane `z = 0`.
    pub fn require_plane(&self) -> Result<()> {
        let pts = self.polyline(64)?;
        let scale = 1.0 + pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let max_z = pts.iter().map(|p| p.z.abs()).fold(0.0, f64::max);
        if max_z > 1e-12 * scale {
            return Err(GeoError::NotPlanar { max_z });
        }
        if let CurveSpec::Analytic(a) = self {
            if a.z.uses("t") {
                let j = self.jet(0.5 * (a.t0 + a.t1))?;
                let max_z = j.d1.z.abs().max(j.d2.z.abs());
                if max_z > 1e-12 * scale {
                    return Err(GeoError::NotPlanar { max_z });
                }
            }
        }
        Ok(())
    }

    fn regular_jet(&self, t: f64) -> Result<CurveJet> {
        let j = self.jet(t)?;
        let speed = j.d1.norm();
        if !(speed >= SPEED_FLOOR) {
            return Err(GeoError::IrregularParametrization { t, speed });
        }
        Ok(j)
    }

    pub fn speed(&self, t: f64) -> Result<f64> {
        Ok(self.regular_jet(t)?.d1.norm())
    }

    /// Length: Simpson quadrature of the speed with `n` panels for analytic
    /// curves, the exact chord sum for sampled ones.
    pub fn length(&self, n: usize) -> Result<f64> {
        match self {
            CurveSpec::Analytic(a) => try_quad_simpson(|t| self.speed(t), a.t0, a.t1, even(n)),
            CurveSpec::Sampled(s) => Ok(polyline_length(&s.points, s.closed)),
        }
    }

    /// `(t, s(t))` table of cumulative arclength on a uniform parameter grid.
    pub fn arclength_table(&self, intervals: usize) -> Result<ArcLengthTable> {
        let CurveSpec::Analytic(a) = self else {
            return Err(GeoError::InvalidArgument("arclength table needs an analytic curve".into()));
        };
        let m = intervals.max(1);
        let h = (a.t1 - a.t0) / m as f64;
        let mut ts = Vec::with_capacity(m + 1);
        let mut ss = Vec::with_capacity(m + 1);
        let mut acc = 0.0;
        ts.push(a.t0);
        ss.push(0.0);
        for i in 0..m {
            let lo = a.t0 + i as f64 * h;
            let hi = if i + 1 == m { a.t1 } else { lo + h };
            acc += try_quad_simpson(|t| self.speed(t), lo, hi, 4)?;
            ts.push(hi);
            ss.push(acc);
        }
        Ok(ArcLengthTable { curve: self.clone(), ts, ss })
    }

    /// Unit-speed resampling: `samples` equal arclength steps, params equal
    /// to cumulative arclength.
    pub fn arclength_reparam(&self, samples: usize) -> Result<CurveSpec> {
        let CurveSpec::Analytic(a) = self else {
            return Err(GeoError::InvalidArgument("arclength reparametrization needs an analytic curve".into()));
        };
        let samples = samples.max(1);
        let table = self.arclength_table((4 * samples).max(256))?;
        let total = table.total();
        let count = if a.closed { samples } else { samples + 1 };
        let mut points = Vec::with_capacity(count);
        let mut params = Vec::with_capacity(samples + 1);
        for k in 0..=samples {
            let s = total * k as f64 / samples as f64;
            params.push(s);
            if k < count {
                points.push(self.point(table.t_of_s(s)?)?);
            }
        }
        CurveSpec::sampled(points, Some(params), a.closed)
    }

    /// Curvature `|γ′×γ″| / |γ′|³`.
    pub fn kappa(&self, t: f64) -> Result<f64> {
        let j = self.regular_jet(t)?;
        Ok(j.d1.cross(j.d2).norm() / j.d1.norm().powi(3))
    }

    /// Torsion `⟨γ′×γ″, γ‴⟩ / |γ′×γ″|²`; needs a defined frame.
    pub fn tau(&self, t: f64) -> Result<f64> {
        Ok(self.frenet(t)?.tau)
    }

    pub fn frenet(&self, t: f64) -> Result<FrenetData> {
        let j = self.regular_jet(t)?;
        let floor = self.curvature_floor()?;
        frenet_from_jet(t, &j, floor)
    }

    /// Arclength derivative of curvature, `dκ/ds`.
    pub fn kappa_prime(&self, t: f64) -> Result<f64> {
        let j = self.regular_jet(t)?;
        let a = j.d1;
        let c = a.cross(j.d2);
        let cn = c.norm();
        let an = a.norm();
        if cn == 0.0 {
            return Ok(0.0);
        }
        // (γ′×γ″)′ = γ′×γ‴
        let dcn = c.dot(a.cross(j.d3)) / cn;
        let dan = a.dot(j.d2) / an;
        let dk_dt = dcn / an.powi(3) - 3.0 * cn * dan / an.powi(4);
        Ok(dk_dt / an)
    }

    /// Signed curvature of a plane curve, positive for left turns.
    pub fn signed_curvature(&self, t: f64) -> Result<f64> {
        self.require_plane()?;
        let j = self.regular_jet(t)?;
        Ok(j.d1.xy().cross(j.d2.xy()) / j.d1.xy().norm().powi(3))
    }

    pub fn plane_frenet(&self, t: f64) -> Result<PlaneFrenetData> {
        self.require_plane()?;
        let j = self.regular_jet(t)?;
        let v = j.d1.xy();
        let speed = v.norm();
        let tangent = v / speed;
        Ok(PlaneFrenetData {
            t,
            tangent,
            normal: tangent.perp(),
            k_signed: v.cross(j.d2.xy()) / speed.powi(3),
        })
    }

    /// Parameter derivative of signed curvature.
    fn signed_curvature_rate(&self, t: f64) -> Result<f64> {
        let j = self.regular_jet(t)?;
        let (a, b, c) = (j.d1.xy(), j.d2.xy(), j.d3.xy());
        let an = a.norm();
        Ok(a.cross(c) / an.powi(3) - 3.0 * a.cross(b) * a.dot(b) / an.powi(5))
    }

    /// Parameters where the derivative of signed curvature changes sign,
    /// located on a `grid`-point mesh and refined by bisection.
    pub fn vertices(&self, grid: usize) -> Result<Vec<f64>> {
        self.require_plane()?;
        let (t0, t1) = self.domain();
        let closed = self.is_closed();
        let n = grid.max(4);
        let count = if closed { n } else { n + 1 };
        let h = (t1 - t0) / n as f64;
        let ts: Vec<f64> = (0..count).map(|i| t0 + i as f64 * h).collect();
        let gs = ts.iter().map(|&t| self.signed_curvature_rate(t)).collect::<Result<Vec<_>>>()?;
        let gmax = gs.iter().map(|g| g.abs()).fold(0.0, f64::max);
        if !(gmax > 0.0) {
            return Err(GeoError::Inconclusive("signed curvature is constant on the grid".into()));
        }
        let zero = 1e-9 * gmax;
        let sign = |g: f64| if g.abs() <= zero { 0 } else if g > 0.0 { 1 } else { -1 };
        let signs: Vec<i32> = gs.iter().map(|&g| sign(g)).collect();

        let mut roots = Vec::new();
        // walk nonzero samples; a sign flip between them, across any run of
        // zero samples, is one vertex
        let nonzero: Vec<usize> = (0..count).filter(|&i| signs[i] != 0).collect();
        if nonzero.is_empty() {
            return Err(GeoError::Inconclusive("signed curvature is constant on the grid".into()));
        }
        let links = if closed { nonzero.len() } else { nonzero.len() - 1 };
        for k in 0..links {
            let i = nonzero[k];
            let j = nonzero[(k + 1) % nonzero.len()];
            if signs[i] == signs[j] {
                continue;
            }
            let ti = ts[i];
            let mut tj = ts[j];
            if j <= i {
                tj += t1 - t0;
            }
            let gap_samples = if j > i { j - i } else { j + count - i };
            let t = if gap_samples == 1 {
                self.bisect_rate(ti, tj, gs[i])?
            } else {
                // the zero run brackets the root to grid accuracy already
                0.5 * (ti + tj)
            };
            let t = if closed && t >= t1 { t - (t1 - t0) } else { t };
            roots.push(t);
        }
        roots.sort_by(f64::total_cmp);
        if closed && roots.is_empty() {
            return Err(GeoError::Inconclusive("no vertex found on a closed curve; refine the grid".into()));
        }
        Ok(roots)
    }

    fn bisect_rate(&self, mut lo: f64, mut hi: f64, g_lo: f64) -> Result<f64> {
        let (t0, t1) = self.domain();
        let period = t1 - t0;
        let wrap = |t: f64| if self.is_closed() && t >= t1 { t - period } else { t };
        let lo_positive = g_lo > 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let g = self.signed_curvature_rate(wrap(mid))?;
            if (g > 0.0) == lo_positive {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * (1.0 + mid.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Total curvature Φ: quadrature of `κ·|γ′|` (with `n` panels) for
    /// analytic curves, the sum of external angles for polylines.
    pub fn total_curvature(&self, n: usize) -> Result<f64> {
        match self {
            CurveSpec::Analytic(a) => try_quad_simpson(
                |t| {
                    let j = self.regular_jet(t)?;
                    Ok(j.d1.cross(j.d2).norm() / j.d1.norm_squared())
                },
                a.t0,
                a.t1,
                even(n),
            ),
            CurveSpec::Sampled(s) => Ok(external_angles(&s.points, s.closed)?.total),
        }
    }

    /// Total signed curvature Ψ of a plane curve.
    pub fn total_signed_curvature(&self, n: usize) -> Result<f64> {
        self.require_plane()?;
        match self {
            CurveSpec::Analytic(a) => try_quad_simpson(
                |t| {
                    let j = self.regular_jet(t)?;
                    Ok(j.d1.xy().cross(j.d2.xy()) / j.d1.xy().dot(j.d1.xy()))
                },
                a.t0,
                a.t1,
                even(n),
            ),
            CurveSpec::Sampled(s) => oriented_external_angles(&s.points, s.closed).map(|a| a.iter().sum()),
        }
    }

    /// Osculating circle of a plane curve. A straight point reports the tangent direction.
    pub fn osculating_circle(&self, t: f64) -> Result<OsculatingCircle> {
        let f = self.plane_frenet(t)?;
        if f.k_signed.abs() <= self.curvature_floor()? {
            return Err(GeoError::StraightLine { t, dx: f.tangent.x, dy: f.tangent.y });
        }
        let p = self.point(t)?.xy();
        Ok(OsculatingCircle { center: p + f.normal / f.k_signed, radius: 1.0 / f.k_signed.abs() })
    }

    /// Point of the evolute: the center of curvature.
    pub fn evolute(&self, t: f64) -> Result<Vec2> {
        Ok(self.osculating_circle(t)?.center)
    }

    /// Involute `γ(s) + (s0 − s)·T(s)` at arclength `s` from the start of the curve.
    pub fn involute(&self, s0: f64, s: f64) -> Result<Vec2> {
        self.require_plane()?;
        let t = match self {
            CurveSpec::Analytic(_) => self.arclength_table(512)?.t_of_s(s)?,
            CurveSpec::Sampled(c) => c.params[0] + s,
        };
        let f = self.plane_frenet(t)?;
        Ok(self.point(t)?.xy() + f.tangent * (s0 - s))
    }

    /// Center of the osculating sphere `γ + N/κ − (κ′/(κ²τ))·B`.
    pub fn osculating_sphere_center(&self, t: f64) -> Result<Vec3> {
        let f = self.frenet(t)?;
        if f.tau.abs() <= self.curvature_floor()? {
            return Err(GeoError::SphereUndefined { t, tau: f.tau });
        }
        let dk = self.kappa_prime(t)?;
        Ok(self.point(t)? + f.normal / f.kappa - f.binormal * (dk / (f.kappa * f.kappa * f.tau)))
    }

    fn crofton_polyline(&self) -> Result<(Vec<Vec3>, bool)> {
        Ok((self.polyline(CROFTON_SEGMENTS)?, self.is_closed()))
    }

    /// `(π/2) · mean` length of projections of the plane curve to random lines.
    pub fn crofton_plane<R: Rng + ?Sized>(&self, n_dirs: usize, rng: &mut R) -> Result<f64> {
        self.require_plane()?;
        let (pts, closed) = self.crofton_polyline()?;
        let chords: Vec<Vec2> = chords(&pts, closed).map(|c| c.xy()).collect();
        let dirs: Vec<Vec2> = (0..n_dirs.max(1)).map(|_| sample_unit_circle(rng)).collect();
        let lengths: Vec<f64> = dirs.par_iter().map(|u| chords.iter().map(|c| c.dot(*u).abs()).sum()).collect();
        Ok(0.5 * PI * pairwise_sum(&lengths) / lengths.len() as f64)
    }

    /// `2 · mean` length of projections to random lines in space.
    pub fn crofton_space_lines<R: Rng + ?Sized>(&self, n_dirs: usize, rng: &mut R) -> Result<f64> {
        let (pts, closed) = self.crofton_polyline()?;
        let chords: Vec<Vec3> = chords(&pts, closed).collect();
        let dirs: Vec<Vec3> = (0..n_dirs.max(1)).map(|_| sample_unit_sphere(rng)).collect();
        let lengths: Vec<f64> = dirs.par_iter().map(|u| chords.iter().map(|c| c.dot(*u).abs()).sum()).collect();
        Ok(2.0 * pairwise_sum(&lengths) / lengths.len() as f64)
    }

    /// `(4/π) · mean` length of projections to random planes.
    pub fn crofton_space_planes<R: Rng + ?Sized>(&self, n_dirs: usize, rng: &mut R) -> Result<f64> {
        let (pts, closed) = self.crofton_polyline()?;
        let chords: Vec<Vec3> = chords(&pts, closed).collect();
        let dirs: Vec<Vec3> = (0..n_dirs.max(1)).map(|_| sample_unit_sphere(rng)).collect();
        let lengths: Vec<f64> = dirs
            .par_iter()
            .map(|u| chords.iter().map(|c| (*c - *u * c.dot(*u)).norm()).sum())
            .collect();
        Ok(4.0 / PI * pairwise_sum(&lengths) / lengths.len() as f64)
    }

    /// `π · mean` number of crossings with random great circles, for curves on the unit sphere.
    pub fn crofton_sphere<R: Rng + ?Sized>(&self, n_dirs: usize, rng: &mut R) -> Result<f64> {
        let (pts, closed) = self.crofton_polyline()?;
        let deviation = pts.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
        if deviation > 1e-6 {
            return Err(GeoError::NotSpherical { deviation });
        }
        let dirs: Vec<Vec3> = (0..n_dirs.max(1)).map(|_| sample_unit_sphere(rng)).collect();
        let counts: Vec<f64> = dirs
            .par_iter()
            .map(|u| {
                let side: Vec<bool> = pts.iter().map(|p| p.dot(*u) > 0.0).collect();
                let mut n = side.windows(2).filter(|w| w[0] != w[1]).count();
                if closed && side[0] != side[side.len() - 1] {
                    n += 1;
                }
                n as f64
            })
            .collect();
        Ok(PI * pairwise_sum(&counts) / counts.len() as f64)
    }

    /// Measured margins of the curve theorems that apply to this curve.
    pub fn theorem_checks(&self, opts: &TheoremOptions) -> Result<TheoremReport> {
        let closed = self.is_closed();
        let phi = self.total_curvature(opts.quadrature)?;
        let length = self.length(opts.quadrature)?;
        let pts = self.polyline(256)?;
        let radius = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let sampled = matches!(self, CurveSpec::Sampled(_));

        let fenchel = if closed { Check::Margin(phi - TAU) } else { Check::Skipped("curve is open".into()) };
        let in_ball = radius <= 1.0 + 1e-12;
        let dna = match (closed, in_ball) {
            (false, _) => Check::Skipped("curve is open".into()),
            (_, false) => Check::Skipped(format!("curve leaves the unit ball (|γ| up to {radius})")),
            _ => Check::Margin(phi - length),
        };
        let dna_poly = if !sampled {
            Check::Skipped("not a polyline".into())
        } else {
            match dna {
                Check::Margin(m) => Check::Margin(m),
                Check::Skipped(ref why) => Check::Skipped(why.clone()),
            }
        };

        let (t0, t1) = self.domain();
        let grid: Vec<f64> = (0..=opts.grid).map(|i| t0 + (t1 - t0) * i as f64 / opts.grid as f64).collect();
        let frames: Vec<Result<FrenetData>> = grid.iter().map(|&t| self.frenet(t)).collect();
        let lancret = if sampled {
            Check::Skipped("needs an analytic curve".into())
        } else if frames.iter().all(|f| f.is_ok()) {
            let ratios: Vec<f64> = frames.iter().map(|f| f.as_ref().map(|f| f.tau / f.kappa).unwrap_or(0.0)).collect();
            Check::Margin(stddev(&ratios))
        } else {
            Check::Skipped("Frenet frame undefined somewhere on the grid".into())
        };

        let deviation = pts.iter().map(|p| (p.norm() - 1.0).abs()).fold(0.0, f64::max);
        let spherical_identity = if sampled {
            Check::Skipped("needs an analytic curve".into())
        } else if deviation > 1e-6 {
            Check::Skipped(format!("curve is not on the unit sphere (deviation {deviation:e})"))
        } else {
            let mut worst: f64 = 0.0;
            let mut usable = 0;
            for (t, f) in grid.iter().zip(&frames) {
                let Ok(f) = f else { continue };
                if f.tau.abs() <= 1e-6 {
                    continue;
                }
                let dk = self.kappa_prime(*t)?;
                let r = (dk / f.tau).abs() - f.kappa * (f.kappa * f.kappa - 1.0).max(0.0).sqrt();
                worst = worst.max(r.abs());
                usable += 1;
            }
            if usable == 0 {
                Check::Skipped("torsion vanishes on the grid".into())
            } else {
                Check::Margin(worst)
            }
        };

        let spiral_nesting = self.spiral_margin(&grid);
        Ok(TheoremReport { fenchel, dna, dna_poly, lancret, spherical_identity, spiral_nesting })
    }

    fn spiral_margin(&self, grid: &[f64]) -> Check {
        if self.require_plane().is_err() {
            return Check::Skipped("not a plane curve".into());
        }
        if matches!(self, CurveSpec::Sampled(_)) {
            return Check::Skipped("needs an analytic curve".into());
        }
        let ks: Vec<f64> = match grid.iter().map(|&t| self.signed_curvature(t)).collect::<Result<Vec<_>>>() {
            Ok(k) => k,
            Err(e) => return Check::Skipped(e.to_string()),
        };
        let same_sign = ks.iter().all(|&k| k > 0.0) || ks.iter().all(|&k| k < 0.0);
        let abs: Vec<f64> = ks.iter().map(|k| k.abs()).collect();
        let monotone = abs.windows(2).all(|w| w[1] > w[0]) || abs.windows(2).all(|w| w[1] < w[0]);
        if !(same_sign && monotone) {
            return Check::Skipped("curvature is not strictly monotone with constant sign".into());
        }
        let step = (grid.len() / 32).max(1);
        let mut centers = Vec::new();
        for (i, &t) in grid.iter().enumerate().step_by(step) {
            match self.osculating_circle(t) {
                Ok(c) => centers.push((c.center, c.radius)),
                Err(e) => return Check::Skipped(format!("osculating circle at grid point {i}: {e}")),
            }
        }
        let mut margin = f64::INFINITY;
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                let m = (centers[j].1 - centers[i].1).abs() - (centers[j].0 - centers[i].0).norm();
                margin = margin.min(m);
            }
        }
        Check::Margin(margin)
    }
}

fn even(n: usize) -> usize {
    let n = n.max(2);
    n + n % 2
}

fn stddev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Frenet apparatus from a curve jet, failing below the curvature floor.
pub fn frenet_from_jet(t: f64, j: &CurveJet, floor: f64) -> Result<FrenetData> {
    let speed = j.d1.norm();
    let c = j.d1.cross(j.d2);
    let cn = c.norm();
    let kappa = cn / speed.powi(3);
    if !(kappa > floor) {
        return Err(GeoError::FrameUndefined { t, kappa });
    }
    let tangent = j.d1 / speed;
    let binormal = c / cn;
    let normal = binormal.cross(tangent);
    Ok(FrenetData { t, tangent, normal, binormal, kappa, tau: c.dot(j.d3) / (cn * cn) })
}

/// Curvature of the graph `y = f(x)`: `|f″| / (1 + f′²)^{3/2}`.
pub fn curvature_graph(f: &Expr, x: f64) -> Result<f64> {
    let var = f.variables().first().cloned().unwrap_or_else(|| "x".into());
    let j = f.eval_jet3(&var, x)?;
    Ok(j.d2.abs() / (1.0 + j.d1 * j.d1).powf(1.5))
}

/// Cumulative arclength of an analytic curve on a uniform parameter grid.
#[derive(Debug, Clone)]
pub struct ArcLengthTable {
    curve: CurveSpec,
    pub ts: Vec<f64>,
    pub ss: Vec<f64>,
}

impl ArcLengthTable {
    pub fn total(&self) -> f64 {
        *self.ss.last().expect("table has at least two rows")
    }

    /// Arclength from the start to parameter `t`.
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        let i = self.interval_by(&self.ts, t);
        Ok(self.ss[i] + self.partial(self.ts[i], t)?)
    }

    /// Parameter at arclength `s`, by Newton iteration inside the bracketing interval.
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        let i = self.interval_by(&self.ss, s);
        let (lo, hi) = (self.ts[i], self.ts[i + 1]);
        let frac = if self.ss[i + 1] > self.ss[i] { (s - self.ss[i]) / (self.ss[i + 1] - self.ss[i]) } else { 0.0 };
        let mut t = lo + frac * (hi - lo);
        for _ in 0..20 {
            let f = self.ss[i] + self.partial(lo, t)? - s;
            let dt = f / self.curve.speed(t)?;
            t = (t - dt).clamp(lo - (hi - lo), hi + (hi - lo));
            if dt.abs() <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        Ok(t)
    }

    fn interval_by(&self, keys: &[f64], x: f64) -> usize {
        let n = keys.len() - 1;
        keys.partition_point(|&k| k <= x).saturating_sub(1).min(n - 1)
    }

    fn partial(&self, from: f64, to: f64) -> Result<f64> {
        if to == from {
            return Ok(0.0);
        }
        let (a, b, sign) = if to > from { (from, to, 1.0) } else { (to, from, -1.0) };
        Ok(sign * try_quad_simpson(|t| self.curve.speed(t), a, b, 8)?)
    }
}

impl SampledCurve {
    fn len(&self) -> usize {
        self.points.len()
    }

    /// Node `k` (possibly outside `0..len` for closed curves) with its parameter.
    fn node(&self, k: isize) -> (f64, Vec3) {
        let n = self.len() as isize;
        if self.closed {
            let period = self.period_end.unwrap_or(0.0) - self.params[0];
            let wraps = k.div_euclid(n);
            let i = k.rem_euclid(n) as usize;
            (self.params[i] + wraps as f64 * period, self.points[i])
        } else {
            let i = k.clamp(0, n - 1) as usize;
            (self.params[i], self.points[i])
        }
    }

    fn local_fit(&self, t: f64) -> Result<CurveJet> {
        let n = self.len();
        let (lo, hi) = (self.params[0], self.period_end.unwrap_or(self.params[n - 1]));
        let t_in = if self.closed { lo + (t - lo).rem_euclid(hi - lo) } else { t };
        let nearest = self.params.partition_point(|&p| p < t_in) as isize;
        let width = n.min(5) as isize;
        let mut first = nearest - width / 2;
        if !self.closed {
            first = first.clamp(0, n as isize - width);
        }
        let h = (hi - lo) / n as f64;
        let mut vander = SMatrix::<f64, 5, 5>::identity();
        let mut rhs = [SVector::<f64, 5>::zeros(); 3];
        for r in 0..width as usize {
            let (tp, p) = self.node(first + r as isize);
            let x = (tp - t_in) / h;
            let mut pow = 1.0;
            for c in 0..width as usize {
                vander[(r, c)] = pow;
                pow *= x;
            }
            for (d, v) in rhs.iter_mut().zip([p.x, p.y, p.z]) {
                d[r] = v;
            }
        }
        let lu = vander.lu();
        let mut coef = [[0.0; 5]; 3];
        for (axis, b) in rhs.iter().enumerate() {
            let sol = lu
                .solve(b)
                .ok_or_else(|| GeoError::InvalidArgument("sampled curve has repeated parameters".into()))?;
            for k in 0..5 {
                coef[axis][k] = sol[k];
            }
        }
        let deriv = |k: usize, fact: f64| Vec3::new(coef[0][k], coef[1][k], coef[2][k]) * (fact / h.powi(k as i32));
        Ok(CurveJet { p: deriv(0, 1.0), d1: deriv(1, 1.0), d2: deriv(2, 2.0), d3: deriv(3, 6.0) })
    }
}

fn chords(points: &[Vec3], closed: bool) -> impl Iterator<Item = Vec3> + '_ {
    let n = points.len();
    let m = if closed && n > 2 { n } else { n - 1 };
    (0..m).map(move |i| points[(i + 1) % n] - points[i])
}

/// Chord-length sum, including the closing chord for closed polylines.
pub fn polyline_length(points: &[Vec3], closed: bool) -> f64 {
    pairwise_sum(&chords(points, closed).map(|c| c.norm()).collect::<Vec<_>>())
}

/// External angles of a polyline; exact-π turns are flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct Turning {
    pub angles: Vec<f64>,
    pub total: f64,
    /// Corner indices where the polyline turns straight back.
    pub cusps: Vec<usize>,
}

fn corner_chords(points: &[Vec3], closed: bool) -> Result<Vec<(usize, Vec3, Vec3)>> {
    let c: Vec<Vec3> = chords(points, closed).collect();
    if let Some(i) = c.iter().position(|v| v.norm() == 0.0) {
        return Err(GeoError::InvalidArgument(format!("repeated consecutive point at index {i}")));
    }
    let n = c.len();
    if closed && n > 2 {
        Ok((0..n).map(|i| (i, c[(i + n - 1) % n], c[i])).collect())
    } else {
        Ok((1..n).map(|i| (i, c[i - 1], c[i])).collect())
    }
}

pub fn external_angles(points: &[Vec3], closed: bool) -> Result<Turning> {
    let mut angles = Vec::new();
    let mut cusps = Vec::new();
    for (i, a, b) in corner_chords(points, closed)? {
        let angle = a.cross(b).norm().atan2(a.dot(b));
        if angle >= PI - 1e-12 {
            cusps.push(i);
            angles.push(PI);
        } else {
            angles.push(angle);
        }
    }
    let total = pairwise_sum(&angles);
    Ok(Turning { angles, total, cusps })
}

/// Oriented external angles (left turns positive) of a plane polyline.
pub fn oriented_external_angles(points: &[Vec3], closed: bool) -> Result<Vec<f64>> {
    corner_chords(points, closed)?
        .into_iter()
        .map(|(i, a, b)| {
            let (a, b) = (a.xy(), b.xy());
            let cross = a.cross(b);
            let dot = a.dot(b);
            if cross.abs() <= 1e-12 * a.norm() * b.norm() && dot < 0.0 {
                Err(GeoError::Cusp { index: i })
            } else {
                Ok(cross.atan2(dot))
            }
        })
        .collect()
}

/// A chain of curve pieces joined end to end.
#[derive(Debug, Clone)]
pub struct PiecewiseCurve {
    pub pieces: Vec<CurveSpec>,
    pub closed: bool,
}

impl PiecewiseCurve {
    fn junction_turns(&self) -> Result<Vec<(Vec3, Vec3, usize)>> {
        let n = self.pieces.len();
        let joins = if self.closed { n } else { n.saturating_sub(1) };
        let mut out = Vec::with_capacity(joins);
        for i in 0..joins {
            let a = &self.pieces[i];
            let b = &self.pieces[(i + 1) % n];
            let ja = a.jet(a.domain().1)?;
            let jb = b.jet(b.domain().0)?;
            let gap = ja.p.distance(jb.p);
            if gap > 1e-9 * (1.0 + ja.p.norm()) {
                return Err(GeoError::InvalidArgument(format!("pieces {i} and {} do not meet (gap {gap:e})", (i + 1) % n)));
            }
            out.push((ja.d1, jb.d1, i));
        }
        Ok(out)
    }

    /// Φ: sum of the pieces' total curvature and the external angles at the joins.
    pub fn total_curvature(&self, n: usize) -> Result<Turning> {
        let mut arcs = 0.0;
        for p in &self.pieces {
            arcs += p.total_curvature(n)?;
        }
        let mut angles = Vec::new();
        let mut cusps = Vec::new();
        for (a, b, i) in self.junction_turns()? {
            let angle = a.cross(b).norm().atan2(a.dot(b));
            if angle >= PI - 1e-12 {
                cusps.push(i);
            }
            angles.push(angle);
        }
        let total = arcs + angles.iter().sum::<f64>();
        Ok(Turning { angles, total, cusps })
    }

    /// Ψ: signed arcs plus oriented angles; a cusp at a join is an error.
    pub fn total_signed_curvature(&self, n: usize) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.pieces {
            total += p.total_signed_curvature(n)?;
        }
        for (a, b, i) in self.junction_turns()? {
            let (a, b) = (a.xy(), b.xy());
            let cross = a.cross(b);
            if cross.abs() <= 1e-12 * a.norm() * b.norm() && a.dot(b) < 0.0 {
                return Err(GeoError::Cusp { index: i });
            }
            total += cross.atan2(a.dot(b));
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TheoremOptions {
    pub quadrature: usize,
    pub grid: usize,
}

impl Default for TheoremOptions {
    fn default() -> Self {
        TheoremOptions { quadrature: 4000, grid: 400 }
    }
}

/// Outcome of one theorem check: a measured margin, or why it does not apply.
#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Margin(f64),
    Skipped(String),
}

impl Check {
    pub fn margin(&self) -> Option<f64> {
        match self {
            Check::Margin(m) => Some(*m),
            Check::Skipped(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    /// Φ − 2π for closed curves.
    pub fenchel: Check,
    /// Φ − length for closed curves inside the unit ball.
    pub dna: Check,
    /// The same margin for closed polylines, where it is strict.
    pub dna_poly: Check,
    /// Standard deviation of τ/κ over the grid.
    pub lancret: Check,
    /// Largest `| |κ′/τ| − κ√(κ²−1) |` for curves on the unit sphere.
    pub spherical_identity: Check,
    /// Smallest `|r₁ − r₀| − |ω₁ − ω₀|` over pairs on a monotone-curvature arc.
    pub spiral_nesting: Check,
}
