//! Charted surfaces: fundamental forms, shape operator, principal curvatures
//! and integration over parameter regions.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{GeoError, Result};
use crate::exprparse::{Expr, Jet2x2};
use crate::numcore::{eig_generalized_sym2, pairwise_sum, Mat2, Vec2, Vec3};

/// Relative floor on `|s_u × s_v| / (|s_u|² + |s_v|²)` below which a chart point is irregular.
pub const REGULARITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub u: (f64, f64),
    pub v: (f64, f64),
    pub periodic_u: bool,
    pub periodic_v: bool,
}

impl Domain {
    pub fn rect(u: (f64, f64), v: (f64, f64)) -> Domain {
        Domain { u, v, periodic_u: false, periodic_v: false }
    }

    /// Folds periodic coordinates into range; `None` if the point lies outside.
    pub fn normalize(&self, u: f64, v: f64) -> Option<(f64, f64)> {
        let fold = |x: f64, (lo, hi): (f64, f64), periodic: bool| {
            if periodic {
                Some(lo + (x - lo).rem_euclid(hi - lo))
            } else if x >= lo && x <= hi {
                Some(x)
            } else {
                None
            }
        };
        Some((fold(u, self.u, self.periodic_u)?, fold(v, self.v, self.periodic_v)?))
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.normalize(u, v).is_some()
    }

    /// Shortest parameter difference `q − p`, using periodic wraps.
    pub fn difference(&self, p: Vec2, q: Vec2) -> Vec2 {
        let wrap = |d: f64, (lo, hi): (f64, f64), periodic: bool| {
            if periodic {
                let period = hi - lo;
                d - period * (d / period).round()
            } else {
                d
            }
        };
        Vec2::new(wrap(q.x - p.x, self.u, self.periodic_u), wrap(q.y - p.y, self.v, self.periodic_v))
    }

    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.u.0 + self.u.1), 0.5 * (self.v.0 + self.v.1))
    }
}

#[derive(Debug, Clone)]
pub enum Chart {
    /// `(x(u,v), y(u,v), z(u,v))`.
    Parametric { x: Expr, y: Expr, z: Expr },
    /// `(u, v, f(u,v))`.
    Graph { f: Expr },
    /// `(x(s), y(s)·cos θ, y(s)·sin θ)` with `u = s`, `v = θ`.
    Revolution { x: Expr, y: Expr },
}

/// Named analytic surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    /// Geographic chart `R·(cos v cos u, cos v sin u, sin v)`, outward normal.
    Sphere { radius: f64 },
    /// `(r cos u, r sin u, v)`.
    Cylinder { radius: f64, height: f64 },
    /// Revolution of the unit-speed circle `(r sin(s/r), R + r cos(s/r))`.
    Torus { major: f64, minor: f64 },
    /// Revolution of `(s, c·cosh(s/c))`.
    Catenoid { c: f64, half_height: f64 },
    /// `(u cos v, u sin v, c·v)`.
    Helicoid { c: f64, half_width: f64 },
    /// Revolution of the unit-speed tractrix with `y = e^{-s}`.
    Pseudosphere { s_max: f64 },
    /// Graph of `a·(x² − y²)` over `[-h, h]²`.
    Saddle { a: f64, half_width: f64 },
}

impl Builtin {
    pub const NAMES: [&'static str; 7] = ["sphere", "cylinder", "torus", "catenoid", "helicoid", "pseudosphere", "saddle"];

    /// Builtin by name with optional positional parameters; missing ones take defaults.
    pub fn from_name(name: &str, params: &[f64]) -> Result<Builtin> {
        let p = |i: usize, default: f64| params.get(i).copied().unwrap_or(default);
        let b = match name {
            "sphere" => Builtin::Sphere { radius: p(0, 1.0) },
            "cylinder" => Builtin::Cylinder { radius: p(0, 1.0), height: p(1, 2.0) },
            "torus" => Builtin::Torus { major: p(0, 2.0), minor: p(1, 1.0) },
            "catenoid" => Builtin::Catenoid { c: p(0, 1.0), half_height: p(1, 1.5) },
            "helicoid" => Builtin::Helicoid { c: p(0, 1.0), half_width: p(1, 2.0) },
            "pseudosphere" => Builtin::Pseudosphere { s_max: p(0, 4.0) },
            "saddle" => Builtin::Saddle { a: p(0, 1.0), half_width: p(1, 1.0) },
            _ => return Err(GeoError::InvalidArgument(format!("unknown builtin surface `{name}`"))),
        };
        let max = match b {
            Builtin::Sphere { .. } | Builtin::Pseudosphere { .. } => 1,
            _ => 2,
        };
        if params.len() > max {
            return Err(GeoError::InvalidArgument(format!("`{name}` takes at most {max} parameters")));
        }
        if params.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(GeoError::InvalidArgument(format!("`{name}` parameters must be positive")));
        }
        if let Builtin::Torus { major, minor } = b {
            if minor >= major {
                return Err(GeoError::InvalidArgument("torus needs minor < major radius".into()));
            }
        }
        Ok(b)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Sphere { .. } => "sphere",
            Builtin::Cylinder { .. } => "cylinder",
            Builtin::Torus { .. } => "torus",
            Builtin::Catenoid { .. } => "catenoid",
            Builtin::Helicoid { .. } => "helicoid",
            Builtin::Pseudosphere { .. } => "pseudosphere",
            Builtin::Saddle { .. } => "saddle",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub chart: Chart,
    pub domain: Domain,
    /// Negates the chart normal `s_u × s_v`.
    pub flip_normal: bool,
    pub builtin: Option<Builtin>,
}

/// Position and second-order partials at a chart point, with the unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartJet {
    pub p: Vec3,
    pub s_u: Vec3,
    pub s_v: Vec3,
    pub s_uu: Vec3,
    pub s_uv: Vec3,
    pub s_vv: Vec3,
    pub normal: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundForms {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl FundForms {
    pub fn first(&self) -> Mat2 {
        Mat2::symmetric(self.e, self.f, self.g)
    }

    pub fn second(&self) -> Mat2 {
        Mat2::symmetric(self.l, self.m, self.n)
    }
}

impl ChartJet {
    pub fn forms(&self) -> FundForms {
        FundForms {
            e: self.s_u.dot(self.s_u),
            f: self.s_u.dot(self.s_v),
            g: self.s_v.dot(self.s_v),
            l: self.s_uu.dot(self.normal),
            m: self.s_uv.dot(self.normal),
            n: self.s_vv.dot(self.normal),
        }
    }

    /// Embedded vector of the chart-basis components `w`.
    pub fn push(&self, w: Vec2) -> Vec3 {
        self.s_u * w.x + self.s_v * w.y
    }

    /// Chart-basis components of the tangential part of `x`.
    pub fn pull(&self, x: Vec3) -> Result<Vec2> {
        self.forms().first().solve(Vec2::new(x.dot(self.s_u), x.dot(self.s_v))).ok_or(GeoError::NotPositiveDefinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    pub k1: f64,
    pub k2: f64,
    pub dir1: Vec3,
    pub dir2: Vec3,
    /// `dir1`, `dir2` in chart components (first-form orthonormal).
    pub chart_dir1: Vec2,
    pub chart_dir2: Vec2,
    pub gauss: f64,
    pub mean: f64,
    pub normal: Vec3,
    pub umbilic: bool,
}

fn parse_uv(text: &str) -> Result<Expr> {
    Ok(Expr::parse(text, &["u", "v"])?)
}

fn parse_s(text: &str) -> Result<Expr> {
    Ok(Expr::parse(text, &["s"])?)
}

fn interval(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo < hi && lo.is_finite() && hi.is_finite() {
        Ok(())
    } else {
        Err(GeoError::InvalidArgument(format!("{name} interval [{lo}, {hi}] is empty")))
    }
}

impl SurfaceSpec {
    pub fn parametric(x: &str, y: &str, z: &str, u: (f64, f64), v: (f64, f64)) -> Result<SurfaceSpec> {
        interval("u", u)?;
        interval("v", v)?;
        let chart = Chart::Parametric { x: parse_uv(x)?, y: parse_uv(y)?, z: parse_uv(z)? };
        Ok(SurfaceSpec { chart, domain: Domain::rect(u, v), flip_normal: false, builtin: None })
    }

    /// Graph `z = f(x, y)`; the expression is written in `x` and `y`.
    pub fn graph(f: &str, x: (f64, f64), y: (f64, f64)) -> Result<SurfaceSpec> {
        interval("x", x)?;
        interval("y", y)?;
        let f = Expr::parse(f, &["x", "y"])?;
        Ok(SurfaceSpec { chart: Chart::Graph { f }, domain: Domain::rect(x, y), flip_normal: false, builtin: None })
    }

    /// Surface of revolution of the generatrix `(x(s), y(s))`, `y > 0`, about the x-axis.
    pub fn revolution(x: &str, y: &str, s: (f64, f64), angle: (f64, f64)) -> Result<SurfaceSpec> {
        interval("s", s)?;
        interval("angle", angle)?;
        let (x, y) = (parse_s(x)?, parse_s(y)?);
        for k in 0..=32 {
            let sv = s.0 + (s.1 - s.0) * k as f64 / 32.0;
            let r = y.eval(&[sv])?;
            if !(r > 0.0) {
                return Err(GeoError::InvalidArgument(format!("generatrix must satisfy y(s) > 0, y({sv}) = {r}")));
            }
        }
        let full = ((angle.1 - angle.0) - TAU).abs() < 1e-12;
        Ok(SurfaceSpec {
            chart: Chart::Revolution { x, y },
            domain: Domain { u: s, v: angle, periodic_u: false, periodic_v: full },
            flip_normal: false,
            builtin: None,
        })
    }

    pub fn builtin(b: Builtin) -> SurfaceSpec {
        let mut spec = match b {
            Builtin::Sphere { radius: r } => {
                let mut s = SurfaceSpec::parametric(
                    &format!("{r}*cos(v)*cos(u)"),
                    &format!("{r}*cos(v)*sin(u)"),
                    &format!("{r}*sin(v)"),
                    (-PI, PI),
                    (-0.5 * PI, 0.5 * PI),
                )
                .expect("builtin chart");
                s.domain.periodic_u = true;
                s
            }
            Builtin::Cylinder { radius: r, height: h } => {
                let mut s = SurfaceSpec::parametric(&format!("{r}*cos(u)"), &format!("{r}*sin(u)"), "v", (-PI, PI), (-h, h))
                    .expect("builtin chart");
                s.domain.periodic_u = true;
                s
            }
            Builtin::Torus { major, minor } => {
                let mut s = SurfaceSpec::revolution(
                    &format!("{minor}*sin(s/{minor})"),
                    &format!("{major} + {minor}*cos(s/{minor})"),
                    (-PI * minor, PI * minor),
                    (-PI, PI),
                )
                .expect("builtin chart");
                s.domain.periodic_u = true;
                s.domain.periodic_v = true;
                s
            }
            Builtin::Catenoid { c, half_height } => {
                SurfaceSpec::revolution("s", &format!("{c}*cosh(s/{c})"), (-half_height, half_height), (-PI, PI))
                    .expect("builtin chart")
            }
            Builtin::Helicoid { c, half_width } => {
                SurfaceSpec::parametric("u*cos(v)", "u*sin(v)", &format!("{c}*v"), (-half_width, half_width), (-PI, PI))
                    .expect("builtin chart")
            }
            Builtin::Pseudosphere { s_max } => SurfaceSpec::revolution(
                "ln(exp(s) + sqrt(exp(2*s) - 1)) - sqrt(1 - exp(-2*s))",
                "exp(-s)",
                (0.05, s_max.max(0.1)),
                (-PI, PI),
            )
            .expect("builtin chart"),
            Builtin::Saddle { a, half_width: h } => {
                SurfaceSpec::graph(&format!("{a}*(x^2 - y^2)"), (-h, h), (-h, h)).expect("builtin chart")
            }
        };
        spec.builtin = Some(b);
        spec
    }

    pub fn with_flipped_normal(mut self) -> SurfaceSpec {
        self.flip_normal = !self.flip_normal;
        self
    }

    /// The surface scaled by `k` about the origin. Graphs become parametric charts.
    pub fn scaled(&self, k: f64) -> SurfaceSpec {
        let chart = match &self.chart {
            Chart::Parametric { x, y, z } => Chart::Parametric { x: x.scaled(k), y: y.scaled(k), z: z.scaled(k) },
            Chart::Graph { f } => {
                let root = f.root().clone();
                Chart::Parametric {
                    x: parse_uv("u").expect("literal").scaled(k),
                    y: parse_uv("v").expect("literal").scaled(k),
                    z: Expr::from_node(root, &["u", "v"]).scaled(k),
                }
            }
            Chart::Revolution { x, y } => Chart::Revolution { x: x.scaled(k), y: y.scaled(k) },
        };
        SurfaceSpec { chart, builtin: None, ..self.clone() }
    }

    pub fn label(&self) -> String {
        match (&self.builtin, &self.chart) {
            (Some(b), _) => b.name().to_string(),
            (None, Chart::Parametric { .. }) => "parametric".into(),
            (None, Chart::Graph { .. }) => "graph".into(),
            (None, Chart::Revolution { .. }) => "revolution".into(),
        }
    }

    /// Whether the chart is orthogonal (`F ≡ 0`) by construction.
    pub fn orthogonal_by_construction(&self) -> bool {
        matches!(self.chart, Chart::Revolution { .. })
            || matches!(
                self.builtin,
                Some(Builtin::Sphere { .. } | Builtin::Cylinder { .. } | Builtin::Helicoid { .. })
            )
    }

    pub fn point(&self, u: f64, v: f64) -> Result<Vec3> {
        match &self.chart {
            Chart::Parametric { x, y, z } => Ok(Vec3::new(x.eval(&[u, v])?, y.eval(&[u, v])?, z.eval(&[u, v])?)),
            Chart::Graph { f } => Ok(Vec3::new(u, v, f.eval(&[u, v])?)),
            Chart::Revolution { x, y } => {
                let r = y.eval(&[u])?;
                Ok(Vec3::new(x.eval(&[u])?, r * v.cos(), r * v.sin()))
            }
        }
    }

    /// Partials up to second order, without the regularity check.
    pub fn raw_jet(&self, u: f64, v: f64) -> Result<[Vec3; 6]> {
        let from = |x: Jet2x2, y: Jet2x2, z: Jet2x2| {
            [
                Vec3::new(x.f, y.f, z.f),
                Vec3::new(x.f_u, y.f_u, z.f_u),
                Vec3::new(x.f_v, y.f_v, z.f_v),
                Vec3::new(x.f_uu, y.f_uu, z.f_uu),
                Vec3::new(x.f_uv, y.f_uv, z.f_uv),
                Vec3::new(x.f_vv, y.f_vv, z.f_vv),
            ]
        };
        Ok(match &self.chart {
            Chart::Parametric { x, y, z } => from(x.eval_jet2x2(u, v)?, y.eval_jet2x2(u, v)?, z.eval_jet2x2(u, v)?),
            Chart::Graph { f } => from(Jet2x2::var_u(u), Jet2x2::var_v(v), f.eval_jet2x2(u, v)?),
            Chart::Revolution { x, y } => {
                let gx = x.eval_jet3("s", u)?;
                let gy = y.eval_jet3("s", u)?;
                let (sn, cs) = v.sin_cos();
                [
                    Vec3::new(gx.f, gy.f * cs, gy.f * sn),
                    Vec3::new(gx.d1, gy.d1 * cs, gy.d1 * sn),
                    Vec3::new(0.0, -gy.f * sn, gy.f * cs),
                    Vec3::new(gx.d2, gy.d2 * cs, gy.d2 * sn),
                    Vec3::new(0.0, -gy.d1 * sn, gy.d1 * cs),
                    Vec3::new(0.0, -gy.f * cs, -gy.f * sn),
                ]
            }
        })
    }

    pub fn chart_jet(&self, u: f64, v: f64) -> Result<ChartJet> {
        let [p, s_u, s_v, s_uu, s_uv, s_vv] = self.raw_jet(u, v)?;
        let c = s_u.cross(s_v);
        let area = c.norm();
        if !(area > REGULARITY_FLOOR * (s_u.norm_squared() + s_v.norm_squared())) || !area.is_finite() {
            return Err(GeoError::DegenerateChart { u, v });
        }
        let normal = if self.flip_normal { -(c / area) } else { c / area };
        Ok(ChartJet { p, s_u, s_v, s_uu, s_uv, s_vv, normal })
    }

    pub fn forms(&self, u: f64, v: f64) -> Result<FundForms> {
        Ok(self.chart_jet(u, v)?.forms())
    }

    pub fn curvature_report(&self, u: f64, v: f64) -> Result<CurvatureReport> {
        report_from_jet(&self.chart_jet(u, v)?)
    }

    /// Normal curvature in the chart direction `dir`, `II(d,d) / I(d,d)`.
    pub fn normal_curvature(&self, u: f64, v: f64, dir: Vec2) -> Result<f64> {
        let f = self.forms(u, v)?;
        let len2 = f.first().form(dir, dir);
        if !(len2 > 0.0) {
            return Err(GeoError::InvalidArgument("direction must be nonzero".into()));
        }
        Ok(f.second().form(dir, dir) / len2)
    }

    /// Average of `k_n²` over `n_dirs` equally spaced tangent directions.
    pub fn mean_square_normal_curvature(&self, u: f64, v: f64, n_dirs: usize) -> Result<f64> {
        let r = self.curvature_report(u, v)?;
        let n = n_dirs.max(1);
        let sum: f64 = (0..n)
            .map(|i| {
                let th = TAU * (i as f64 + 0.5) / n as f64;
                let (s, c) = th.sin_cos();
                let k = r.k1 * c * c + r.k2 * s * s;
                k * k
            })
            .sum();
        Ok(sum / n as f64)
    }

    /// Principal curvatures `(meridian, parallel) = (−y″/|x′|, |x′|/y)` of a
    /// unit-speed surface of revolution, relative to the normal whose radial
    /// part points at the axis.
    pub fn revolution_principal(&self, s: f64) -> Result<(f64, f64)> {
        let Chart::Revolution { x, y } = &self.chart else {
            return Err(GeoError::InvalidArgument("closed forms need a surface of revolution".into()));
        };
        let gx = x.eval_jet3("s", s)?;
        let gy = y.eval_jet3("s", s)?;
        let deviation = ((gx.d1 * gx.d1 + gy.d1 * gy.d1).sqrt() - 1.0).abs();
        if deviation > 1e-6 {
            return Err(GeoError::NotUnitSpeed { s, deviation });
        }
        if gx.d1.abs() < 1e-12 {
            return Err(GeoError::InvalidArgument(format!("x′({s}) = 0: the closed forms do not apply")));
        }
        Ok((-gy.d2 / gx.d1.abs(), gx.d1.abs() / gy.f))
    }

    /// Bounding-box diagonal of a coarse sample of the chart.
    pub fn scale(&self) -> f64 {
        let d = &self.domain;
        let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for i in 0..=8 {
            for j in 0..=8 {
                let u = d.u.0 + (d.u.1 - d.u.0) * i as f64 / 8.0;
                let v = d.v.0 + (d.v.1 - d.v.0) * j as f64 / 8.0;
                if let Ok(p) = self.point(u, v) {
                    lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
                    hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
                }
            }
        }
        let s = (hi - lo).norm();
        if s.is_finite() && s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// Residual `κ·cos α − k_n` for a space curve lying on the surface, where
    /// the curve passes through the chart point `at` at parameter `t`.
    pub fn meusnier_check(&self, curve: &crate::curves::CurveSpec, t: f64, at: (f64, f64)) -> Result<f64> {
        let jet = self.chart_jet(at.0, at.1)?;
        let cj = curve.jet(t)?;
        let off = cj.p.distance(jet.p);
        if off > 1e-6 * (1.0 + self.scale()) {
            return Err(GeoError::InvalidArgument(format!("curve is {off:e} away from the surface")));
        }
        let frame = curve.frenet(t)?;
        let w = jet.pull(cj.d1)?;
        let f = jet.forms();
        let k_n = f.second().form(w, w) / f.first().form(w, w);
        Ok(frame.kappa * frame.normal.dot(jet.normal) - k_n)
    }

    /// `∬ h · |s_u × s_v| du dv` over a region by the midpoint rule on a
    /// `grid × grid` mesh of the region's bounding rectangle.
    pub fn integrate_region(&self, integrand: &Integrand, region: &Region, grid: usize) -> Result<f64> {
        let (ru, rv) = region.rect();
        let n = grid.max(1);
        let (hu, hv) = ((ru.1 - ru.0) / n as f64, (rv.1 - rv.0) / n as f64);
        let rows: Vec<Result<(f64, usize)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let u = ru.0 + (i as f64 + 0.5) * hu;
                let mut vals = Vec::with_capacity(n);
                let mut inside = 0;
                for j in 0..n {
                    let v = rv.0 + (j as f64 + 0.5) * hv;
                    if !region.contains(u, v)? {
                        continue;
                    }
                    inside += 1;
                    let jet = self.chart_jet(u, v)?;
                    let jac = jet.s_u.cross(jet.s_v).norm();
                    vals.push(integrand.eval(&jet, u, v)? * jac);
                }
                Ok((pairwise_sum(&vals), inside))
            })
            .collect();
        let mut sums = Vec::with_capacity(n);
        let mut count = 0;
        for r in rows {
            let (s, c) = r?;
            sums.push(s);
            count += c;
        }
        if count == 0 {
            return Err(GeoError::EmptyRegion);
        }
        Ok(pairwise_sum(&sums) * hu * hv)
    }

    /// Integral at `grid` and `2·grid` with their difference.
    pub fn integrate_refined(&self, integrand: &Integrand, region: &Region, grid: usize) -> Result<Refined> {
        let coarse = self.integrate_region(integrand, region, grid)?;
        let fine = self.integrate_region(integrand, region, 2 * grid)?;
        Ok(Refined { coarse, fine, delta: (fine - coarse).abs() })
    }

    pub fn area(&self, region: &Region, grid: usize) -> Result<f64> {
        self.integrate_region(&Integrand::One, region, grid)
    }

    pub fn total_gauss_curvature(&self, region: &Region, grid: usize) -> Result<f64> {
        self.integrate_region(&Integrand::Gauss, region, grid)
    }

    /// The full chart domain as a region.
    pub fn full_region(&self) -> Region {
        Region::Rect { u: self.domain.u, v: self.domain.v }
    }
}

/// Principal data from a chart jet via the generalized problem `II·v = k·I·v`.
pub fn report_from_jet(jet: &ChartJet) -> Result<CurvatureReport> {
    let f = jet.forms();
    let eig = eig_generalized_sym2(&f.second(), &f.first())?;
    let scale = eig.k1.abs().max(eig.k2.abs()).max(1e-12);
    let umbilic = eig.k2 - eig.k1 <= 1e-8 * scale;
    let (c1, c2) = if umbilic {
        // any first-form orthonormal pair is principal
        let e = f.e.sqrt();
        let c1 = Vec2::new(1.0 / e, 0.0);
        let w = Vec2::new(-f.f / f.e, 1.0);
        let c2 = w / f.first().form(w, w).sqrt();
        (c1, c2)
    } else {
        (eig.v1, eig.v2)
    };
    Ok(CurvatureReport {
        k1: eig.k1,
        k2: eig.k2,
        dir1: jet.push(c1),
        dir2: jet.push(c2),
        chart_dir1: c1,
        chart_dir2: c2,
        gauss: eig.k1 * eig.k2,
        mean: eig.k1 + eig.k2,
        normal: jet.normal,
        umbilic,
    })
}

/// Matrix of the shape operator in the basis `(s_u, s_v)`: the solution of `I·M = II`.
pub fn shape_matrix(jet: &ChartJet) -> Result<Mat2> {
    let f = jet.forms();
    let inv = f.first().inverse().ok_or(GeoError::NotPositiveDefinite)?;
    if !(f.e > 0.0 && f.first().det() > 0.0) {
        return Err(GeoError::NotPositiveDefinite);
    }
    Ok(inv.mul_mat(&f.second()))
}

/// What to integrate over a region, multiplied by the area element.
#[derive(Debug, Clone)]
pub enum Integrand {
    One,
    Gauss,
    Mean,
    /// An expression in the chart parameters `u`, `v`.
    Expr(Expr),
}

impl Integrand {
    fn eval(&self, jet: &ChartJet, u: f64, v: f64) -> Result<f64> {
        match self {
            Integrand::One => Ok(1.0),
            Integrand::Gauss => Ok(report_from_jet(jet)?.gauss),
            Integrand::Mean => Ok(report_from_jet(jet)?.mean),
            Integrand::Expr(e) => e.eval(&[u, v]),
        }
    }
}

/// A parameter-space region: a rectangle, or the part of a rectangle where
/// an indicator expression `g(u, v) ≤ 0`.
#[derive(Debug, Clone)]
pub enum Region {
    Rect { u: (f64, f64), v: (f64, f64) },
    Indicator { u: (f64, f64), v: (f64, f64), g: Expr },
}

impl Region {
    pub fn rect(&self) -> ((f64, f64), (f64, f64)) {
        match self {
            Region::Rect { u, v } | Region::Indicator { u, v, .. } => (*u, *v),
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> Result<bool> {
        match self {
            Region::Rect { u: (u0, u1), v: (v0, v1) } => Ok(u >= *u0 && u <= *u1 && v >= *v0 && v <= *v1),
            Region::Indicator { u: (u0, u1), v: (v0, v1), g } => {
                Ok(u >= *u0 && u <= *u1 && v >= *v0 && v <= *v1 && g.eval(&[u, v])? <= 0.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub coarse: f64,
    pub fine: f64,
    pub delta: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sphere() -> SurfaceSpec {
        SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 })
    }

    #[test]
    fn flat_graph_jet() {
        let s = SurfaceSpec::graph("0", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let j = s.chart_jet(0.3, -0.2).unwrap();
        assert_eq!(j.normal, Vec3::Z);
        assert_eq!(j.p, Vec3::new(0.3, -0.2, 0.0));
        assert_eq!((j.s_uu, j.s_uv, j.s_vv), (Vec3::ZERO, Vec3::ZERO, Vec3::ZERO));
    }

    #[test]
    fn sphere_normal_is_radial_and_shape_is_minus_identity() {
        let s = sphere();
        for (u, v) in [(0.0, 0.0), (1.0, 0.3), (-2.5, -1.2)] {
            let j = s.chart_jet(u, v).unwrap();
            assert!((j.p.norm() - 1.0).abs() < 1e-12);
            assert!((j.normal - j.p).norm() < 1e-12);
            let m = shape_matrix(&j).unwrap();
            for (a, b) in [(m.a11, -1.0), (m.a12, 0.0), (m.a21, 0.0), (m.a22, -1.0)] {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let inward = sphere().with_flipped_normal();
        let m = shape_matrix(&inward.chart_jet(0.4, 0.2).unwrap()).unwrap();
        assert!((m.a11 - 1.0).abs() < 1e-12 && (m.a22 - 1.0).abs() < 1e-12);
        assert!(matches!(s.chart_jet(0.0, 0.5 * PI), Err(GeoError::DegenerateChart { .. })));
    }

    #[test]
    fn catenoid_jet_matches_partials() {
        let c = SurfaceSpec::builtin(Builtin::Catenoid { c: 1.0, half_height: 1.5 });
        let th = 0.7;
        let j = c.chart_jet(0.0, th).unwrap();
        let (s, co) = th.sin_cos();
        assert!((j.p - Vec3::new(0.0, co, s)).norm() < 1e-15);
        assert!((j.s_u - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((j.s_v - Vec3::new(0.0, -s, co)).norm() < 1e-15);
        assert!((j.s_uu - Vec3::new(0.0, co, s)).norm() < 1e-15);
        assert!(j.s_uv.norm() < 1e-15);
        assert!((j.s_vv - Vec3::new(0.0, -co, -s)).norm() < 1e-15);
    }

    #[test]
    fn paraboloid_shape_is_hessian() {
        let p = SurfaceSpec::graph("(x^2 + y^2)/2", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let m = shape_matrix(&p.chart_jet(0.0, 0.0).unwrap()).unwrap();
        assert_eq!((m.a11, m.a12, m.a21, m.a22), (1.0, 0.0, 0.0, 1.0));
        // tangent-normal route: at a critical point the shape matrix is the Hessian
        let g = SurfaceSpec::graph("0.3*x^2 + 0.8*x*y - 0.5*y^2 + x^3", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let m = shape_matrix(&g.chart_jet(0.0, 0.0).unwrap()).unwrap();
        assert!((m.a11 - 0.6).abs() < 1e-15 && (m.a12 - 0.8).abs() < 1e-15 && (m.a22 + 1.0).abs() < 1e-15);
    }

    #[test]
    fn cylinder_curvatures() {
        let c = SurfaceSpec::builtin(Builtin::Cylinder { radius: 1.0, height: 2.0 });
        // chart normal of (cos u, sin u, v) is outward; flip for the inward one
        let r = c.with_flipped_normal().curvature_report(0.3, 0.1).unwrap();
        assert!(r.k1.abs() < 1e-12 && (r.k2 - 1.0).abs() < 1e-12);
        assert!(r.dir1.dot(Vec3::Z).abs() > 1.0 - 1e-12);
    }

    #[test]
    fn gallery_curvatures() {
        let ps = SurfaceSpec::builtin(Builtin::Pseudosphere { s_max: 4.0 });
        for s in [0.2, 1.0, 2.5, 3.9] {
            assert!((ps.curvature_report(s, 0.4).unwrap().gauss + 1.0).abs() < 1e-6);
        }
        let cat = SurfaceSpec::builtin(Builtin::Catenoid { c: 1.0, half_height: 1.5 });
        let hel = SurfaceSpec::builtin(Builtin::Helicoid { c: 1.0, half_width: 2.0 });
        for (u, v) in [(0.1, 0.2), (-1.0, 2.0), (1.3, -2.9)] {
            assert!(cat.curvature_report(u, v).unwrap().mean.abs() < 1e-8);
            assert!(hel.curvature_report(u, v).unwrap().mean.abs() < 1e-8);
        }
        let r2 = SurfaceSpec::builtin(Builtin::Sphere { radius: 2.0 });
        assert_relative_eq!(r2.curvature_report(0.3, 0.4).unwrap().gauss, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn revolution_closed_forms() {
        let sph = SurfaceSpec::revolution("sin(s)", "cos(s)", (-1.5, 1.5), (-PI, PI)).unwrap();
        let (a, b) = sph.revolution_principal(0.3).unwrap();
        assert_relative_eq!(a, 1.0, epsilon = 1e-14);
        assert_relative_eq!(b, 1.0, epsilon = 1e-14);
        let cyl = SurfaceSpec::revolution("s", "1", (-1.0, 1.0), (-PI, PI)).unwrap();
        assert_eq!(cyl.revolution_principal(0.2).unwrap(), (0.0, 1.0));
        let torus = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        let (a, b) = torus.revolution_principal(0.0).unwrap();
        assert_relative_eq!(a, 1.0, epsilon = 1e-14);
        assert_relative_eq!(b, 1.0 / 3.0, epsilon = 1e-14);
        let r = torus.curvature_report(0.0, 0.5).unwrap();
        assert_relative_eq!(r.k1, 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(r.k2, 1.0, epsilon = 1e-12);
        let cat = SurfaceSpec::builtin(Builtin::Catenoid { c: 1.0, half_height: 1.0 });
        assert!(matches!(cat.revolution_principal(0.5), Err(GeoError::NotUnitSpeed { .. })));
    }

    #[test]
    fn euler_formula() {
        let s = SurfaceSpec::parametric("u", "v", "sin(u)*cos(v) + 0.3*u*v", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let (u, v) = (0.4, -0.3);
        let r = s.curvature_report(u, v).unwrap();
        for k in 0..12 {
            let th = k as f64 * PI / 6.0;
            let d = r.chart_dir1 * th.cos() + r.chart_dir2 * th.sin();
            let kn = s.normal_curvature(u, v, d).unwrap();
            let want = r.k1 * th.cos().powi(2) + r.k2 * th.sin().powi(2);
            assert!((kn - want).abs() < 1e-8);
        }
        assert!(r.dir1.dot(r.dir2).abs() < 1e-8);
    }

    #[test]
    fn meusnier() {
        let s = sphere();
        let great = crate::curves::CurveSpec::analytic("cos(t)", "sin(t)", "0", 0.0, TAU, true).unwrap();
        assert!(s.meusnier_check(&great, 0.5, (0.5, 0.0)).unwrap().abs() < 1e-12);
        for phi in [0.3f64, 0.9, 1.4] {
            let lat = crate::curves::CurveSpec::analytic(
                &format!("{}*cos(t)", phi.sin()),
                &format!("{}*sin(t)", phi.sin()),
                &format!("{}", phi.cos()),
                0.0,
                TAU,
                true,
            )
            .unwrap();
            let res = s.meusnier_check(&lat, 1.0, (1.0, 0.5 * PI - phi)).unwrap();
            assert!(res.abs() < 1e-8, "{phi}: {res}");
        }
    }

    #[test]
    fn region_integrals() {
        let s = sphere();
        let k = s.total_gauss_curvature(&s.full_region(), 400).unwrap();
        assert!((k - 4.0 * PI).abs() < 1e-3, "{k}");
        let torus = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        assert!(torus.total_gauss_curvature(&torus.full_region(), 200).unwrap().abs() < 1e-3);
        let plane = SurfaceSpec::graph("0", (0.0, 3.0), (0.0, 2.0)).unwrap();
        assert_relative_eq!(plane.area(&plane.full_region(), 10).unwrap(), 6.0, epsilon = 1e-12);
        let disk = Region::Indicator { u: (-1.0, 1.0), v: (-1.0, 1.0), g: Expr::parse("u^2 + v^2 - 1", &["u", "v"]).unwrap() };
        let r = plane.integrate_refined(&Integrand::One, &disk, 400).unwrap();
        assert!((r.fine - PI).abs() < 5e-3 && r.delta < 1e-2);
        let empty = Region::Indicator { u: (0.0, 1.0), v: (0.0, 1.0), g: Expr::parse("1", &["u", "v"]).unwrap() };
        assert!(matches!(plane.area(&empty, 10), Err(GeoError::EmptyRegion)));
    }

    #[test]
    fn mean_square_normal_curvature_matches_formula() {
        let s = sphere();
        assert_relative_eq!(s.mean_square_normal_curvature(0.1, 0.2, 64).unwrap(), 1.0, epsilon = 1e-12);
        let c = SurfaceSpec::builtin(Builtin::Cylinder { radius: 1.0, height: 1.0 });
        assert_relative_eq!(c.mean_square_normal_curvature(0.1, 0.2, 64).unwrap(), 0.375, epsilon = 1e-12);
        let g = SurfaceSpec::builtin(Builtin::Saddle { a: 1.0, half_width: 1.0 });
        let r = g.curvature_report(0.3, 0.2).unwrap();
        let n = 256;
        let avg = g.mean_square_normal_curvature(0.3, 0.2, n).unwrap();
        let formula = 0.375 * r.mean * r.mean - 0.5 * r.gauss;
        assert!((avg - formula).abs() < 2.0 / (n as f64).sqrt());
    }

    #[test]
    fn orientation_flip_and_scaling() {
        let s = SurfaceSpec::builtin(Builtin::Torus { major: 3.0, minor: 1.0 });
        let (u, v) = (0.7, 0.2);
        let a = s.curvature_report(u, v).unwrap();
        let b = s.clone().with_flipped_normal().curvature_report(u, v).unwrap();
        assert_relative_eq!(a.mean, -b.mean, epsilon = 1e-12);
        assert_relative_eq!(a.gauss, b.gauss, epsilon = 1e-12);
        assert_relative_eq!(a.k1, -b.k2, epsilon = 1e-12);
        let lam = 2.5;
        let c = s.scaled(lam).curvature_report(u, v).unwrap();
        assert_relative_eq!(c.gauss, a.gauss / (lam * lam), epsilon = 1e-8);
        assert_relative_eq!(c.mean, a.mean / lam, epsilon = 1e-8);
    }

    #[test]
    fn graph_and_parametric_saddle_agree() {
        let g = SurfaceSpec::graph("x^2 - y^2", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let p = SurfaceSpec::parametric("u", "v", "u^2 - v^2", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        for (u, v) in [(0.0, 0.0), (0.3, -0.4), (0.9, 0.9)] {
            let (a, b) = (g.curvature_report(u, v).unwrap(), p.curvature_report(u, v).unwrap());
            assert!((a.k1 - b.k1).abs() < 1e-9 && (a.k2 - b.k2).abs() < 1e-9);
        }
        assert_relative_eq!(g.curvature_report(0.0, 0.0).unwrap().gauss, -4.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn normal_curvature_lies_between_principal(u in -0.9..0.9f64, v in -0.9..0.9f64, th in 0.0..TAU) {
                let s = SurfaceSpec::parametric("u + 0.2*v^2", "v", "exp(0.5*u)*cos(v)", (-1.0, 1.0), (-1.0, 1.0)).unwrap();
                let r = s.curvature_report(u, v).unwrap();
                let kn = s.normal_curvature(u, v, Vec2::from_angle(th)).unwrap();
                prop_assert!(kn >= r.k1 - 1e-8 && kn <= r.k2 + 1e-8);
            }
        }
    }
}
