//! Task schemas and their execution.

use std::f64::consts::TAU;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use difgeo::curvebuild::{curve_points, reconstruct_plane, reconstruct_space, IntrinsicSpec};
use difgeo::curves::{Check, CurveSpec, TheoremOptions};
use difgeo::geodesy::{geodesic_circle_length, geodesic_residual, orthonormal_basis, shoot_log, trace_geodesic, ShootOptions};
use difgeo::intrinsic::{egregium_check, jacobi_residual, max_abs, polar_field};
use difgeo::surfaces::{Region, SurfaceSpec};
use difgeo::transport::{angle_mod_tau, gauss_bonnet, parallel_transport, total_geodesic_curvature, OnSurfaceCurve, Resolution};
use difgeo::{Expr, Vec2, Vec3};

use crate::objects::{build, Object};
use crate::plot::{self, Projection, RasterRow};
use crate::report::{Meta, Report};
use crate::specfile::{Block, BlockKind, SpecError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    CurveAnalyze,
    CurveReconstruct,
    CurveCrofton,
    SurfaceReport,
    SurfaceGeodesic,
    SurfaceTransport,
    SurfaceGaussBonnet,
    SurfaceIntrinsic,
}

const COMMON: [&str; 6] = ["op", "object", "steps", "grid", "samples", "tol"];

impl Op {
    pub const ALL: [Op; 8] = [
        Op::CurveAnalyze,
        Op::CurveReconstruct,
        Op::CurveCrofton,
        Op::SurfaceReport,
        Op::SurfaceGeodesic,
        Op::SurfaceTransport,
        Op::SurfaceGaussBonnet,
        Op::SurfaceIntrinsic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::CurveAnalyze => "curve analyze",
            Op::CurveReconstruct => "curve reconstruct",
            Op::CurveCrofton => "curve crofton",
            Op::SurfaceReport => "surface report",
            Op::SurfaceGeodesic => "surface geodesic",
            Op::SurfaceTransport => "surface transport",
            Op::SurfaceGaussBonnet => "surface gauss-bonnet",
            Op::SurfaceIntrinsic => "surface intrinsic",
        }
    }

    pub fn parse(text: &str) -> Option<Op> {
        let norm = text.split_whitespace().collect::<Vec<_>>().join(" ");
        Op::ALL.into_iter().find(|o| o.name() == norm)
    }

    /// Task keys beyond [`COMMON`].
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Op::CurveAnalyze => &["at"],
            Op::CurveReconstruct => &["closed"],
            Op::CurveCrofton => &[],
            Op::SurfaceReport => &["at"],
            Op::SurfaceGeodesic => &["at", "dir", "length", "to"],
            Op::SurfaceTransport => &["loop_u", "loop_v", "t", "closed", "vector"],
            Op::SurfaceGaussBonnet => &["loop_u", "loop_v", "t", "rect", "region", "inside"],
            Op::SurfaceIntrinsic => &["at", "radius", "rays", "circle_radius"],
        }
    }

    pub fn object_kind(self) -> BlockKind {
        match self {
            Op::CurveAnalyze | Op::CurveCrofton => BlockKind::Curve,
            Op::CurveReconstruct => BlockKind::Intrinsic,
            _ => BlockKind::Surface,
        }
    }
}

#[derive(Debug, Clone)]
enum Boundary {
    Rect((f64, f64), (f64, f64)),
    Loop { curve: OnSurfaceCurve, region: Region },
}

#[derive(Debug, Clone)]
enum Options {
    Analyze { at: Vec<f64> },
    Reconstruct { closed: Option<bool> },
    Crofton,
    Report { at: (f64, f64) },
    Trace { at: (f64, f64), dir: Vec2, length: f64 },
    Shoot { at: (f64, f64), to: (f64, f64) },
    Transport { curve: OnSurfaceCurve, vector: Option<Vec2> },
    GaussBonnet { boundary: Boundary },
    Intrinsic { at: (f64, f64), radius: f64, rays: usize, circle_radius: f64 },
}

/// A validated task, ready to run.
#[derive(Debug, Clone)]
pub struct Task {
    pub name: String,
    pub op: Op,
    pub index: usize,
    block: Block,
    object_echo: serde_json::Map<String, serde_json::Value>,
    object: Object,
    options: Options,
    steps: Option<usize>,
    grid: Option<usize>,
    samples: Option<usize>,
    tol: Option<f64>,
}

/// Global settings from the command line; per-task keys take precedence.
#[derive(Debug, Clone)]
pub struct Settings {
    pub steps: Option<usize>,
    pub grid: Option<usize>,
    pub samples: Option<usize>,
    pub tol: f64,
    pub seed: u64,
    pub timestamp: bool,
    /// Artifact directory and file-name prefix, when plots are requested.
    pub plot: Option<(PathBuf, String)>,
    pub projection: Option<Projection>,
}

fn loop_curve(b: &Block, default_closed: bool) -> Result<OnSurfaceCurve, SpecError> {
    let u = b.require("loop_u", b.expr_text("loop_u")?)?;
    let v = b.require("loop_v", b.expr_text("loop_v")?)?;
    let (t0, t1) = b.pair("t")?.unwrap_or((0.0, TAU));
    let closed = b.boolean("closed")?.unwrap_or(default_closed);
    OnSurfaceCurve::from_exprs(&u, &v, t0, t1, closed).map_err(|e| b.lib_error("loop_u", e))
}

impl Task {
    pub fn prepare(index: usize, block: &Block, object_block: &Block) -> Result<Task, SpecError> {
        let b = block;
        let op_text = b.require("op", b.text("op")?)?;
        let op = Op::parse(&op_text).ok_or_else(|| {
            let names: Vec<_> = Op::ALL.iter().map(|o| o.name()).collect();
            b.lib_error("op", format!("unknown operation `{op_text}` (one of: {})", names.join(", ")))
        })?;
        let mut allowed = COMMON.to_vec();
        allowed.extend_from_slice(op.keys());
        b.only(&allowed)?;
        if object_block.kind != op.object_kind() {
            return Err(b.lib_error(
                "object",
                format!("`{op_text}` needs a {} object, `{}` is a {}", op.object_kind().word(), object_block.name, object_block.kind.word()),
            ));
        }
        let object = build(object_block)?;
        let need_at = |key: &str| b.require(key, b.pair(key)?);
        let options = match op {
            Op::CurveAnalyze => Options::Analyze { at: b.list("at")?.unwrap_or_default() },
            Op::CurveReconstruct => Options::Reconstruct { closed: b.boolean("closed")? },
            Op::CurveCrofton => Options::Crofton,
            Op::SurfaceReport => Options::Report { at: need_at("at")? },
            Op::SurfaceGeodesic => {
                let at = need_at("at")?;
                match (b.pair("to")?, b.pair("dir")?) {
                    (Some(_), Some(_)) => return Err(b.lib_error("to", "give either `to` or `dir`, not both")),
                    (Some(to), None) => {
                        if b.has("length") {
                            return Err(b.lib_error("length", "`length` only applies with `dir`"));
                        }
                        Options::Shoot { at, to }
                    }
                    (None, Some((du, dv))) => {
                        let length = b.num("length")?.unwrap_or(1.0);
                        if !(length > 0.0) {
                            return Err(b.lib_error("length", "must be positive"));
                        }
                        Options::Trace { at, dir: Vec2::new(du, dv), length }
                    }
                    (None, None) => return Err(b.error(b.line, format!("task `{}` needs `dir` or `to`", b.name))),
                }
            }
            Op::SurfaceTransport => {
                let vector = b.pair("vector")?.map(|(a, c)| Vec2::new(a, c));
                Options::Transport { curve: loop_curve(b, true)?, vector }
            }
            Op::SurfaceGaussBonnet => {
                let boundary = if let Some([u0, u1, v0, v1]) = b.fixed::<4>("rect")? {
                    if ["loop_u", "loop_v", "t", "region", "inside"].iter().any(|k| b.has(k)) {
                        return Err(b.lib_error("rect", "`rect` replaces `loop_u`, `loop_v`, `t`, `region` and `inside`"));
                    }
                    if !(u0 < u1 && v0 < v1) {
                        return Err(b.lib_error("rect", "needs u0 < u1 and v0 < v1"));
                    }
                    Boundary::Rect((u0, u1), (v0, v1))
                } else {
                    let curve = loop_curve(b, true)?;
                    let [u0, u1, v0, v1] = b.require("region", b.fixed::<4>("region")?)?;
                    let g = b.require("inside", b.expr_text("inside")?)?;
                    let g = Expr::parse(&g, &["u", "v"]).map_err(|e| b.lib_error("inside", e))?;
                    Boundary::Loop { curve, region: Region::Indicator { u: (u0, u1), v: (v0, v1), g } }
                };
                Options::GaussBonnet { boundary }
            }
            Op::SurfaceIntrinsic => {
                let radius = b.num("radius")?.unwrap_or(0.3);
                let circle_radius = b.num("circle_radius")?.unwrap_or(0.05);
                if !(radius > 0.0 && circle_radius > 0.0) {
                    return Err(b.lib_error("radius", "radii must be positive"));
                }
                Options::Intrinsic { at: need_at("at")?, radius, rays: b.count("rays")?.unwrap_or(16), circle_radius }
            }
        };
        if let Some(t) = b.num("tol")? {
            if !(t > 0.0) {
                return Err(b.lib_error("tol", "must be positive"));
            }
        }
        Ok(Task {
            name: b.name.clone(),
            op,
            index,
            block: block.clone(),
            object_echo: object_block.echo(),
            object,
            options,
            steps: b.count("steps")?,
            grid: b.count("grid")?,
            samples: b.count("samples")?,
            tol: b.num("tol")?,
        })
    }

    /// Runs the task; library failures become an `error` report, never a panic.
    pub fn run(&self, settings: &Settings) -> Report {
        let timestamp = settings
            .timestamp
            .then(|| std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs()));
        let tol = self.tol.unwrap_or(settings.tol);
        let meta = Meta { seed: settings.seed, tol, timestamp };
        let mut inputs = self.block.echo();
        inputs.remove("op");
        inputs.insert("object_spec".into(), serde_json::Value::Object(self.object_echo.clone()));
        let mut report = Report::new(&self.name, self.op.name(), inputs, meta);
        let mut ctx = Ctx {
            task: self,
            settings,
            tol,
            steps: self.steps.or(settings.steps),
            grid: self.grid.or(settings.grid),
            samples: self.samples.or(settings.samples),
            polylines: Vec::new(),
            csv: None,
        };
        if let Err(message) = ctx.dispatch(&mut report) {
            report.fail(message);
        }
        if let Err(message) = ctx.emit_artifacts(&mut report) {
            report.fail(message);
        }
        report
    }

    /// Stream `index` of the ChaCha generator seeded with `seed`.
    pub fn rng(&self, seed: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(self.index as u64);
        rng
    }
}

struct Ctx<'a> {
    task: &'a Task,
    settings: &'a Settings,
    tol: f64,
    steps: Option<usize>,
    grid: Option<usize>,
    samples: Option<usize>,
    polylines: Vec<Vec<Vec3>>,
    csv: Option<String>,
}

type Run = Result<(), String>;

fn lib<T>(r: difgeo::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

impl Ctx<'_> {
    fn dispatch(&mut self, r: &mut Report) -> Run {
        match (&self.task.object, &self.task.options) {
            (Object::Curve(c), Options::Analyze { at }) => self.analyze(r, c, at),
            (Object::Intrinsic(i), Options::Reconstruct { closed }) => self.reconstruct(r, i, *closed),
            (Object::Curve(c), Options::Crofton) => self.crofton(r, c),
            (Object::Surface(s), Options::Report { at }) => self.report(r, s, *at),
            (Object::Surface(s), Options::Trace { at, dir, length }) => self.trace(r, s, *at, *dir, *length),
            (Object::Surface(s), Options::Shoot { at, to }) => self.shoot(r, s, *at, *to),
            (Object::Surface(s), Options::Transport { curve, vector }) => self.transport(r, s, curve, *vector),
            (Object::Surface(s), Options::GaussBonnet { boundary }) => self.gauss_bonnet(r, s, boundary),
            (Object::Surface(s), Options::Intrinsic { at, radius, rays, circle_radius }) => {
                self.intrinsic(r, s, *at, *radius, *rays, *circle_radius)
            }
            _ => Err("object does not match the operation".into()),
        }
    }

    fn analyze(&mut self, r: &mut Report, c: &CurveSpec, at: &[f64]) -> Run {
        let n = self.steps.unwrap_or(4000);
        let op = r.operation("CurveSpec::length", json!({ "n": n }));
        r.scalar(op, "length", lib(c.length(n))?, "length");
        let op = r.operation("CurveSpec::total_curvature", json!({ "n": n }));
        r.scalar(op, "total_curvature", lib(c.total_curvature(n))?, "rad");
        let plane = c.require_plane().is_ok();
        if plane {
            let op = r.operation("CurveSpec::total_signed_curvature", json!({ "n": n }));
            r.scalar(op, "total_signed_curvature", lib(c.total_signed_curvature(n))?, "rad");
        }
        for &t in at {
            if plane {
                let op = r.operation("CurveSpec::signed_curvature", json!({ "t": t }));
                r.scalar(op, format!("k_signed(t={t})"), lib(c.signed_curvature(t))?, "1/length");
            } else {
                let op = r.operation("CurveSpec::frenet", json!({ "t": t }));
                let f = lib(c.frenet(t))?;
                r.scalar(op, format!("kappa(t={t})"), f.kappa, "1/length");
                r.scalar(op, format!("tau(t={t})"), f.tau, "1/length");
            }
        }
        if c.is_closed() {
            let opts = TheoremOptions { quadrature: n, grid: self.grid.unwrap_or(400) };
            let op = r.operation("CurveSpec::theorem_checks", json!({ "quadrature": opts.quadrature, "grid": opts.grid }));
            let th = lib(c.theorem_checks(&opts))?;
            for (name, check) in [("fenchel_margin", &th.fenchel), ("dna_margin", &th.dna)] {
                match check {
                    Check::Margin(m) => {
                        r.scalar(op, name, *m, "rad");
                        let tol = self.tol;
                        r.check(*m >= -tol, || format!("{name} {m:.3e} is below −{tol:.0e}"));
                    }
                    Check::Skipped(why) => r.notes.push(format!("{name} skipped: {why}")),
                }
            }
        }
        let (t0, t1) = c.domain();
        let ts = linspace(t0, t1, self.grid.unwrap_or(512));
        let pts = lib(ts.iter().map(|&t| c.point(t)).collect::<difgeo::Result<Vec<_>>>())?;
        self.csv = Some(plot::curve_csv(&ts, &pts));
        self.polylines.push(pts);
        Ok(())
    }

    fn reconstruct(&mut self, r: &mut Report, spec: &IntrinsicSpec, closed: Option<bool>) -> Run {
        let steps = self.steps.unwrap_or(20_000);
        let pts = if spec.tau.is_some() {
            let op = r.operation("reconstruct_space", json!({ "steps": steps }));
            let rec = lib(reconstruct_space(spec, steps))?;
            r.scalar(op, "frame_drift", rec.max_drift, "1");
            let pts = lib(curve_points(&rec.curve))?;
            self.record_endpoints(r, op, &pts);
            pts
        } else {
            let op = r.operation("reconstruct_plane", json!({ "steps": steps }));
            let pts = lib(reconstruct_plane(spec, steps).and_then(|c| curve_points(&c)))?;
            self.record_endpoints(r, op, &pts);
            pts
        };
        if closed == Some(true) {
            let gap = r.get("closure_gap").unwrap_or(f64::INFINITY);
            let tol = self.tol;
            r.check(gap <= tol, || format!("closure gap {gap:.3e} exceeds {tol:.0e}"));
        }
        let ss = linspace(spec.s0, spec.s1, pts.len().saturating_sub(1).max(1));
        self.csv = Some(plot::curve_csv(&ss, &pts));
        self.polylines.push(pts);
        Ok(())
    }

    fn record_endpoints(&self, r: &mut Report, op: usize, pts: &[Vec3]) {
        let (Some(a), Some(b)) = (pts.first(), pts.last()) else { return };
        r.scalar(op, "closure_gap", a.distance(*b), "length");
        r.scalar(op, "end_x", b.x, "length");
        r.scalar(op, "end_y", b.y, "length");
        r.scalar(op, "end_z", b.z, "length");
    }

    fn crofton(&mut self, r: &mut Report, c: &CurveSpec) -> Run {
        let n = self.samples.unwrap_or(10_000);
        let mut rng = self.task.rng(self.settings.seed);
        let op = r.operation("CurveSpec::length", json!({ "n": 4000 }));
        let length = lib(c.length(4000))?;
        r.scalar(op, "length", length, "length");
        let estimate = |r: &mut Report, name: &str, value: f64, op: usize| {
            r.scalar(op, name, value, "length");
            r.scalar(op, format!("{name}_rel_error"), (value - length).abs() / length, "1");
        };
        if c.require_plane().is_ok() {
            let op = r.operation("CurveSpec::crofton_plane", json!({ "n_dirs": n, "stream": self.task.index }));
            let v = lib(c.crofton_plane(n, &mut rng))?;
            estimate(r, "crofton_plane", v, op);
        }
        let op = r.operation("CurveSpec::crofton_space_lines", json!({ "n_dirs": n, "stream": self.task.index }));
        let v = lib(c.crofton_space_lines(n, &mut rng))?;
        estimate(r, "crofton_lines", v, op);
        let op = r.operation("CurveSpec::crofton_space_planes", json!({ "n_dirs": n, "stream": self.task.index }));
        let v = lib(c.crofton_space_planes(n, &mut rng))?;
        estimate(r, "crofton_planes", v, op);
        let pts = lib(c.polyline(512))?;
        let (t0, t1) = c.domain();
        self.csv = Some(plot::curve_csv(&linspace(t0, t1, pts.len().saturating_sub(1).max(1)), &pts));
        self.polylines.push(pts);
        Ok(())
    }

    fn report(&mut self, r: &mut Report, s: &SurfaceSpec, (u, v): (f64, f64)) -> Run {
        let op = r.operation("SurfaceSpec::curvature_report", json!({ "u": u, "v": v }));
        let c = lib(s.curvature_report(u, v))?;
        r.scalar(op, "K", c.gauss, "1/length^2");
        r.scalar(op, "H", c.mean, "1/length");
        r.scalar(op, "k1", c.k1, "1/length");
        r.scalar(op, "k2", c.k2, "1/length");
        for (name, x) in [("normal_x", c.normal.x), ("normal_y", c.normal.y), ("normal_z", c.normal.z)] {
            r.scalar(op, name, x, "1");
        }
        if c.umbilic {
            r.notes.push("umbilic point".into());
        }
        let op = r.operation("SurfaceSpec::forms", json!({ "u": u, "v": v }));
        let f = lib(s.forms(u, v))?;
        for (name, x, unit) in [
            ("E", f.e, "length^2"),
            ("F", f.f, "length^2"),
            ("G", f.g, "length^2"),
            ("L", f.l, "length"),
            ("M", f.m, "length"),
            ("N", f.n, "length"),
        ] {
            r.scalar(op, name, x, unit);
        }
        let op = r.operation("SurfaceSpec::point", json!({ "u": u, "v": v }));
        let p = lib(s.point(u, v))?;
        r.scalar(op, "x", p.x, "length");
        r.scalar(op, "y", p.y, "length");
        r.scalar(op, "z", p.z, "length");
        self.raster(s, s.domain.u, s.domain.v);
        Ok(())
    }

    /// Curvature raster at cell centers; points where the chart degenerates are left out.
    fn raster(&mut self, s: &SurfaceSpec, u: (f64, f64), v: (f64, f64)) {
        if self.settings.plot.is_none() {
            return;
        }
        let n = self.grid.unwrap_or(24).min(400);
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for i in 0..n {
            let uu = u.0 + (u.1 - u.0) * (i as f64 + 0.5) / n as f64;
            let mut line = Vec::new();
            for j in 0..n {
                let vv = v.0 + (v.1 - v.0) * (j as f64 + 0.5) / n as f64;
                let (Ok(p), Ok(c)) = (s.point(uu, vv), s.curvature_report(uu, vv)) else { continue };
                rows.push(RasterRow { u: uu, v: vv, p, gauss: c.gauss, mean: c.mean, k1: c.k1, k2: c.k2 });
                line.push(p);
            }
            lines.push(line);
        }
        self.csv = Some(plot::raster_csv(&rows));
        self.polylines.extend(lines);
    }

    fn trace(&mut self, r: &mut Report, s: &SurfaceSpec, at: (f64, f64), dir: Vec2, length: f64) -> Run {
        let steps = self.steps.unwrap_or(2000);
        let op = r.operation(
            "trace_geodesic",
            json!({ "u": at.0, "v": at.1, "du": dir.x, "dv": dir.y, "duration": length, "steps": steps }),
        );
        let path = lib(trace_geodesic(s, at, dir, length, steps))?;
        let end = path.end();
        r.scalar(op, "end_u", end.u, "1");
        r.scalar(op, "end_v", end.v, "1");
        if let Some(p) = path.points.last() {
            r.scalar(op, "end_x", p.x, "length");
            r.scalar(op, "end_y", p.y, "length");
            r.scalar(op, "end_z", p.z, "length");
        }
        r.scalar(op, "length", path.length(), "length");
        r.scalar(op, "speed_drift", path.speed_drift, "1");
        if let Some(c) = path.clairaut_drift {
            r.scalar(op, "clairaut_drift", c, "1");
        }
        if let Some(t) = path.exit_time {
            r.scalar(op, "exit_time", t, "time");
            r.check(false, || format!("geodesic left the chart at t = {t:.6}"));
        }
        let tol = self.tol;
        let drift = path.speed_drift;
        r.check(drift <= tol, || format!("speed drift {drift:.3e} exceeds {tol:.0e}"));
        let op = r.operation("geodesic_residual", json!({ "path": 0 }));
        r.scalar(op, "residual", lib(geodesic_residual(s, &path))?, "length/time^2");
        self.csv = Some(plot::curve_csv(&path.trajectory.times, &path.points));
        self.polylines.push(path.points);
        Ok(())
    }

    fn shoot(&mut self, r: &mut Report, s: &SurfaceSpec, at: (f64, f64), to: (f64, f64)) -> Run {
        let opts = ShootOptions { steps: self.steps.unwrap_or(ShootOptions::default().steps), ..ShootOptions::default() };
        let op = r.operation(
            "shoot_log",
            json!({ "p": [at.0, at.1], "q": [to.0, to.1], "steps": opts.steps, "tol": opts.tol, "max_iter": opts.max_iter }),
        );
        let res = lib(shoot_log(s, at, to, &opts))?;
        r.scalar(op, "distance", res.distance, "length");
        r.scalar(op, "w_u", res.w.x, "1");
        r.scalar(op, "w_v", res.w.y, "1");
        r.scalar(op, "residual", res.residual, "length");
        r.check(res.converged, || format!("shooting did not converge (miss {:.3e})", res.residual));
        if let Some(path) = res.path {
            self.csv = Some(plot::curve_csv(&path.trajectory.times, &path.points));
            self.polylines.push(path.points);
        }
        Ok(())
    }

    fn loop_polyline(&mut self, s: &SurfaceSpec, curve: &OnSurfaceCurve) -> Run {
        let n = 400;
        let span = curve.span();
        let mut ts = Vec::new();
        let mut pts = Vec::new();
        for i in 0..=n {
            let t = span * i as f64 / n as f64;
            let (k, local) = curve.locate(t);
            let j = lib(curve.pieces[k].jet(s, local))?;
            ts.push(t);
            pts.push(lib(s.point(j.p.x, j.p.y))?);
        }
        self.csv = Some(plot::curve_csv(&ts, &pts));
        self.polylines.push(pts);
        Ok(())
    }

    fn transport(&mut self, r: &mut Report, s: &SurfaceSpec, curve: &OnSurfaceCurve, vector: Option<Vec2>) -> Run {
        let steps = self.steps.unwrap_or(2000);
        let start = lib(curve.start(s))?.p;
        let w0 = match vector {
            Some(w) => w,
            None => lib(orthonormal_basis(s, (start.x, start.y)))?.0,
        };
        let op = r.operation("parallel_transport", json!({ "w0": [w0.x, w0.y], "steps": steps }));
        let tr = lib(parallel_transport(s, curve, w0, steps))?;
        if let Some(w) = tr.samples.last() {
            r.scalar(op, "final_u", w.x, "1");
            r.scalar(op, "final_v", w.y, "1");
        }
        r.scalar(op, "norm_drift", tr.norm_drift, "1");
        let tol = self.tol;
        let drift = tr.norm_drift;
        r.check(drift <= tol, || format!("norm drift {drift:.3e} exceeds {tol:.0e}"));
        if curve.closed {
            r.scalar(op, "holonomy", tr.holonomy_angle, "rad");
            let n = self.grid.unwrap_or(400);
            let op2 = r.operation("total_geodesic_curvature", json!({ "n": n }));
            let psi = lib(total_geodesic_curvature(s, curve, n))?;
            r.scalar(op2, "psi", psi, "rad");
            let op3 = r.operation("angle_mod_tau", json!({ "of": "holonomy + psi" }));
            r.scalar(op3, "holonomy_plus_psi", angle_mod_tau(tr.holonomy_angle + psi), "rad");
        }
        self.loop_polyline(s, curve)
    }

    fn gauss_bonnet(&mut self, r: &mut Report, s: &SurfaceSpec, boundary: &Boundary) -> Run {
        let res = Resolution { boundary: self.steps.unwrap_or(400), grid: self.grid.unwrap_or(400) };
        let (curve, region) = match boundary {
            Boundary::Rect(u, v) => (lib(difgeo::gallery::rect_loop(*u, *v))?, Region::Rect { u: *u, v: *v }),
            Boundary::Loop { curve, region } => (curve.clone(), region.clone()),
        };
        let op = r.operation("gauss_bonnet", json!({ "boundary": res.boundary, "grid": res.grid }));
        let gb = lib(gauss_bonnet(s, &curve, &region, res))?;
        r.scalar(op, "psi", gb.psi, "rad");
        r.scalar(op, "total_k", gb.total_k, "rad");
        r.scalar(op, "residual", gb.residual, "rad");
        r.scalar(op, "refinement_delta", gb.refinement_delta, "rad");
        let tol = self.tol;
        let res_abs = gb.residual.abs();
        r.check(res_abs <= tol, || format!("Gauss-Bonnet residual {res_abs:.3e} exceeds {tol:.0e}"));
        let (u, v) = region.rect();
        self.raster(s, u, v);
        let raster = self.csv.take();
        let lines = std::mem::take(&mut self.polylines);
        self.loop_polyline(s, &curve)?;
        if raster.is_some() {
            self.csv = raster;
        }
        self.polylines.extend(lines);
        Ok(())
    }

    fn intrinsic(&mut self, r: &mut Report, s: &SurfaceSpec, at: (f64, f64), radius: f64, rays: usize, rc: f64) -> Run {
        let nr = self.steps.unwrap_or(100);
        let op = r.operation("polar_field", json!({ "u": at.0, "v": at.1, "r_max": radius, "nr": nr, "ntheta": rays }));
        let field = lib(polar_field(s, at, radius, nr, rays))?;
        r.scalar(op, "gauss_lemma_residual", field.gauss_lemma_residual(), "length");
        r.scalar(op, "radial_speed_defect", field.radial_speed_defect(), "1");
        r.check(field.complete(), || "a geodesic ray left the chart".into());
        let tol = self.tol;
        let gl = field.gauss_lemma_residual();
        r.check(gl <= tol, || format!("Gauss lemma residual {gl:.3e} exceeds {tol:.0e}"));
        let op = r.operation("jacobi_residual", json!({ "field": op }));
        let jac = max_abs(&lib(jacobi_residual(&field, s))?);
        r.scalar(op, "jacobi_residual", jac, "1/length");
        let op = r.operation("SurfaceSpec::curvature_report", json!({ "u": at.0, "v": at.1 }));
        r.scalar(op, "K", lib(s.curvature_report(at.0, at.1))?.gauss, "1/length^2");
        let op = r.operation("egregium_check", json!({ "points": [[at.0, at.1]] }));
        match egregium_check(s, &[at]) {
            Ok(d) => r.scalar(op, "egregium_discrepancy", d, "1/length^2"),
            Err(e) => r.notes.push(format!("egregium check skipped: {e}")),
        }
        let n = self.samples.unwrap_or(512);
        let op = r.operation("geodesic_circle_length", json!({ "r": rc, "n_dirs": n }));
        let c = lib(geodesic_circle_length(s, at, rc, n))?;
        r.scalar(op, "circle_length", c.length, "length");
        r.scalar(op, "circle_k_estimate", c.k_estimate, "1/length^2");
        self.raster(s, s.domain.u, s.domain.v);
        Ok(())
    }

    fn emit_artifacts(&mut self, r: &mut Report) -> Run {
        let Some((dir, prefix)) = &self.settings.plot else { return Ok(()) };
        let stem = format!("{prefix}{}", self.task.name);
        if let Some(csv) = self.csv.take() {
            let name = format!("{stem}.csv");
            plot::write(&dir.join(&name), &csv).map_err(|e| format!("cannot write {name}: {e}"))?;
            r.artifacts.push(name);
        }
        if !self.polylines.is_empty() {
            let proj = self.settings.projection.unwrap_or_else(|| plot::default_projection(&self.polylines));
            let name = format!("{stem}.svg");
            plot::write(&dir.join(&name), &plot::svg(&self.polylines, proj)).map_err(|e| format!("cannot write {name}: {e}"))?;
            r.artifacts.push(name);
        }
        Ok(())
    }
}
