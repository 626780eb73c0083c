//! Batch front end for `difgeo`: spec files in, JSON-lines reports and
//! optional CSV/SVG artifacts out.
//!
//! Exit codes: 0 when every task is `ok`, 1 when any task is flagged or
//! fails, 2 for usage and spec-file errors.

pub mod objects;
pub mod plot;
pub mod report;
pub mod specfile;
pub mod tasks;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::plot::Projection;
use crate::report::{Report, Status};
use crate::specfile::{Block, BlockKind, SpecError, SpecFile, Value};
use crate::tasks::{Op, Settings, Task};

pub const DEFAULT_SEED: u64 = difgeo::verify::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "difgeo", version, about = "Numerical differential geometry of curves and surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Integration steps (per piece for loops; radial samples for polar fields).
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Area grid per side; plot raster size.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Tolerance above which a task is flagged.
    #[arg(long, global = true, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Monte Carlo directions or circle samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Write reports here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write CSV and SVG artifacts next to the report.
    #[arg(long, global = true)]
    plot: bool,
    /// SVG projection: xy, xz, yz or iso.
    #[arg(long, global = true)]
    axes: Option<String>,
    /// Stop after the first task that is not ok.
    #[arg(long, global = true)]
    fail_fast: bool,
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Run independent tasks concurrently.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(subcommand)]
    Curve(CurveCmd),
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Run the acceptance suite over the built-in gallery.
    VerifyGallery,
}

#[derive(Debug, Subcommand)]
enum CurveCmd {
    /// Length, curvature, torsion and closed-curve theorem margins.
    Analyze {
        #[command(flatten)]
        src: CurveSrc,
        /// Parameters at which to report κ and τ.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Rebuild a curve from curvature (and torsion) as functions of arc length.
    Reconstruct {
        #[command(flatten)]
        src: IntrinsicSrc,
        /// Flag the task when the rebuilt curve does not close.
        #[arg(long)]
        closed: bool,
    },
    /// Crofton length estimates.
    Crofton {
        #[command(flatten)]
        src: CurveSrc,
    },
}

#[derive(Debug, Subcommand)]
enum SurfaceCmd {
    /// Fundamental forms and curvatures at a point.
    Report {
        #[command(flatten)]
        src: SurfaceSrc,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// Trace a geodesic from a point, or shoot one between two points.
    Geodesic {
        #[command(flatten)]
        src: SurfaceSrc,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        dir: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        length: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<String>,
    },
    /// Parallel transport and holonomy along a chart loop.
    Transport {
        #[command(flatten)]
        src: SurfaceSrc,
        #[command(flatten)]
        lp: LoopArgs,
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
        /// The loop is an open arc.
        #[arg(long)]
        open: bool,
    },
    /// Gauss-Bonnet residual for a chart rectangle or a loop around an indicator region.
    GaussBonnet {
        #[command(flatten)]
        src: SurfaceSrc,
        #[command(flatten)]
        lp: LoopArgs,
        /// u0,u1,v0,v1
        #[arg(long, allow_hyphen_values = true)]
        rect: Option<String>,
        /// Bounding box u0,u1,v0,v1 of the region inside a loop.
        #[arg(long, allow_hyphen_values = true)]
        region: Option<String>,
        /// g(u, v) with g ≤ 0 inside the loop.
        #[arg(long, allow_hyphen_values = true)]
        inside: Option<String>,
    },
    /// Polar-coordinate diagnostics and intrinsic curvature estimates.
    Intrinsic {
        #[command(flatten)]
        src: SurfaceSrc,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long)]
        radius: Option<String>,
        #[arg(long)]
        rays: Option<String>,
        #[arg(long)]
        circle_radius: Option<String>,
    },
}

#[derive(Debug, Args)]
struct SpecSrc {
    /// Spec file with objects and tasks.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Object of the spec file to use.
    #[arg(long, requires = "spec")]
    object: Option<String>,
}

#[derive(Debug, Args)]
struct CurveSrc {
    #[command(flatten)]
    spec: SpecSrc,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Parameter interval t0,t1.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long)]
    closed_curve: bool,
}

#[derive(Debug, Args)]
struct IntrinsicSrc {
    #[command(flatten)]
    spec: SpecSrc,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long)]
    length: Option<String>,
    /// Arc-length interval s0,s1.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<String>,
}

#[derive(Debug, Args)]
struct SurfaceSrc {
    #[command(flatten)]
    spec: SpecSrc,
    /// One of sphere, cylinder, torus, catenoid, helicoid, pseudosphere, saddle.
    #[arg(long)]
    builtin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    /// Height function f(x, y) of a graph.
    #[arg(long, allow_hyphen_values = true)]
    graph: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    profile_x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    profile_y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    #[arg(long)]
    flip_normal: bool,
}

#[derive(Debug, Args)]
struct LoopArgs {
    #[arg(long, allow_hyphen_values = true)]
    loop_u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    loop_v: Option<String>,
    /// Loop parameter interval t0,t1 (default 0,2π).
    #[arg(long = "loop-t", allow_hyphen_values = true)]
    t: Option<String>,
}

const ARGV: &str = "<command line>";

#[derive(Debug)]
enum Failure {
    Usage(String),
    Spec(SpecError),
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure::Spec(e)
    }
}

fn fill(block: &mut Block, pairs: &[(&str, &Option<String>)]) -> Result<(), SpecError> {
    for (k, v) in pairs {
        if let Some(v) = v {
            block.set(k, Value::parse(v), 0)?;
        }
    }
    Ok(())
}

fn flag(block: &mut Block, key: &str, on: bool) -> Result<(), SpecError> {
    if on {
        block.set(key, Value::Bool(true), 0)?;
    }
    Ok(())
}

impl CurveSrc {
    fn inline(&self) -> Result<Option<Block>, SpecError> {
        let mut b = Block::new(BlockKind::Curve, "curve", ARGV);
        fill(&mut b, &[("x", &self.x), ("y", &self.y), ("z", &self.z), ("t", &self.t)])?;
        flag(&mut b, "closed", self.closed_curve)?;
        Ok((!b.entries.is_empty()).then_some(b))
    }
}

impl IntrinsicSrc {
    fn inline(&self) -> Result<Option<Block>, SpecError> {
        let mut b = Block::new(BlockKind::Intrinsic, "intrinsic", ARGV);
        fill(&mut b, &[("kappa", &self.kappa), ("tau", &self.tau), ("length", &self.length), ("s", &self.s)])?;
        Ok((!b.entries.is_empty()).then_some(b))
    }
}

impl SurfaceSrc {
    fn inline(&self) -> Result<Option<Block>, SpecError> {
        let mut b = Block::new(BlockKind::Surface, "surface", ARGV);
        if let Some(name) = &self.builtin {
            b.set("builtin", Value::Text(name.clone()), 0)?;
        }
        fill(
            &mut b,
            &[
                ("params", &self.params),
                ("x", &self.x),
                ("y", &self.y),
                ("z", &self.z),
                ("graph", &self.graph),
                ("profile_x", &self.profile_x),
                ("profile_y", &self.profile_y),
                ("u", &self.u),
                ("v", &self.v),
            ],
        )?;
        flag(&mut b, "flip_normal", self.flip_normal)?;
        Ok((!b.entries.is_empty()).then_some(b))
    }
}

/// What the command line asked for: the object source and the task keys.
struct Request<'a> {
    op: Op,
    spec: &'a SpecSrc,
    inline: Option<Block>,
    task: Block,
}

impl Command {
    fn request(&self) -> Result<Option<Request<'_>>, SpecError> {
        let task_block = |op: Op| Block::new(BlockKind::Task, &op.name().replace(' ', "-"), ARGV);
        let req = match self {
            Command::VerifyGallery => return Ok(None),
            Command::Curve(c) => match c {
                CurveCmd::Analyze { src, at } => {
                    let mut t = task_block(Op::CurveAnalyze);
                    fill(&mut t, &[("at", at)])?;
                    Request { op: Op::CurveAnalyze, spec: &src.spec, inline: src.inline()?, task: t }
                }
                CurveCmd::Reconstruct { src, closed } => {
                    let mut t = task_block(Op::CurveReconstruct);
                    flag(&mut t, "closed", *closed)?;
                    Request { op: Op::CurveReconstruct, spec: &src.spec, inline: src.inline()?, task: t }
                }
                CurveCmd::Crofton { src } => {
                    Request { op: Op::CurveCrofton, spec: &src.spec, inline: src.inline()?, task: task_block(Op::CurveCrofton) }
                }
            },
            Command::Surface(s) => match s {
                SurfaceCmd::Report { src, at } => {
                    let mut t = task_block(Op::SurfaceReport);
                    fill(&mut t, &[("at", at)])?;
                    Request { op: Op::SurfaceReport, spec: &src.spec, inline: src.inline()?, task: t }
                }
                SurfaceCmd::Geodesic { src, at, dir, length, to } => {
                    let mut t = task_block(Op::SurfaceGeodesic);
                    fill(&mut t, &[("at", at), ("dir", dir), ("length", length), ("to", to)])?;
                    Request { op: Op::SurfaceGeodesic, spec: &src.spec, inline: src.inline()?, task: t }
                }
                SurfaceCmd::Transport { src, lp, vector, open } => {
                    let mut t = task_block(Op::SurfaceTransport);
                    fill(&mut t, &[("loop_u", &lp.loop_u), ("loop_v", &lp.loop_v), ("t", &lp.t), ("vector", vector)])?;
                    if *open {
                        t.set("closed", Value::Bool(false), 0)?;
                    }
                    Request { op: Op::SurfaceTransport, spec: &src.spec, inline: src.inline()?, task: t }
                }
                SurfaceCmd::GaussBonnet { src, lp, rect, region, inside } => {
                    let mut t = task_block(Op::SurfaceGaussBonnet);
                    fill(
                        &mut t,
                        &[
                            ("loop_u", &lp.loop_u),
                            ("loop_v", &lp.loop_v),
                            ("t", &lp.t),
                            ("rect", rect),
                            ("region", region),
                            ("inside", inside),
                        ],
                    )?;
                    Request { op: Op::SurfaceGaussBonnet, spec: &src.spec, inline: src.inline()?, task: t }
                }
                SurfaceCmd::Intrinsic { src, at, radius, rays, circle_radius } => {
                    let mut t = task_block(Op::SurfaceIntrinsic);
                    fill(&mut t, &[("at", at), ("radius", radius), ("rays", rays), ("circle_radius", circle_radius)])?;
                    Request { op: Op::SurfaceIntrinsic, spec: &src.spec, inline: src.inline()?, task: t }
                }
            },
        };
        Ok(Some(req))
    }
}


/// Turns the request into validated tasks.
fn plan(req: Request<'_>) -> Result<Vec<Task>, Failure> {
    let Request { op, spec, inline, mut task } = req;
    task.set("op", Value::Text(op.name().to_string()), 0)?;
    let Some(path) = &spec.spec else {
        let object = inline.ok_or_else(|| Failure::Usage(format!("`{}` needs --spec or an inline object", op.name())))?;
        task.set("object", Value::Text(object.name.clone()), 0)?;
        return Ok(vec![Task::prepare(0, &task, &object)?]);
    };
    if inline.is_some() {
        return Err(Failure::Usage("inline object flags cannot be combined with --spec".into()));
    }
    let file = SpecFile::load(path)?;
    for object in file.objects.values() {
        crate::objects::build(object)?;
    }
    let adhoc = spec.object.is_some() || task.entries.keys().any(|k| k != "op");
    if !adhoc {
        let matching: Vec<&Block> = file
            .tasks
            .iter()
            .filter(|t| matches!(t.text("op"), Ok(Some(o)) if Op::parse(&o) == Some(op)))
            .collect();
        if matching.is_empty() {
            return Err(Failure::Usage(format!(
                "{} has no `{}` tasks; give the task options on the command line",
                path.display(),
                op.name()
            )));
        }
        let mut out = Vec::new();
        for (i, t) in file.tasks.iter().enumerate() {
            if matching.iter().any(|m| std::ptr::eq(*m, t)) {
                out.push(Task::prepare(i, t, file.resolve(t)?)?);
            }
        }
        return Ok(out);
    }
    let kind = op.object_kind();
    let object = match &spec.object {
        Some(name) => file
            .objects
            .get(name)
            .ok_or_else(|| Failure::Usage(format!("{} defines no object `{name}`", path.display())))?,
        None => {
            let mut of_kind = file.objects.values().filter(|b| b.kind == kind);
            match (of_kind.next(), of_kind.next()) {
                (Some(b), None) => b,
                (None, _) => return Err(Failure::Usage(format!("{} defines no {} object", path.display(), kind.word()))),
                (Some(_), Some(_)) => {
                    return Err(Failure::Usage(format!("{} defines several {} objects; pick one with --object", path.display(), kind.word())))
                }
            }
        }
    };
    task.set("object", Value::Text(object.name.clone()), 0)?;
    Ok(vec![Task::prepare(0, &task, object)?])
}

fn run_tasks(tasks: &[Task], settings: &Settings, parallel: bool, fail_fast: bool) -> Vec<Report> {
    if parallel && tasks.len() > 1 {
        let reports: Vec<Report> = std::thread::scope(|scope| {
            let handles: Vec<_> = tasks.iter().map(|t| scope.spawn(move || t.run(settings))).collect();
            handles.into_iter().map(|h| h.join().expect("task thread")).collect()
        });
        if fail_fast {
            if let Some(i) = reports.iter().position(|r| r.status != Status::Ok) {
                return reports.into_iter().take(i + 1).collect();
            }
        }
        return reports;
    }
    let mut out = Vec::new();
    for t in tasks {
        let r = t.run(settings);
        let bad = r.status != Status::Ok;
        out.push(r);
        if bad && fail_fast {
            break;
        }
    }
    out
}

fn open_out<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> std::io::Result<Box<dyn Write + 'a>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn verify_gallery(g: &Global, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    use difgeo::verify::{run_criterion, Outcome, CRITERIA};
    let ids: Vec<usize> = (1..CRITERIA.len()).collect();
    let mut outcomes: Vec<Outcome> = Vec::new();
    if g.parallel {
        outcomes = std::thread::scope(|scope| {
            let handles: Vec<_> = ids.iter().map(|&i| scope.spawn(move || run_criterion(i, g.seed))).collect();
            handles.into_iter().map(|h| h.join().expect("criterion thread")).collect()
        });
    } else {
        for &i in &ids {
            let o = run_criterion(i, g.seed);
            let bad = !o.passed;
            let _ = writeln!(stdout, "{o}");
            outcomes.push(o);
            if bad && g.fail_fast {
                break;
            }
        }
    }
    if outcomes.len() == ids.len() {
        let deps = [3, 10, 11].iter().all(|&i| outcomes[i - 1].passed);
        outcomes.push(Outcome {
            id: 12,
            title: CRITERIA[11],
            passed: deps,
            detail: format!("items 3, 10, 11 pass {}", if deps { "yes" } else { "no" }),
        });
    }
    let printed_already = !g.parallel;
    for (k, o) in outcomes.iter().enumerate() {
        if !printed_already || k == ids.len() {
            let _ = writeln!(stdout, "{o}");
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let _ = writeln!(stdout, "{passed} of {} criteria pass", CRITERIA.len());
    if let Some(path) = &g.out {
        let lines: String = outcomes
            .iter()
            .map(|o| {
                serde_json::json!({ "criterion": o.id, "title": o.title, "passed": o.passed, "detail": o.detail, "seed": g.seed })
                    .to_string()
                    + "\n"
            })
            .collect();
        if let Err(e) = std::fs::write(path, lines) {
            let _ = writeln!(stderr, "difgeo: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    if passed == CRITERIA.len() {
        0
    } else {
        1
    }
}

/// Parses `argv` (including the program name) and runs it, writing reports
/// to `stdout` unless `--out` is given. Returns the process exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    let g = &cli.global;
    if matches!(cli.command, Command::VerifyGallery) {
        return verify_gallery(g, stdout, stderr);
    }
    let projection = match g.axes.as_deref().map(|a| (a, Projection::parse(a))) {
        None => None,
        Some((_, Some(p))) => Some(p),
        Some((a, None)) => {
            let _ = writeln!(stderr, "difgeo: unknown --axes `{a}` (xy, xz, yz or iso)");
            return 2;
        }
    };
    if !(g.tol > 0.0) {
        let _ = writeln!(stderr, "difgeo: --tol must be positive");
        return 2;
    }
    let planned = cli.command.request().map_err(Failure::Spec).and_then(|r| plan(r.expect("not verify-gallery")));
    let tasks = match planned {
        Ok(t) => t,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(stderr, "difgeo: {m}");
            return 2;
        }
        Err(Failure::Spec(e)) => {
            let _ = writeln!(stderr, "difgeo: {e}");
            return 2;
        }
    };
    let plot = g.plot.then(|| match &g.out {
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).map_or_else(|| PathBuf::from("."), Path::to_path_buf);
            let stem = p.file_stem().map(|s| format!("{}-", s.to_string_lossy())).unwrap_or_default();
            (dir, stem)
        }
        None => (PathBuf::from("."), String::new()),
    });
    let settings = Settings {
        steps: g.steps,
        grid: g.grid,
        samples: g.samples,
        tol: g.tol,
        seed: g.seed,
        timestamp: !g.no_timestamp,
        plot,
        projection,
    };
    let reports = run_tasks(&tasks, &settings, g.parallel, g.fail_fast);
    let mut out = match open_out(g.out.as_deref(), stdout) {
        Ok(w) => w,
        Err(e) => {
            let _ = writeln!(stderr, "difgeo: cannot write report: {e}");
            return 2;
        }
    };
    for r in &reports {
        if writeln!(out, "{}", r.to_line()).is_err() {
            return 1;
        }
    }
    let _ = out.flush();
    drop(out);
    for r in reports.iter().filter(|r| r.status != Status::Ok) {
        let _ = writeln!(stderr, "difgeo: task `{}` {:?}: {}", r.task, r.status, r.message.as_deref().unwrap_or(""));
    }
    if reports.iter().all(|r| r.status == Status::Ok) {
        0
    } else {
        1
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
