//! CSV tables and flat SVG polylines.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use difgeo::Vec3;

/// A row of the surface raster `u,v,x,y,z,K,H,k1,k2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RasterRow {
    pub u: f64,
    pub v: f64,
    pub p: Vec3,
    pub gauss: f64,
    pub mean: f64,
    pub k1: f64,
    pub k2: f64,
}

pub fn curve_csv(params: &[f64], points: &[Vec3]) -> String {
    let mut s = String::from("t,x,y,z\n");
    for (t, p) in params.iter().zip(points) {
        let _ = writeln!(s, "{t},{},{},{}", p.x, p.y, p.z);
    }
    s
}

pub fn raster_csv(rows: &[RasterRow]) -> String {
    let mut s = String::from("u,v,x,y,z,K,H,k1,k2\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{},{},{},{}", r.u, r.v, r.p.x, r.p.y, r.p.z, r.gauss, r.mean, r.k1, r.k2);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    Xy,
    Xz,
    Yz,
    Isometric,
}

impl Projection {
    pub fn parse(text: &str) -> Option<Projection> {
        Some(match text {
            "xy" => Projection::Xy,
            "xz" => Projection::Xz,
            "yz" => Projection::Yz,
            "iso" | "isometric" => Projection::Isometric,
            _ => return None,
        })
    }

    /// Screen coordinates with y up.
    pub fn apply(self, p: Vec3) -> (f64, f64) {
        match self {
            Projection::Xy => (p.x, p.y),
            Projection::Xz => (p.x, p.z),
            Projection::Yz => (p.y, p.z),
            Projection::Isometric => {
                let c = 30f64.to_radians().cos();
                ((p.x - p.y) * c, p.z + 0.5 * (p.x + p.y))
            }
        }
    }
}

/// Flat curves default to their own plane, everything else to the isometric view.
pub fn default_projection(polylines: &[Vec<Vec3>]) -> Projection {
    if polylines.iter().flatten().all(|p| p.z == 0.0) {
        Projection::Xy
    } else {
        Projection::Isometric
    }
}

/// Most vertices written per path; longer polylines are thinned evenly, keeping both ends.
pub const SVG_MAX_VERTICES: usize = 2000;

fn thin(line: &[Vec3]) -> Vec<Vec3> {
    let pts: Vec<Vec3> = line.iter().copied().filter(|p| p.is_finite()).collect();
    if pts.len() <= SVG_MAX_VERTICES {
        return pts;
    }
    let stride = pts.len().div_ceil(SVG_MAX_VERTICES);
    let mut out: Vec<Vec3> = pts.iter().step_by(stride).copied().collect();
    if (pts.len() - 1) % stride != 0 {
        out.push(pts[pts.len() - 1]);
    }
    out
}

/// One `<path>` per polyline, viewBox fitted to the data with a 5% margin.
pub fn svg(polylines: &[Vec<Vec3>], projection: Projection) -> String {
    let flat: Vec<Vec<(f64, f64)>> =
        polylines.iter().map(|l| thin(l).into_iter().map(|p| projection.apply(p)).collect()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in flat.iter().flatten() {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let pad = 0.05 * span;
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let stroke = span / 400.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="600" height="{}">"#,
        x0 - pad,
        -(y1 + pad),
        w,
        h,
        (600.0 * h / w).round()
    );
    for line in &flat {
        if line.len() < 2 {
            continue;
        }
        let mut d = String::new();
        for (i, (x, y)) in line.iter().enumerate() {
            let _ = write!(d, "{}{:.6} {:.6}", if i == 0 { "M" } else { " L" }, x, -y);
        }
        let _ = writeln!(s, r#"  <path d="{d}" fill="none" stroke="black" stroke-width="{stroke:.6}"/>"#);
    }
    s.push_str("</svg>\n");
    s
}

pub fn write(path: &Path, contents: &str) -> io::Result<()> {
    std::fs::write(path, contents)
}
