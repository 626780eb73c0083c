//! Curves on surfaces: Darboux frame, geodesic curvature, parallel transport,
//! holonomy and numerical Gauss–Bonnet.

use std::f64::consts::{PI, TAU};

use crate::error::{GeoError, Result};
use crate::exprparse::Expr;
use crate::geodesy::{geodesic_rhs, orthonormal_basis, GeodesicState};
use crate::numcore::{rk4_step, try_quad_simpson, wrap_symmetric, Vec2, Vec3};
use crate::surfaces::{ChartJet, Integrand, Region, SurfaceSpec};

/// Chart position with first and second parameter derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamJet {
    pub p: Vec2,
    pub d1: Vec2,
    pub d2: Vec2,
}

#[derive(Debug, Clone)]
pub enum PieceKind {
    /// `(u(t), v(t))` written in `t`.
    Expr { u: Expr, v: Expr },
    /// A geodesic stored at uniform time nodes; in-between values come from one RK4 sub-step.
    Geodesic { h: f64, states: Vec<[f64; 4]> },
}

#[derive(Debug, Clone)]
pub struct Piece {
    pub kind: PieceKind,
    pub t0: f64,
    pub t1: f64,
    pub reversed: bool,
}

impl Piece {
    pub fn span(&self) -> f64 {
        self.t1 - self.t0
    }

    fn raw_jet(&self, surface: &SurfaceSpec, t: f64) -> Result<ParamJet> {
        match &self.kind {
            PieceKind::Expr { u, v } => {
                let (a, b) = (u.eval_jet3("t", t)?, v.eval_jet3("t", t)?);
                Ok(ParamJet { p: Vec2::new(a.f, b.f), d1: Vec2::new(a.d1, b.d1), d2: Vec2::new(a.d2, b.d2) })
            }
            PieceKind::Geodesic { h, states } => {
                let x = ((t - self.t0) / h).clamp(0.0, (states.len() - 1) as f64);
                let k = (x.floor() as usize).min(states.len() - 1);
                let dt = t - self.t0 - k as f64 * h;
                let mut rhs = |_t: f64, s: &[f64; 4]| geodesic_rhs(surface, &GeodesicState::from_array(*s));
                let s = if dt.abs() > 0.0 { rk4_step(&mut rhs, 0.0, &states[k], dt)? } else { states[k] };
                let r = rhs(0.0, &s)?;
                Ok(ParamJet { p: Vec2::new(s[0], s[1]), d1: Vec2::new(s[2], s[3]), d2: Vec2::new(r[2], r[3]) })
            }
        }
    }

    /// Jet at local parameter `t ∈ [t0, t1]`, honoring reversal.
    pub fn jet(&self, surface: &SurfaceSpec, t: f64) -> Result<ParamJet> {
        if self.reversed {
            let j = self.raw_jet(surface, self.t0 + self.t1 - t)?;
            Ok(ParamJet { p: j.p, d1: -j.d1, d2: j.d2 })
        } else {
            self.raw_jet(surface, t)
        }
    }
}

/// Piecewise-smooth curve in a chart's parameter space. Junctions between
/// consecutive pieces are corners; a closed curve also has one at the start.
#[derive(Debug, Clone)]
pub struct OnSurfaceCurve {
    pub pieces: Vec<Piece>,
    pub closed: bool,
}

fn t_expr(text: &str) -> Result<Expr> {
    Ok(Expr::parse(text, &["t"])?)
}

impl OnSurfaceCurve {
    pub fn from_exprs(u: &str, v: &str, t0: f64, t1: f64, closed: bool) -> Result<OnSurfaceCurve> {
        Ok(OnSurfaceCurve { pieces: vec![OnSurfaceCurve::expr_piece(u, v, t0, t1)?], closed })
    }

    pub fn expr_piece(u: &str, v: &str, t0: f64, t1: f64) -> Result<Piece> {
        if !(t1 > t0) {
            return Err(GeoError::InvalidArgument(format!("empty parameter interval [{t0}, {t1}]")));
        }
        Ok(Piece { kind: PieceKind::Expr { u: t_expr(u)?, v: t_expr(v)? }, t0, t1, reversed: false })
    }

    /// Straight parameter segments through `vertices`.
    pub fn polygon(vertices: &[Vec2], closed: bool) -> Result<OnSurfaceCurve> {
        if vertices.len() < 2 {
            return Err(GeoError::InvalidArgument("a polygon needs at least two vertices".into()));
        }
        let mut pieces = Vec::new();
        let count = if closed { vertices.len() } else { vertices.len() - 1 };
        for i in 0..count {
            let (a, b) = (vertices[i], vertices[(i + 1) % vertices.len()]);
            let d = b - a;
            let piece = Expr::parse(&format!("{} + ({})*t", a.x, d.x), &["t"])
                .and_then(|u| Ok((u, Expr::parse(&format!("{} + ({})*t", a.y, d.y), &["t"])?)))?;
            pieces.push(Piece { kind: PieceKind::Expr { u: piece.0, v: piece.1 }, t0: 0.0, t1: 1.0, reversed: false });
        }
        Ok(OnSurfaceCurve { pieces, closed })
    }

    /// A geodesic piece from `p` with velocity `w` over `[0, duration]`.
    pub fn geodesic_piece(surface: &SurfaceSpec, p: (f64, f64), w: Vec2, duration: f64, steps: usize) -> Result<Piece> {
        let path = crate::geodesy::trace_geodesic(surface, p, w, duration, steps)?;
        if let Some(t) = path.exit_time {
            return Err(GeoError::DomainExit { t });
        }
        Ok(Piece {
            kind: PieceKind::Geodesic { h: duration / steps as f64, states: path.trajectory.states },
            t0: 0.0,
            t1: duration,
            reversed: false,
        })
    }

    pub fn then(mut self, other: OnSurfaceCurve) -> OnSurfaceCurve {
        self.pieces.extend(other.pieces);
        self
    }

    pub fn reversed(&self) -> OnSurfaceCurve {
        let pieces = self.pieces.iter().rev().map(|p| Piece { reversed: !p.reversed, ..p.clone() }).collect();
        OnSurfaceCurve { pieces, closed: self.closed }
    }

    /// Total parameter length.
    pub fn span(&self) -> f64 {
        self.pieces.iter().map(Piece::span).sum()
    }

    /// Piece index and local parameter of a global parameter in `[0, span]`.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let mut acc = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            if t <= acc + p.span() || i + 1 == self.pieces.len() {
                return (i, p.t0 + (t - acc).clamp(0.0, p.span()));
            }
            acc += p.span();
        }
        unreachable!("curve has pieces")
    }

    pub fn start(&self, surface: &SurfaceSpec) -> Result<ParamJet> {
        let p = &self.pieces[0];
        p.jet(surface, p.t0)
    }

    pub fn end(&self, surface: &SurfaceSpec) -> Result<ParamJet> {
        let p = self.pieces.last().expect("curve has pieces");
        p.jet(surface, p.t1)
    }

    fn check(&self, surface: &SurfaceSpec) -> Result<()> {
        if self.pieces.is_empty() {
            return Err(GeoError::InvalidArgument("curve has no pieces".into()));
        }
        for w in 0..self.pieces.len().saturating_sub(1) {
            let a = self.pieces[w].jet(surface, self.pieces[w].t1)?.p;
            let b = self.pieces[w + 1].jet(surface, self.pieces[w + 1].t0)?.p;
            let gap = surface.domain.difference(a, b).norm();
            if gap > 1e-9 {
                return Err(GeoError::NotPeriodic { gap });
            }
        }
        if self.closed {
            let gap = surface.domain.difference(self.end(surface)?.p, self.start(surface)?.p).norm();
            if gap > 1e-9 {
                return Err(GeoError::NotPeriodic { gap });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxFrame {
    pub t: f64,
    pub tangent: Vec3,
    pub mu: Vec3,
    pub normal: Vec3,
    pub k_g: f64,
    pub k_n: f64,
    /// Embedded speed `|γ′|` of the given parametrization.
    pub speed: f64,
}

fn darboux_from(jet: &ChartJet, pj: &ParamJet, t: f64) -> Result<DarbouxFrame> {
    let (du, dv) = (pj.d1.x, pj.d1.y);
    let d1 = jet.push(pj.d1);
    let d2 = jet.s_uu * (du * du) + jet.s_uv * (2.0 * du * dv) + jet.s_vv * (dv * dv) + jet.push(pj.d2);
    let speed = d1.norm();
    if !(speed > 1e-12) {
        return Err(GeoError::IrregularParametrization { t, speed });
    }
    let tangent = d1 / speed;
    let mu = jet.normal.cross(tangent);
    let s2 = speed * speed;
    Ok(DarbouxFrame { t, tangent, mu, normal: jet.normal, k_g: d2.dot(mu) / s2, k_n: d2.dot(jet.normal) / s2, speed })
}

/// Darboux frame at the global parameter `t`.
pub fn darboux(surface: &SurfaceSpec, curve: &OnSurfaceCurve, t: f64) -> Result<DarbouxFrame> {
    let (i, lt) = curve.locate(t);
    let pj = curve.pieces[i].jet(surface, lt)?;
    let jet = surface.chart_jet(pj.p.x, pj.p.y)?;
    darboux_from(&jet, &pj, t)
}

fn piece_frame(surface: &SurfaceSpec, piece: &Piece, t: f64) -> Result<DarbouxFrame> {
    let pj = piece.jet(surface, t)?;
    let jet = surface.chart_jet(pj.p.x, pj.p.y)?;
    darboux_from(&jet, &pj, t)
}

/// Oriented turning angle from `a` to `b` about `normal`.
fn signed_angle(a: Vec3, b: Vec3, normal: Vec3) -> f64 {
    normal.dot(a.cross(b)).atan2(a.dot(b))
}

/// External angles at the corners, in order; a closed curve's start corner comes last.
pub fn corner_angles(surface: &SurfaceSpec, curve: &OnSurfaceCurve) -> Result<Vec<f64>> {
    curve.check(surface)?;
    let n = curve.pieces.len();
    let count = if curve.closed { n } else { n - 1 };
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let (a, b) = (&curve.pieces[i], &curve.pieces[(i + 1) % n]);
        let fin = piece_frame(surface, a, a.t1)?;
        let fout = piece_frame(surface, b, b.t0)?;
        let ang = signed_angle(fin.tangent, fout.tangent, fout.normal);
        if PI - ang.abs() < 1e-9 {
            return Err(GeoError::Cusp { index: i + 1 });
        }
        out.push(ang);
    }
    Ok(out)
}

/// `Ψ`: `∫ k_g ds` over the pieces plus the oriented external corner angles.
pub fn total_geodesic_curvature(surface: &SurfaceSpec, curve: &OnSurfaceCurve, n: usize) -> Result<f64> {
    let corners = corner_angles(surface, curve)?;
    let n = n.max(2) + n % 2;
    let mut total = corners.iter().sum::<f64>();
    for piece in &curve.pieces {
        total += try_quad_simpson(
            |t| {
                let f = piece_frame(surface, piece, t)?;
                Ok(f.k_g * f.speed)
            },
            piece.t0,
            piece.t1,
            n,
        )?;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    /// Global parameter of each sample.
    pub times: Vec<f64>,
    /// Chart components of the transported vector.
    pub samples: Vec<Vec2>,
    /// Oriented angle (counterclockwise about the normal) from `w0` to the
    /// final vector; meaningful for closed curves.
    pub holonomy_angle: f64,
    /// Max relative deviation of the first-form norm.
    pub norm_drift: f64,
}

fn transport_rhs(surface: &SurfaceSpec, piece: &Piece, t: f64, w: Vec2) -> Result<Vec2> {
    let pj = piece.jet(surface, t)?;
    let jet = surface.chart_jet(pj.p.x, pj.p.y)?;
    let (du, dv) = (pj.d1.x, pj.d1.y);
    let b = (jet.s_uu * du + jet.s_uv * dv) * w.x + (jet.s_uv * du + jet.s_vv * dv) * w.y;
    jet.forms().first().solve(Vec2::new(-b.dot(jet.s_u), -b.dot(jet.s_v))).ok_or(GeoError::NotPositiveDefinite)
}

/// Parallel transport of the chart vector `w0` along the curve, `steps` RK4 steps per piece.
pub fn parallel_transport(surface: &SurfaceSpec, curve: &OnSurfaceCurve, w0: Vec2, steps: usize) -> Result<TransportResult> {
    curve.check(surface)?;
    let steps = steps.max(1);
    let start = curve.start(surface)?.p;
    let p0 = surface.chart_jet(start.x, start.y)?;
    let n0 = p0.forms().first().form(w0, w0).sqrt();
    if !(n0 > 0.0) {
        return Err(GeoError::InvalidArgument("transported vector must be nonzero".into()));
    }
    let mut times = vec![0.0];
    let mut samples = vec![w0];
    let mut w = [w0.x, w0.y];
    let mut drift = 0.0f64;
    let mut offset = 0.0;
    for piece in &curve.pieces {
        let h = piece.span() / steps as f64;
        let mut rhs = |t: f64, y: &[f64; 2]| transport_rhs(surface, piece, t, Vec2::new(y[0], y[1])).map(|a| [a.x, a.y]);
        for k in 0..steps {
            let t = piece.t0 + k as f64 * h;
            w = rk4_step(&mut rhs, t, &w, h)?;
            let pj = piece.jet(surface, t + h)?;
            let f = surface.forms(pj.p.x, pj.p.y)?;
            let wv = Vec2::new(w[0], w[1]);
            drift = drift.max((f.first().form(wv, wv).sqrt() - n0).abs() / n0);
            times.push(offset + (k + 1) as f64 * h);
            samples.push(wv);
        }
        offset += piece.span();
    }
    let end = curve.end(surface)?.p;
    let pe = surface.chart_jet(end.x, end.y)?;
    let wf = *samples.last().expect("samples");
    let holonomy_angle = signed_angle(p0.push(w0), pe.push(wf), pe.normal);
    Ok(TransportResult { times, samples, holonomy_angle, norm_drift: drift })
}

/// Holonomy angle of a closed curve from transporting the first basis vector.
pub fn holonomy(surface: &SurfaceSpec, curve: &OnSurfaceCurve, steps: usize) -> Result<f64> {
    if !curve.closed {
        return Err(GeoError::InvalidArgument("holonomy needs a closed curve".into()));
    }
    let start = curve.start(surface)?.p;
    let (e1, _) = orthonormal_basis(surface, (start.x, start.y))?;
    Ok(parallel_transport(surface, curve, e1, steps)?.holonomy_angle)
}

/// `Ψ + 2π·m` folded into `(−π, π]`, the angle the holonomy should match up to sign.
pub fn angle_mod_tau(x: f64) -> f64 {
    wrap_symmetric(x, TAU)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussBonnetReport {
    pub psi: f64,
    pub total_k: f64,
    /// `Ψ + ∬K − 2π` at the fine resolution.
    pub residual: f64,
    /// Change of the residual between the coarse and the doubled resolution.
    pub refinement_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    /// Simpson panels per boundary piece.
    pub boundary: usize,
    /// Area grid per side.
    pub grid: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution { boundary: 400, grid: 400 }
    }
}

fn psi_and_k(surface: &SurfaceSpec, loops: &[OnSurfaceCurve], region: &Region, res: Resolution) -> Result<(f64, f64)> {
    let mut psi = 0.0;
    for c in loops {
        psi += total_geodesic_curvature(surface, c, res.boundary)?;
    }
    let k = surface.integrate_region(&Integrand::Gauss, region, res.grid)?;
    Ok((psi, k))
}

/// Checks that the region lies on the left of each boundary loop.
fn check_left(surface: &SurfaceSpec, loops: &[OnSurfaceCurve], region: &Region, grid: usize) -> Result<()> {
    let ((u0, u1), (v0, v1)) = region.rect();
    let cell = ((u1 - u0) / grid as f64).max((v1 - v0) / grid as f64);
    for (li, c) in loops.iter().enumerate() {
        let (mut left, mut total) = (0, 0);
        let span = c.span();
        for k in 0..32 {
            let t = span * (k as f64 + 0.5) / 32.0;
            let (i, lt) = c.locate(t);
            let pj = c.pieces[i].jet(surface, lt)?;
            let jet = surface.chart_jet(pj.p.x, pj.p.y)?;
            let f = darboux_from(&jet, &pj, t)?;
            let m = jet.pull(f.mu)?;
            let Some(m) = m.normalized() else { continue };
            let probe = pj.p + m * (2.0 * cell);
            let Some((pu, pv)) = surface.domain.normalize(probe.x, probe.y) else { continue };
            total += 1;
            if region.contains(pu, pv)? {
                left += 1;
            }
        }
        if total > 0 && 2 * left <= total {
            return Err(GeoError::GeometryMismatch(format!(
                "region is not on the left of boundary loop {li} ({left} of {total} probes inside)"
            )));
        }
    }
    Ok(())
}

/// Gauss–Bonnet residual for a disk-like region with one boundary loop.
pub fn gauss_bonnet(surface: &SurfaceSpec, boundary: &OnSurfaceCurve, region: &Region, res: Resolution) -> Result<GaussBonnetReport> {
    if !boundary.closed {
        return Err(GeoError::InvalidArgument("the boundary must be a closed curve".into()));
    }
    let loops = std::slice::from_ref(boundary);
    check_left(surface, loops, region, res.grid)?;
    let (pc, kc) = psi_and_k(surface, loops, region, res)?;
    let fine = Resolution { boundary: 2 * res.boundary, grid: 2 * res.grid };
    let (psi, total_k) = psi_and_k(surface, loops, region, fine)?;
    let residual = psi + total_k - TAU;
    Ok(GaussBonnetReport { psi, total_k, residual, refinement_delta: (residual - (pc + kc - TAU)).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerCharacteristic {
    pub raw: f64,
    pub rounded: i64,
    pub psi: f64,
    pub total_k: f64,
}

/// `χ ≈ (∬K + ΣΨ(γᵢ)) / 2π` for a region bounded by the given loops.
pub fn gauss_bonnet_general(
    surface: &SurfaceSpec,
    loops: &[OnSurfaceCurve],
    region: &Region,
    res: Resolution,
) -> Result<EulerCharacteristic> {
    if loops.iter().any(|c| !c.closed) {
        return Err(GeoError::InvalidArgument("boundary loops must be closed".into()));
    }
    check_left(surface, loops, region, res.grid)?;
    let (psi, total_k) = psi_and_k(surface, loops, region, res)?;
    let raw = (psi + total_k) / TAU;
    Ok(EulerCharacteristic { raw, rounded: raw.round() as i64, psi, total_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::Builtin;

    fn sphere() -> SurfaceSpec {
        SurfaceSpec::builtin(Builtin::Sphere { radius: 1.0 })
    }

    fn stereo() -> SurfaceSpec {
        SurfaceSpec::parametric(
            "2*u/(1 + u^2 + v^2)",
            "2*v/(1 + u^2 + v^2)",
            "(1 - u^2 - v^2)/(1 + u^2 + v^2)",
            (-3.0, 3.0),
            (-3.0, 3.0),
        )
        .unwrap()
    }

    fn plane() -> SurfaceSpec {
        SurfaceSpec::graph("0", (-5.0, 5.0), (-5.0, 5.0)).unwrap()
    }

    fn latitude(phi: f64, eastward: bool) -> OnSurfaceCurve {
        let v = PI / 2.0 - phi;
        let u = if eastward { "t" } else { "-t" };
        OnSurfaceCurve::from_exprs(u, &format!("{v}"), -PI, PI, true).unwrap()
    }

    fn octant() -> OnSurfaceCurve {
        let a = OnSurfaceCurve::expr_piece("t", "0", 0.0, 1.0).unwrap();
        let b = OnSurfaceCurve::expr_piece("cos(t)", "sin(t)", 0.0, PI / 2.0).unwrap();
        let c = OnSurfaceCurve::expr_piece("0", "1 - t", 0.0, 1.0).unwrap();
        OnSurfaceCurve { pieces: vec![a, b, c], closed: true }
    }

    #[test]
    fn darboux_on_sphere() {
        let s = sphere();
        let eq = latitude(PI / 2.0, true);
        let f = darboux(&s, &eq, 0.7).unwrap();
        assert!(f.k_g.abs() < 1e-12 && (f.k_n + 1.0).abs() < 1e-12);
        for phi in [0.4, 1.0] {
            let f = darboux(&s, &latitude(phi, true), 1.3).unwrap();
            assert!((f.k_g - 1.0 / phi.tan()).abs() < 1e-10);
            assert!((f.k_n.abs() - 1.0).abs() < 1e-10);
            assert!(f.tangent.dot(f.mu).abs() < 1e-12 && f.mu.dot(f.normal).abs() < 1e-12);
        }
    }

    #[test]
    fn geodesic_pieces_have_zero_geodesic_curvature() {
        let t = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        let piece = OnSurfaceCurve::geodesic_piece(&t, (0.2, 0.1), Vec2::new(0.5, 0.3), 3.0, 3000).unwrap();
        let c = OnSurfaceCurve { pieces: vec![piece], closed: false };
        for k in 0..37 {
            let f = darboux(&t, &c, 3.0 * k as f64 / 37.0).unwrap();
            assert!(f.k_g.abs() < 1e-6);
        }
    }

    #[test]
    fn psi_examples() {
        let circle = OnSurfaceCurve::from_exprs("cos(t)", "sin(t)", 0.0, TAU, true).unwrap();
        assert!((total_geodesic_curvature(&plane(), &circle, 200).unwrap() - TAU).abs() < 1e-9);
        let phi = 0.8;
        let psi = total_geodesic_curvature(&sphere(), &latitude(phi, true), 200).unwrap();
        assert!((psi - TAU * phi.cos()).abs() < 1e-9);
        let oct = octant();
        let corners = corner_angles(&stereo(), &oct).unwrap();
        assert!(corners.iter().all(|a| (a - PI / 2.0).abs() < 1e-12));
        let psi = total_geodesic_curvature(&stereo(), &oct, 200).unwrap();
        assert!((psi - 1.5 * PI).abs() < 1e-9);
        let square = OnSurfaceCurve::polygon(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)], true).unwrap();
        assert!((total_geodesic_curvature(&plane(), &square, 10).unwrap() - TAU).abs() < 1e-12);
        let spike = OnSurfaceCurve::polygon(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)], true).unwrap();
        assert!(matches!(total_geodesic_curvature(&plane(), &spike, 10), Err(GeoError::Cusp { .. })));
    }

    #[test]
    fn holonomy_of_octant_and_loops() {
        let h = holonomy(&stereo(), &octant(), 2000).unwrap();
        assert!((h - PI / 2.0).abs() < 1e-4, "{h}");
        let s = sphere();
        for phi in [0.3, 1.0, 2.0] {
            let c = latitude(phi, true);
            let h = holonomy(&s, &c, 2000).unwrap();
            let psi = total_geodesic_curvature(&s, &c, 400).unwrap();
            assert!(angle_mod_tau(h + psi).abs() < 1e-5, "{phi}: {h} {psi}");
        }
    }

    #[test]
    fn transport_properties() {
        let t = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        let c = OnSurfaceCurve::from_exprs("0.3 + 0.8*cos(t)", "0.2 + 1.1*sin(t)", 0.0, TAU, true).unwrap();
        let a = parallel_transport(&t, &c, Vec2::new(1.0, 0.0), 2000).unwrap();
        let b = parallel_transport(&t, &c, Vec2::new(0.3, 0.4), 2000).unwrap();
        assert!(a.norm_drift < 1e-6 && b.norm_drift < 1e-6);
        let angle = |i: usize| {
            let pj = c.pieces[0].jet(&t, a.times[i]).unwrap();
            let f = t.forms(pj.p.x, pj.p.y).unwrap().first();
            (f.form(a.samples[i], b.samples[i]) / (f.form(a.samples[i], a.samples[i]) * f.form(b.samples[i], b.samples[i])).sqrt()).acos()
        };
        let a0 = angle(0);
        for i in (0..a.samples.len()).step_by(97) {
            assert!((angle(i) - a0).abs() < 1e-6);
        }
        let back = parallel_transport(&t, &c.reversed(), *a.samples.last().unwrap(), 2000).unwrap();
        let w = *back.samples.last().unwrap();
        assert!((w - Vec2::new(1.0, 0.0)).norm() < 1e-6);
        let flat = parallel_transport(&plane(), &c, Vec2::new(0.2, 0.7), 100).unwrap();
        assert!(flat.samples.iter().all(|w| (*w - Vec2::new(0.2, 0.7)).norm() < 1e-14));
    }

    #[test]
    fn gauss_bonnet_examples() {
        let s = sphere();
        for phi in [0.5, 1.2] {
            let region = Region::Rect { u: (-PI, PI), v: (PI / 2.0 - phi, PI / 2.0) };
            let r = gauss_bonnet(&s, &latitude(phi, true), &region, Resolution { boundary: 200, grid: 200 }).unwrap();
            assert!((r.total_k - TAU * (1.0 - phi.cos())).abs() < 1e-4);
            assert!(r.residual.abs() < 1e-4);
        }
        let wrong = Region::Rect { u: (-PI, PI), v: (PI / 2.0 - 0.5, PI / 2.0) };
        assert!(matches!(
            gauss_bonnet(&s, &latitude(0.5, false), &wrong, Resolution { boundary: 50, grid: 50 }),
            Err(GeoError::GeometryMismatch(_))
        ));
        let disk = Region::Indicator { u: (-1.0, 1.0), v: (-1.0, 1.0), g: Expr::parse("u^2 + v^2 - 1", &["u", "v"]).unwrap() };
        let circle = OnSurfaceCurve::from_exprs("cos(t)", "sin(t)", 0.0, TAU, true).unwrap();
        let r = gauss_bonnet(&plane(), &circle, &disk, Resolution { boundary: 100, grid: 40 }).unwrap();
        assert!(r.residual.abs() < 1e-6);
        let quarter = Region::Indicator { u: (0.0, 1.0), v: (0.0, 1.0), g: Expr::parse("u^2 + v^2 - 1", &["u", "v"]).unwrap() };
        let area = stereo().area(&quarter, 800).unwrap();
        assert!((area - PI / 2.0).abs() < 2e-3, "{area}");
    }

    #[test]
    fn euler_characteristics() {
        let t = SurfaceSpec::builtin(Builtin::Torus { major: 2.0, minor: 1.0 });
        let chi = gauss_bonnet_general(&t, &[], &t.full_region(), Resolution::default()).unwrap();
        assert_eq!(chi.rounded, 0);
        assert!(chi.raw.abs() < 0.02);
        let s = sphere();
        let (p1, p2) = (0.6, 1.9);
        let annulus = Region::Rect { u: (-PI, PI), v: (PI / 2.0 - p2, PI / 2.0 - p1) };
        let loops = [latitude(p1, false), latitude(p2, true)];
        let chi = gauss_bonnet_general(&s, &loops, &annulus, Resolution::default()).unwrap();
        assert_eq!(chi.rounded, 0);
        assert!(chi.raw.abs() < 1e-4);
    }
}
