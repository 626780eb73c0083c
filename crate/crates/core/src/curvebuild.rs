//! Curves from prescribed curvature and torsion, and rigid alignment of
//! sampled curves.

use nalgebra::Matrix3;

use crate::curves::CurveSpec;
use crate::error::{GeoError, Result};
use crate::exprparse::Expr;
use crate::numcore::{rk4_step, Vec2, Vec3};

/// A function of arclength: an expression in `s`, or uniformly tabulated values.
#[derive(Debug, Clone)]
pub enum ScalarFn {
    Expr(Expr),
    /// Values at `s0 + k·ds`, interpolated by local cubics.
    Table { s0: f64, ds: f64, values: Vec<f64> },
}

impl ScalarFn {
    pub fn parse(text: &str) -> Result<ScalarFn> {
        Ok(ScalarFn::Expr(Expr::parse(text, &["s"])?))
    }

    pub fn constant(c: f64) -> ScalarFn {
        ScalarFn::Expr(Expr::constant(c, &["s"]))
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        match self {
            ScalarFn::Expr(e) => e.eval(&[s]),
            ScalarFn::Table { s0, ds, values } => {
                let n = values.len();
                if n < 4 {
                    return Err(GeoError::InvalidArgument("tabulated function needs at least 4 values".into()));
                }
                let x = (s - s0) / ds;
                let i = (x.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
                let mut out = 0.0;
                for j in 0..4 {
                    let mut w = 1.0;
                    for k in 0..4 {
                        if k != j {
                            w *= (x - (i + k) as f64) / (j as f64 - k as f64);
                        }
                    }
                    out += w * values[i + j];
                }
                Ok(out)
            }
        }
    }
}

/// Prescribed curvature (signed for plane curves), optional torsion, and an
/// initial frame at `s0`.
#[derive(Debug, Clone)]
pub struct IntrinsicSpec {
    pub kappa: ScalarFn,
    pub tau: Option<ScalarFn>,
    pub s0: f64,
    pub s1: f64,
    pub origin: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
}

impl IntrinsicSpec {
    /// Plane spec starting at the origin heading along +x.
    pub fn plane(kappa: ScalarFn, s0: f64, s1: f64) -> IntrinsicSpec {
        IntrinsicSpec { kappa, tau: None, s0, s1, origin: Vec3::ZERO, tangent: Vec3::X, normal: Vec3::Y }
    }

    /// Space spec with the standard initial frame.
    pub fn space(kappa: ScalarFn, tau: ScalarFn, s0: f64, s1: f64) -> IntrinsicSpec {
        IntrinsicSpec { kappa, tau: Some(tau), s0, s1, origin: Vec3::ZERO, tangent: Vec3::X, normal: Vec3::Y }
    }

    pub fn with_frame(mut self, origin: Vec3, tangent: Vec3, normal: Vec3) -> IntrinsicSpec {
        self.origin = origin;
        self.tangent = tangent;
        self.normal = normal;
        self
    }

    /// Tabulated curvature (and torsion for space curves) of an analytic
    /// curve over its full length, with the curve's own initial frame.
    pub fn measure(curve: &CurveSpec, table: usize) -> Result<IntrinsicSpec> {
        let n = table.max(4);
        let arc = curve.arclength_table(4 * n)?;
        let total = arc.total();
        let ds = total / n as f64;
        let t0 = curve.domain().0;
        let p0 = curve.point(t0)?;
        if curve.require_plane().is_ok() {
            let values = (0..=n).map(|k| curve.signed_curvature(arc.t_of_s(k as f64 * ds)?)).collect::<Result<Vec<_>>>()?;
            let f = curve.plane_frenet(t0)?;
            return Ok(IntrinsicSpec {
                kappa: ScalarFn::Table { s0: 0.0, ds, values },
                tau: None,
                s0: 0.0,
                s1: total,
                origin: p0,
                tangent: f.tangent.extend(0.0),
                normal: f.normal.extend(0.0),
            });
        }
        let frames = (0..=n).map(|k| curve.frenet(arc.t_of_s(k as f64 * ds)?)).collect::<Result<Vec<_>>>()?;
        let f0 = frames[0];
        Ok(IntrinsicSpec {
            kappa: ScalarFn::Table { s0: 0.0, ds, values: frames.iter().map(|f| f.kappa).collect() },
            tau: Some(ScalarFn::Table { s0: 0.0, ds, values: frames.iter().map(|f| f.tau).collect() }),
            s0: 0.0,
            s1: total,
            origin: p0,
            tangent: f0.tangent,
            normal: f0.normal,
        })
    }

    fn validate_frame(&self) -> Result<()> {
        if !(self.s1 > self.s0) {
            return Err(GeoError::InvalidArgument(format!("empty arclength interval [{}, {}]", self.s0, self.s1)));
        }
        let (t, n) = (self.tangent, self.normal);
        let worst = (t.norm() - 1.0).abs().max((n.norm() - 1.0).abs()).max(t.dot(n).abs());
        if worst > 1e-12 {
            return Err(GeoError::InvalidArgument(format!("initial frame is not orthonormal (defect {worst:e})")));
        }
        Ok(())
    }
}

/// Frame sample of a space reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
}

#[derive(Debug, Clone)]
pub struct SpaceReconstruction {
    pub curve: CurveSpec,
    pub frames: Vec<Frame>,
    /// Largest orthonormality defect seen after a step, before re-orthonormalization.
    pub max_drift: f64,
}

/// Plane curve with signed curvature `κ(s)`: the turning angle is integrated
/// first, then the position, both by Simpson's rule on each step.
pub fn reconstruct_plane(spec: &IntrinsicSpec, steps: usize) -> Result<CurveSpec> {
    if steps < 2 {
        return Err(GeoError::InvalidArgument("plane reconstruction needs at least 2 steps".into()));
    }
    spec.validate_frame()?;
    let t = spec.tangent.xy();
    if spec.tangent.z.abs() > 1e-12 || (t.norm() - 1.0).abs() > 1e-12 {
        return Err(GeoError::InvalidArgument("plane reconstruction needs a tangent in the xy-plane".into()));
    }
    let h = (spec.s1 - spec.s0) / steps as f64;
    let k = |s: f64| -> Result<f64> {
        let v = spec.kappa.eval(s)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeoError::Diverged { t: s })
        }
    };

    let mut theta = t.y.atan2(t.x);
    let mut pos = spec.origin.xy();
    let mut points = Vec::with_capacity(steps + 1);
    let mut params = Vec::with_capacity(steps + 1);
    points.push(pos.extend(0.0));
    params.push(spec.s0);
    let mut k_lo = k(spec.s0)?;
    for i in 0..steps {
        let s = spec.s0 + i as f64 * h;
        let (k_q1, k_mid, k_q3, k_hi) = (k(s + 0.25 * h)?, k(s + 0.5 * h)?, k(s + 0.75 * h)?, k(s + h)?);
        let theta_mid = theta + h / 12.0 * (k_lo + 4.0 * k_q1 + k_mid);
        let theta_hi = theta_mid + h / 12.0 * (k_mid + 4.0 * k_q3 + k_hi);
        let step = (Vec2::from_angle(theta) + Vec2::from_angle(theta_mid) * 4.0 + Vec2::from_angle(theta_hi)) * (h / 6.0);
        pos = pos + step;
        theta = theta_hi;
        k_lo = k_hi;
        points.push(pos.extend(0.0));
        params.push(if i + 1 == steps { spec.s1 } else { s + h });
    }
    CurveSpec::sampled(points, Some(params), false)
}

fn frame_rhs(y: &[f64; 12], k: f64, t: f64) -> [f64; 12] {
    let pick = |i: usize| Vec3::new(y[i], y[i + 1], y[i + 2]);
    let (tan, nor, bin) = (pick(3), pick(6), pick(9));
    let dp = tan;
    let dt = nor * k;
    let dn = tan * -k + bin * t;
    let db = nor * -t;
    let mut out = [0.0; 12];
    for (i, v) in [dp, dt, dn, db].into_iter().enumerate() {
        out[3 * i] = v.x;
        out[3 * i + 1] = v.y;
        out[3 * i + 2] = v.z;
    }
    out
}

/// Space curve from `κ(s) > 0` and `τ(s)`, integrating the Frenet system with
/// RK4 and Gram–Schmidt after every step.
pub fn reconstruct_space(spec: &IntrinsicSpec, steps: usize) -> Result<SpaceReconstruction> {
    if steps < 1 {
        return Err(GeoError::InvalidArgument("space reconstruction needs at least 1 step".into()));
    }
    spec.validate_frame()?;
    let tau_fn = spec.tau.clone().unwrap_or_else(|| ScalarFn::constant(0.0));
    let h = (spec.s1 - spec.s0) / steps as f64;
    for i in 0..=2 * steps {
        let s = spec.s0 + 0.5 * h * i as f64;
        let k = spec.kappa.eval(s)?;
        if !(k > 0.0) {
            return Err(GeoError::HypothesisViolation(format!("curvature must be positive, κ({s}) = {k}")));
        }
    }

    let b0 = spec.tangent.cross(spec.normal);
    let mut y = [0.0; 12];
    for (i, v) in [spec.origin, spec.tangent, spec.normal, b0].into_iter().enumerate() {
        y[3 * i..3 * i + 3].copy_from_slice(&v.to_array());
    }
    let mut rhs = |s: f64, y: &[f64; 12]| -> Result<[f64; 12]> { Ok(frame_rhs(y, spec.kappa.eval(s)?, tau_fn.eval(s)?)) };

    let pick = |y: &[f64; 12], i: usize| Vec3::new(y[i], y[i + 1], y[i + 2]);
    let frame_of = |y: &[f64; 12]| Frame { tangent: pick(y, 3), normal: pick(y, 6), binormal: pick(y, 9) };
    let mut points = vec![spec.origin];
    let mut params = vec![spec.s0];
    let mut frames = vec![frame_of(&y)];
    let mut max_drift: f64 = 0.0;
    for i in 0..steps {
        let s = spec.s0 + i as f64 * h;
        y = rk4_step(&mut rhs, s, &y, h)?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GeoError::Diverged { t: s + h });
        }
        let f = frame_of(&y);
        let defect = [
            (f.tangent.norm_squared() - 1.0).abs(),
            (f.normal.norm_squared() - 1.0).abs(),
            (f.binormal.norm_squared() - 1.0).abs(),
            f.tangent.dot(f.normal).abs(),
            f.normal.dot(f.binormal).abs(),
            f.tangent.dot(f.binormal).abs(),
        ];
        max_drift = defect.into_iter().fold(max_drift, f64::max);

        let tan = f.tangent / f.tangent.norm();
        let nor = f.normal - tan * f.normal.dot(tan);
        let nor = nor / nor.norm();
        let bin = tan.cross(nor);
        for (k, v) in [tan, nor, bin].into_iter().enumerate() {
            y[3 + 3 * k..6 + 3 * k].copy_from_slice(&v.to_array());
        }
        points.push(pick(&y, 0));
        params.push(if i + 1 == steps { spec.s1 } else { s + h });
        frames.push(frame_of(&y));
    }
    Ok(SpaceReconstruction { curve: CurveSpec::sampled(points, Some(params), false)?, frames, max_drift })
}

/// Orientation-preserving isometry `x ↦ R·x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    /// Row-major rotation matrix.
    pub rotation: [[f64; 3]; 3],
    pub translation: Vec3,
}

impl RigidMotion {
    pub fn apply(&self, p: Vec3) -> Vec3 {
        let r = &self.rotation;
        Vec3::new(
            r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z,
            r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
            r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z,
        ) + self.translation
    }

    /// Rotation by `angle` about the unit axis, then translation.
    pub fn from_axis_angle(axis: Vec3, angle: f64, translation: Vec3) -> RigidMotion {
        let a = axis.normalized().unwrap_or(Vec3::Z);
        let (s, c) = angle.sin_cos();
        let v = 1.0 - c;
        RigidMotion {
            rotation: [
                [c + a.x * a.x * v, a.x * a.y * v - a.z * s, a.x * a.z * v + a.y * s],
                [a.y * a.x * v + a.z * s, c + a.y * a.y * v, a.y * a.z * v - a.x * s],
                [a.z * a.x * v - a.y * s, a.z * a.y * v + a.x * s, c + a.z * a.z * v],
            ],
            translation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alignment {
    /// Motion carrying `a` onto `b`.
    pub motion: RigidMotion,
    /// RMS distance after alignment.
    pub residual: f64,
}

fn outer(a: Vec3, b: Vec3) -> Matrix3<f64> {
    Matrix3::new(a.x * b.x, a.x * b.y, a.x * b.z, a.y * b.x, a.y * b.y, a.y * b.z, a.z * b.x, a.z * b.y, a.z * b.z)
}

/// Best orientation-preserving isometry taking the points of `a` to the
/// matching points of `b` (Kabsch).
pub fn rigid_align(a: &[Vec3], b: &[Vec3]) -> Result<Alignment> {
    if a.len() != b.len() {
        return Err(GeoError::InvalidArgument(format!("sample counts differ: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 3 {
        return Err(GeoError::Underdetermined(format!("{} points", a.len())));
    }
    let n = a.len() as f64;
    let ca = a.iter().fold(Vec3::ZERO, |s, p| s + *p) / n;
    let cb = b.iter().fold(Vec3::ZERO, |s, p| s + *p) / n;
    let mut h = Matrix3::zeros();
    let mut spread = Matrix3::zeros();
    for (p, q) in a.iter().zip(b) {
        h += outer(*p - ca, *q - cb);
        spread += outer(*p - ca, *p - ca);
    }
    let sv = spread.symmetric_eigenvalues();
    let mut ev = [sv[0], sv[1], sv[2]];
    ev.sort_by(f64::total_cmp);
    if !(ev[1] > 1e-20 * ev[2].max(f64::MIN_POSITIVE)) || ev[2] == 0.0 {
        return Err(GeoError::Underdetermined("points are collinear".into()));
    }
    let svd = h.svd(true, true);
    let (u, vt) = (svd.u.expect("requested U"), svd.v_t.expect("requested Vᵀ"));
    let v = vt.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let rot = v * Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, 1.0, d)) * u.transpose();
    let rotation = [
        [rot[(0, 0)], rot[(0, 1)], rot[(0, 2)]],
        [rot[(1, 0)], rot[(1, 1)], rot[(1, 2)]],
        [rot[(2, 0)], rot[(2, 1)], rot[(2, 2)]],
    ];
    let mut motion = RigidMotion { rotation, translation: Vec3::ZERO };
    motion.translation = cb - motion.apply(ca);
    let sq: f64 = a.iter().zip(b).map(|(p, q)| motion.apply(*p).distance(*q).powi(2)).sum();
    Ok(Alignment { motion, residual: (sq / n).sqrt() })
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &[Vec3], b: &[Vec3]) -> f64 {
    let one_way = |x: &[Vec3], y: &[Vec3]| {
        x.iter()
            .map(|p| y.iter().map(|q| p.distance(*q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Largest distance from the points to their least-squares plane.
pub fn planarity_defect(points: &[Vec3]) -> f64 {
    let n = points.len() as f64;
    let c = points.iter().fold(Vec3::ZERO, |s, p| s + *p) / n;
    let mut spread = Matrix3::zeros();
    for p in points {
        spread += outer(*p - c, *p - c);
    }
    let eig = spread.symmetric_eigen();
    let (i, _) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("three eigenvalues");
    let col = eig.eigenvectors.column(i);
    let normal = Vec3::new(col[0], col[1], col[2]);
    points.iter().map(|p| (*p - c).dot(normal).abs()).fold(0.0, f64::max)
}

/// Points of a sampled curve; analytic curves are sampled uniformly in `t`.
pub fn curve_points(c: &CurveSpec) -> Result<Vec<Vec3>> {
    match c {
        CurveSpec::Sampled(s) => Ok(s.points.clone()),
        CurveSpec::Analytic(_) => c.polyline(1000),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, TAU};

    fn pts(c: &CurveSpec) -> Vec<Vec3> {
        curve_points(c).unwrap()
    }

    #[test]
    fn straight_line_and_circle() {
        let line = reconstruct_plane(&IntrinsicSpec::plane(ScalarFn::constant(0.0), 0.0, 3.0), 30).unwrap();
        for (i, p) in pts(&line).iter().enumerate() {
            assert!((*p - Vec3::X * (0.1 * i as f64)).norm() < 1e-13);
        }
        let k = 0.5;
        let spec = IntrinsicSpec::plane(ScalarFn::constant(k), 0.0, 2.0 * PI / k);
        let circle = reconstruct_plane(&spec, 2000).unwrap();
        let center = Vec3::Y / k;
        for p in pts(&circle) {
            assert!((p.distance(center) - 1.0 / k).abs() < 1e-10);
        }
        let CurveSpec::Sampled(s) = &circle else { panic!() };
        assert!(s.points[0].distance(*s.points.last().unwrap()) < 1e-10);
    }

    #[test]
    fn plane_output_is_unit_speed_with_prescribed_curvature() {
        let spec = IntrinsicSpec::plane(ScalarFn::parse("1 + 0.5*sin(s)").unwrap(), 0.0, 5.0);
        let c = reconstruct_plane(&spec, 50_000).unwrap();
        let CurveSpec::Sampled(s) = &c else { panic!() };
        let h = s.params[1] - s.params[0];
        for w in s.points.windows(2).step_by(97) {
            let r = w[0].distance(w[1]) / h;
            assert!(r <= 1.0 + 1e-12 && r > 1.0 - 1e-8);
        }
        for k in 1..20 {
            let sv = 0.25 * k as f64;
            let got = c.signed_curvature(sv).unwrap();
            assert!((got - (1.0 + 0.5 * sv.sin())).abs() < 1e-4, "{sv}: {got}");
        }
    }

    #[test]
    fn ellipse_round_trip() {
        let ellipse = CurveSpec::plane("2*cos(t)", "sin(t)", 0.0, TAU, true).unwrap();
        let spec = IntrinsicSpec::measure(&ellipse, 4000).unwrap();
        let steps = 20_000;
        let rebuilt = reconstruct_plane(&spec, steps).unwrap();
        let truth = ellipse.arclength_reparam(steps).unwrap();
        let mut a = pts(&rebuilt);
        a.pop();
        let b = pts(&truth);
        let fit = rigid_align(&a, &b).unwrap();
        assert!(fit.residual < 1e-6, "{}", fit.residual);
        let moved: Vec<Vec3> = a.iter().map(|p| fit.motion.apply(*p)).collect();
        let coarse = |v: &[Vec3]| v.iter().step_by(10).copied().collect::<Vec<_>>();
        assert!(hausdorff(&coarse(&moved), &coarse(&b)) < 1e-4);
    }

    #[test]
    fn helix_from_constants() {
        let (a, b) = (2.0, 1.0);
        let d = a * a + b * b;
        let spec = IntrinsicSpec::space(ScalarFn::constant(a / d), ScalarFn::constant(b / d), 0.0, 10.0);
        let rec = reconstruct_space(&spec, 10_000).unwrap();
        assert!(rec.max_drift < 1e-7);
        let helix = CurveSpec::analytic("2*cos(t)", "2*sin(t)", "t", 0.0, 10.0 / d.sqrt(), false).unwrap();
        let truth = helix.arclength_reparam(10_000).unwrap();
        let fit = rigid_align(&pts(&rec.curve), &pts(&truth)).unwrap();
        assert!(fit.residual < 1e-8, "{}", fit.residual);
    }

    #[test]
    fn zero_torsion_is_planar_and_nonpositive_curvature_is_rejected() {
        let spec = IntrinsicSpec::space(ScalarFn::parse("1 + s^2").unwrap(), ScalarFn::constant(0.0), 0.0, 3.0)
            .with_frame(Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.0, 0.6, 0.8), Vec3::new(1.0, 0.0, 0.0));
        let rec = reconstruct_space(&spec, 5000).unwrap();
        assert!(planarity_defect(&pts(&rec.curve)) < 1e-6);
        let bad = IntrinsicSpec::space(ScalarFn::parse("s - 1").unwrap(), ScalarFn::constant(0.0), 0.0, 3.0);
        assert!(matches!(reconstruct_space(&bad, 100), Err(GeoError::HypothesisViolation(_))));
        let skew = IntrinsicSpec::space(ScalarFn::constant(1.0), ScalarFn::constant(0.0), 0.0, 1.0)
            .with_frame(Vec3::ZERO, Vec3::X, Vec3::new(0.1, 1.0, 0.0));
        assert!(reconstruct_space(&skew, 10).is_err());
    }

    #[test]
    fn moment_curve_round_trip() {
        let c = CurveSpec::analytic("t", "t^2", "t^3", 0.0, 1.0, false).unwrap();
        let spec = IntrinsicSpec::measure(&c, 2000).unwrap();
        let steps = 10_000;
        let rec = reconstruct_space(&spec, steps).unwrap();
        let truth = c.arclength_reparam(steps).unwrap();
        let fit = rigid_align(&pts(&rec.curve), &pts(&truth)).unwrap();
        assert!(fit.residual < 1e-3, "{}", fit.residual);
        let measured = rec.curve.kappa(0.5).unwrap();
        assert!((measured - spec.kappa.eval(0.5).unwrap()).abs() < 1e-3);
    }

    #[test]
    fn reconstruction_is_unique_up_to_isometry() {
        let spec = IntrinsicSpec::space(ScalarFn::parse("1 + 0.3*cos(s)").unwrap(), ScalarFn::parse("0.5*sin(2*s)").unwrap(), 0.0, 6.0);
        let motion = RigidMotion::from_axis_angle(Vec3::new(1.0, -2.0, 0.5), 1.1, Vec3::new(3.0, 1.0, -2.0));
        let moved = spec.clone().with_frame(motion.apply(Vec3::ZERO), motion.apply(Vec3::X) - motion.translation, motion.apply(Vec3::Y) - motion.translation);
        let a = reconstruct_space(&spec, 6000).unwrap();
        let b = reconstruct_space(&moved, 6000).unwrap();
        let fit = rigid_align(&pts(&a.curve), &pts(&b.curve)).unwrap();
        assert!(fit.residual < 1e-8, "{}", fit.residual);
    }

    #[test]
    fn alignment_recovers_motion_and_respects_orientation() {
        let helix = CurveSpec::analytic("cos(t)", "sin(t)", "0.3*t", 0.0, 9.0, false).unwrap();
        let a = helix.polyline(400).unwrap();
        let m = RigidMotion::from_axis_angle(Vec3::new(0.3, 0.4, -1.0), 2.2, Vec3::new(-1.0, 5.0, 0.25));
        let b: Vec<Vec3> = a.iter().map(|p| m.apply(*p)).collect();
        let fit = rigid_align(&a, &b).unwrap();
        assert!(fit.residual < 1e-10);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(fit.motion.rotation[i][j], m.rotation[i][j], epsilon = 1e-9);
            }
        }
        let mirrored: Vec<Vec3> = a.iter().map(|p| Vec3::new(p.x, p.y, -p.z)).collect();
        assert!(rigid_align(&a, &mirrored).unwrap().residual > 1e-3);
        let line = vec![Vec3::ZERO, Vec3::X, Vec3::X * 2.0, Vec3::X * 3.0];
        assert!(matches!(rigid_align(&line, &line), Err(GeoError::Underdetermined(_))));
        assert!(matches!(rigid_align(&line[..2], &line[..2]), Err(GeoError::Underdetermined(_))));
    }

    #[test]
    fn table_interpolation_is_cubic_exact() {
        let f = ScalarFn::Table { s0: 1.0, ds: 0.5, values: (0..10).map(|k| (1.0 + 0.5 * k as f64).powi(3)).collect() };
        for s in [1.0, 1.3, 2.75, 5.5] {
            assert_relative_eq!(f.eval(s).unwrap(), s.powi(3), epsilon = 1e-12);
        }
    }
}
