//! Fixed-size linear algebra, closed-form 2×2 eigenproblems, RK4, Simpson
//! quadrature and uniform sphere sampling.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use rand::Rng;

use crate::error::{GeoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };
    pub const X: Vec3 = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Vec3 = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        // hypot-style scaling keeps tiny and huge vectors finite
        let m = self.x.abs().max(self.y.abs()).max(self.z.abs());
        if m == 0.0 || !m.is_finite() {
            return m;
        }
        let (a, b, c) = (self.x / m, self.y / m, self.z / m);
        m * (a * a + b * b + c * c).sqrt()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn distance(self, o: Vec3) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }

    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Unsigned angle in `[0, π]`, computed with `atan2` for accuracy near 0 and π.
    pub fn angle_to(self, o: Vec3) -> f64 {
        self.cross(o).norm().atan2(self.dot(o))
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    /// Counter-clockwise rotation by π/2.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn extend(self, z: f64) -> Vec3 {
        Vec3::new(self.x, self.y, z)
    }

    pub fn from_angle(theta: f64) -> Vec2 {
        Vec2::new(theta.cos(), theta.sin())
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Row-major 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a11: 1.0, a12: 0.0, a21: 0.0, a22: 1.0 };

    pub const fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    /// Symmetric matrix `[[a, b], [b, c]]`; the off-diagonal entries are bitwise equal.
    pub const fn symmetric(a: f64, b: f64, c: f64) -> Self {
        Mat2 { a11: a, a12: b, a21: b, a22: c }
    }

    pub fn diag(a: f64, c: f64) -> Self {
        Mat2::symmetric(a, 0.0, c)
    }

    pub fn is_symmetric(&self) -> bool {
        self.a12 == self.a21
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a11, self.a21, self.a12, self.a22)
    }

    pub fn mul_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.a11 * v.x + self.a12 * v.y, self.a21 * v.x + self.a22 * v.y)
    }

    pub fn mul_mat(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Mat2::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    /// Solves `self · x = rhs` by Cramer's rule.
    pub fn solve(&self, rhs: Vec2) -> Option<Vec2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Vec2::new(
            (rhs.x * self.a22 - self.a12 * rhs.y) / d,
            (self.a11 * rhs.y - self.a21 * rhs.x) / d,
        ))
    }

    /// Bilinear form `aᵀ · self · b`.
    pub fn form(&self, a: Vec2, b: Vec2) -> f64 {
        a.dot(self.mul_vec(b))
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        match (i, j) {
            (0, 0) => &self.a11,
            (0, 1) => &self.a12,
            (1, 0) => &self.a21,
            (1, 1) => &self.a22,
            _ => panic!("Mat2 index ({i}, {j}) out of range"),
        }
    }
}

/// Solution of `A·v = k·B·v` for symmetric `A` and positive-definite `B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedEigen {
    pub k1: f64,
    pub k2: f64,
    /// `B`-normalized eigenvectors: `vᵢᵀ B vᵢ = 1`.
    pub v1: Vec2,
    pub v2: Vec2,
    /// Half the eigenvalue gap, `(k2 - k1) / 2`.
    pub half_gap: f64,
}

/// Closed-form generalized symmetric eigenproblem `second · v = k · first · v`
/// with `k1 ≤ k2`.
///
/// `first` is Cholesky-factored as `L·Lᵀ`; the reduced symmetric matrix
/// `L⁻¹ · second · L⁻ᵀ` is diagonalized by a single rotation, and eigenvectors
/// are mapped back through `L⁻ᵀ`, which makes them `first`-orthonormal.
pub fn eig_generalized_sym2(second: &Mat2, first: &Mat2) -> Result<GeneralizedEigen> {
    let (e, f, g) = (first.a11, 0.5 * (first.a12 + first.a21), first.a22);
    let det = e * g - f * f;
    if !(e > 0.0) || !(det > 0.0) || !det.is_finite() {
        return Err(GeoError::NotPositiveDefinite);
    }
    let (l, m, n) = (second.a11, 0.5 * (second.a12 + second.a21), second.a22);

    // first = [[l11, 0], [l21, l22]] · transpose
    let l11 = e.sqrt();
    let l21 = f / l11;
    let l22 = (det / e).sqrt();

    // C = L⁻¹ · second · L⁻ᵀ, written out for the lower-triangular L.
    let c11 = l / e;
    let c12 = (m - l21 * l / l11) / (l11 * l22);
    let c22 = (n - 2.0 * l21 * m / l11 + l21 * l21 * l / e) / (l22 * l22);

    let mean = 0.5 * (c11 + c22);
    let half_diff = 0.5 * (c11 - c22);
    let rad = half_diff.hypot(c12);

    // Eigenvector of the larger eigenvalue is (cos φ, sin φ) with tan 2φ = 2c12 / (c11 - c22).
    let phi = 0.5 * c12.atan2(half_diff);
    let (s, c) = phi.sin_cos();
    let y2 = Vec2::new(c, s);
    let y1 = Vec2::new(-s, c);

    // v = L⁻ᵀ y
    let back = |y: Vec2| {
        let vy = y.y / l22;
        Vec2::new((y.x - l21 * vy) / l11, vy)
    };

    Ok(GeneralizedEigen {
        k1: mean - rad,
        k2: mean + rad,
        v1: back(y1),
        v2: back(y2),
        half_gap: rad,
    })
}

/// Sampled solution of an initial-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
}

impl<const N: usize> OdeTrajectory<N> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<(f64, &[f64; N])> {
        Some((*self.times.last()?, self.states.last()?))
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

/// One classical RK4 step with a fallible right-hand side.
pub fn rk4_step<const N: usize, E, F>(rhs: &mut F, t: f64, y: &[f64; N], h: f64) -> std::result::Result<[f64; N], E>
where
    F: FnMut(f64, &[f64; N]) -> std::result::Result<[f64; N], E>,
{
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = rhs(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = rhs(t + h, &axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Fixed-step classical RK4 over `[t0, t1]` producing `steps + 1` samples.
pub fn integrate_rk4<const N: usize, F>(mut rhs: F, y0: [f64; N], t0: f64, t1: f64, steps: usize) -> Result<OdeTrajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    try_integrate_rk4(|t, y| Ok(rhs(t, y)), y0, t0, t1, steps)
}

/// [`integrate_rk4`] for right-hand sides that can fail.
pub fn try_integrate_rk4<const N: usize, F>(mut rhs: F, y0: [f64; N], t0: f64, t1: f64, steps: usize) -> Result<OdeTrajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    if steps == 0 {
        return Err(GeoError::InvalidArgument("RK4 needs at least one step".into()));
    }
    if !(t1 > t0) {
        return Err(GeoError::InvalidArgument(format!("empty time interval [{t0}, {t1}]")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(GeoError::Diverged { t: t0 });
    }
    let h = (t1 - t0) / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(t0);
    states.push(y0);
    let mut y = y0;
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        y = rk4_step(&mut rhs, t, &y, h)?;
        let t_next = if i + 1 == steps { t1 } else { t0 + (i + 1) as f64 * h };
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GeoError::Diverged { t: t_next });
        }
        times.push(t_next);
        states.push(y);
    }
    Ok(OdeTrajectory { times, states })
}

/// Composite Simpson rule with `n` (even) panels.
pub fn quad_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> Result<f64> {
    try_quad_simpson(|x| Ok(f(x)), a, b, n)
}

/// [`quad_simpson`] for integrands that can fail.
pub fn try_quad_simpson<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, n: usize) -> Result<f64> {
    if n < 2 || n % 2 != 0 {
        return Err(GeoError::InvalidArgument(format!("Simpson rule needs an even panel count ≥ 2, got {n}")));
    }
    let h = (b - a) / n as f64;
    let mut sample = |x: f64| -> Result<f64> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(GeoError::NonFinite { x })
        }
    };
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let y = sample(a + i as f64 * h)?;
        if i % 2 == 1 {
            odd += y;
        } else {
            even += y;
        }
    }
    let ends = sample(a)? + sample(b)?;
    Ok(h / 3.0 * (ends + 4.0 * odd + 2.0 * even))
}

/// Simpson weights for `n` even panels over uniformly spaced samples.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0
        })
        .collect()
}

/// Pairwise (cascade) summation; the result is independent of thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Uniform point on the unit sphere (Archimedes: uniform height, uniform longitude).
pub fn sample_unit_sphere<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    let v = Vec3::new(r * phi.cos(), r * phi.sin(), z);
    // one Newton step on |v| = 1 removes the rounding in r
    v / v.norm()
}

/// Uniform point on the unit circle.
pub fn sample_unit_circle<R: Rng + ?Sized>(rng: &mut R) -> Vec2 {
    Vec2::from_angle(rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Central 3-point first difference, `O(h²)`.
pub fn central_diff<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Wraps `x` into `(-period/2, period/2]`.
pub fn wrap_symmetric(x: f64, period: f64) -> f64 {
    let r = x - period * (x / period).round();
    if r <= -0.5 * period {
        r + period
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, PI, TAU};

    #[test]
    fn rk4_zero_field_is_constant() {
        let traj = integrate_rk4(|_, _| [0.0], [7.0], 0.0, 1.0, 10).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.states.iter().all(|s| s[0] == 7.0));
    }

    #[test]
    fn rk4_exponential() {
        let traj = integrate_rk4(|_, y| [y[0]], [1.0], 0.0, 1.0, 1000).unwrap();
        assert!((traj.states[1000][0] - E).abs() < 1e-10);
        assert_eq!(*traj.times.last().unwrap(), 1.0);
    }

    #[test]
    fn rk4_harmonic_energy() {
        let traj = integrate_rk4(|_, y| [y[1], -y[0]], [1.0, 0.0], 0.0, TAU, 10_000).unwrap();
        let drift = traj
            .states
            .iter()
            .map(|s| (s[0] * s[0] + s[1] * s[1] - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(drift < 1e-9, "energy drift {drift}");
    }

    #[test]
    fn rk4_order_band() {
        let err = |n| (integrate_rk4(|_, y| [y[0]], [1.0], 0.0, 1.0, n).unwrap().states[n][0] - E).abs();
        let ratio = err(20) / err(40);
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rk4_reports_divergence_time() {
        let r = integrate_rk4(|_, y| [y[0] * y[0]], [1.0], 0.0, 2.0, 100);
        match r {
            Err(GeoError::Diverged { t }) => assert!(t > 0.9 && t <= 2.0),
            other => panic!("expected divergence, got {other:?}"),
        }
        assert!(integrate_rk4(|_, y| [y[0]], [1.0], 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn simpson_cases() {
        // leading error term for sin on [0, π]: 2·h⁴/180 ≈ 1.082e-8 at n = 100
        let err = quad_simpson(f64::sin, 0.0, PI, 100).unwrap() - 2.0;
        let h: f64 = PI / 100.0;
        assert_relative_eq!(err, 2.0 * h.powi(4) / 180.0, max_relative = 1e-3);
        assert!((quad_simpson(f64::sin, 0.0, PI, 200).unwrap() - 2.0).abs() < 1e-9);
        assert_relative_eq!(quad_simpson(|x| x * x, 0.0, 1.0, 2).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        let (a, b) = (3.0_f64, 4.0_f64);
        let helix = quad_simpson(|_| (a * a + b * b).sqrt(), 0.0, TAU, 10).unwrap();
        assert_relative_eq!(helix, 10.0 * PI, epsilon = 1e-12);
        assert!(quad_simpson(|x| 1.0 / x, 0.0, 1.0, 4).is_err());
        assert!(quad_simpson(|x| x, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn eig_identity_and_diag() {
        let r = eig_generalized_sym2(&Mat2::IDENTITY, &Mat2::IDENTITY).unwrap();
        assert_eq!((r.k1, r.k2), (1.0, 1.0));
        assert!(r.v1.dot(r.v2).abs() < 1e-15);

        let r = eig_generalized_sym2(&Mat2::diag(0.0, 4.0), &Mat2::IDENTITY).unwrap();
        assert_relative_eq!(r.k1, 0.0, epsilon = 1e-15);
        assert_relative_eq!(r.k2, 4.0, epsilon = 1e-15);
        assert!(r.v1.y.abs() < 1e-15 && (r.v1.x.abs() - 1.0).abs() < 1e-15);
        assert!(r.v2.x.abs() < 1e-15 && (r.v2.y.abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eig_rejects_indefinite_metric() {
        assert_eq!(
            eig_generalized_sym2(&Mat2::IDENTITY, &Mat2::diag(1.0, -1.0)),
            Err(GeoError::NotPositiveDefinite)
        );
        assert!(eig_generalized_sym2(&Mat2::IDENTITY, &Mat2::symmetric(1.0, 1.0, 1.0)).is_err());
    }

    /// Roots of det(A - k B) = 0 from the quadratic formula.
    fn quadratic_oracle(a: &Mat2, b: &Mat2) -> (f64, f64) {
        let qa = b.det();
        let qb = -(a.a11 * b.a22 + a.a22 * b.a11 - 2.0 * a.a12 * b.a12);
        let qc = a.det();
        let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
        ((-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa))
    }

    #[test]
    fn eig_random_pairs_match_quadratic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = Mat2::symmetric(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let e = rng.gen_range(0.2..3.0);
            let g = rng.gen_range(0.2..3.0);
            let f = rng.gen_range(-0.9..0.9) * (e * g as f64).sqrt();
            let b = Mat2::symmetric(e, f, g);
            let r = eig_generalized_sym2(&a, &b).unwrap();
            let (o1, o2) = quadratic_oracle(&a, &b);
            let scale = 1.0 + o1.abs().max(o2.abs());
            assert!((r.k1 - o1).abs() < 1e-10 * scale, "{} vs {}", r.k1, o1);
            assert!((r.k2 - o2).abs() < 1e-10 * scale);
            for (k, v) in [(r.k1, r.v1), (r.k2, r.v2)] {
                let res = a.mul_vec(v) - b.mul_vec(v) * k;
                assert!(res.norm() < 1e-10 * scale);
                assert_relative_eq!(b.form(v, v), 1.0, epsilon = 1e-12);
            }
            assert!(b.form(r.v1, r.v2).abs() <= 1e-10);
            assert!(r.k1 <= r.k2);
        }
    }

    #[test]
    fn sphere_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut mean = Vec3::ZERO;
        for _ in 0..n {
            let v = sample_unit_sphere(&mut rng);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            mean += v;
        }
        mean = mean / n as f64;
        assert!(mean.x.abs() < 0.02 && mean.y.abs() < 0.02 && mean.z.abs() < 0.02);

        let mut a = ChaCha8Rng::seed_from_u64(99);
        let mut b = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10 {
            assert_eq!(sample_unit_sphere(&mut a), sample_unit_sphere(&mut b));
        }
    }

    #[test]
    fn wrap_and_pairwise() {
        assert!((wrap_symmetric(3.0 * PI, TAU) - PI).abs() < 1e-12);
        assert!((wrap_symmetric(-0.1, TAU) + 0.1).abs() < 1e-15);
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
    }

    proptest::proptest! {
        #[test]
        fn cross_is_orthogonal(ax in -1e3..1e3f64, ay in -1e3..1e3f64, az in -1e3..1e3f64,
                               bx in -1e3..1e3f64, by in -1e3..1e3f64, bz in -1e3..1e3f64) {
            let u = Vec3::new(ax, ay, az);
            let v = Vec3::new(bx, by, bz);
            let w = u.cross(v);
            let bound = 1e-12 * u.norm() * v.norm() * (u.norm() + v.norm());
            proptest::prop_assert!(w.dot(u).abs() <= bound);
            proptest::prop_assert_eq!(w, -(v.cross(u)));
            proptest::prop_assert_eq!(u.dot(v), v.dot(u));
        }
    }
}
