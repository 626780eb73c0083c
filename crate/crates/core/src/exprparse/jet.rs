//! Truncated Taylor arithmetic: third order in one variable, second order in two.

use std::ops::{Add, Mul, Neg, Sub};

/// Scalar types the expression evaluator can run on.
///
/// `compose` applies an outer function `g` given its value and first three
/// derivatives at `self.value()` (Faà di Bruno, truncated at the jet order).
pub trait JetScalar: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    /// Whether derivatives are carried; plain `f64` evaluation tolerates kinks.
    const DIFFERENTIATES: bool;

    fn constant(c: f64) -> Self;
    fn value(&self) -> f64;
    fn compose(self, g: [f64; 4]) -> Self;

    fn scale(self, s: f64) -> Self {
        self * Self::constant(s)
    }
}

impl JetScalar for f64 {
    const DIFFERENTIATES: bool = false;

    fn constant(c: f64) -> Self {
        c
    }

    fn value(&self) -> f64 {
        *self
    }

    fn compose(self, g: [f64; 4]) -> Self {
        g[0]
    }
}

/// Value and first three derivatives of a univariate function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet3 {
    pub f: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const fn new(f: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Jet3 { f, d1, d2, d3 }
    }

    /// The identity function seeded at `x`.
    pub const fn variable(x: f64) -> Self {
        Jet3 { f: x, d1: 1.0, d2: 0.0, d3: 0.0 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.f, self.d1, self.d2, self.d3]
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(self.f + o.f, self.d1 + o.d1, self.d2 + o.d2, self.d3 + o.d3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(self.f - o.f, self.d1 - o.d1, self.d2 - o.d2, self.d3 - o.d3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.f, -self.d1, -self.d2, -self.d3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, o: Jet3) -> Jet3 {
        // Leibniz rule up to order 3
        Jet3::new(
            self.f * o.f,
            self.d1 * o.f + self.f * o.d1,
            self.d2 * o.f + 2.0 * self.d1 * o.d1 + self.f * o.d2,
            self.d3 * o.f + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.f * o.d3,
        )
    }
}

impl JetScalar for Jet3 {
    const DIFFERENTIATES: bool = true;

    fn constant(c: f64) -> Self {
        Jet3::new(c, 0.0, 0.0, 0.0)
    }

    fn value(&self) -> f64 {
        self.f
    }

    fn compose(self, g: [f64; 4]) -> Self {
        let (a, b, c) = (self.d1, self.d2, self.d3);
        Jet3::new(
            g[0],
            g[1] * a,
            g[2] * a * a + g[1] * b,
            g[3] * a * a * a + 3.0 * g[2] * a * b + g[1] * c,
        )
    }

    fn scale(self, s: f64) -> Self {
        Jet3::new(self.f * s, self.d1 * s, self.d2 * s, self.d3 * s)
    }
}

/// Value, gradient and Hessian of a bivariate function.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2x2 {
    pub f: f64,
    pub f_u: f64,
    pub f_v: f64,
    pub f_uu: f64,
    pub f_uv: f64,
    pub f_vv: f64,
}

impl Jet2x2 {
    pub const fn constant_value(c: f64) -> Self {
        Jet2x2 { f: c, f_u: 0.0, f_v: 0.0, f_uu: 0.0, f_uv: 0.0, f_vv: 0.0 }
    }

    pub const fn var_u(u: f64) -> Self {
        Jet2x2 { f: u, f_u: 1.0, f_v: 0.0, f_uu: 0.0, f_uv: 0.0, f_vv: 0.0 }
    }

    pub const fn var_v(v: f64) -> Self {
        Jet2x2 { f: v, f_u: 0.0, f_v: 1.0, f_uu: 0.0, f_uv: 0.0, f_vv: 0.0 }
    }

    pub fn laplacian(&self) -> f64 {
        self.f_uu + self.f_vv
    }
}

impl Add for Jet2x2 {
    type Output = Jet2x2;
    fn add(self, o: Jet2x2) -> Jet2x2 {
        Jet2x2 {
            f: self.f + o.f,
            f_u: self.f_u + o.f_u,
            f_v: self.f_v + o.f_v,
            f_uu: self.f_uu + o.f_uu,
            f_uv: self.f_uv + o.f_uv,
            f_vv: self.f_vv + o.f_vv,
        }
    }
}

impl Sub for Jet2x2 {
    type Output = Jet2x2;
    fn sub(self, o: Jet2x2) -> Jet2x2 {
        self + (-o)
    }
}

impl Neg for Jet2x2 {
    type Output = Jet2x2;
    fn neg(self) -> Jet2x2 {
        Jet2x2 { f: -self.f, f_u: -self.f_u, f_v: -self.f_v, f_uu: -self.f_uu, f_uv: -self.f_uv, f_vv: -self.f_vv }
    }
}

impl Mul for Jet2x2 {
    type Output = Jet2x2;
    fn mul(self, o: Jet2x2) -> Jet2x2 {
        Jet2x2 {
            f: self.f * o.f,
            f_u: self.f_u * o.f + self.f * o.f_u,
            f_v: self.f_v * o.f + self.f * o.f_v,
            f_uu: self.f_uu * o.f + 2.0 * self.f_u * o.f_u + self.f * o.f_uu,
            f_uv: self.f_uv * o.f + self.f_u * o.f_v + self.f_v * o.f_u + self.f * o.f_uv,
            f_vv: self.f_vv * o.f + 2.0 * self.f_v * o.f_v + self.f * o.f_vv,
        }
    }
}

impl JetScalar for Jet2x2 {
    const DIFFERENTIATES: bool = true;

    fn constant(c: f64) -> Self {
        Jet2x2::constant_value(c)
    }

    fn value(&self) -> f64 {
        self.f
    }

    fn compose(self, g: [f64; 4]) -> Self {
        Jet2x2 {
            f: g[0],
            f_u: g[1] * self.f_u,
            f_v: g[1] * self.f_v,
            f_uu: g[2] * self.f_u * self.f_u + g[1] * self.f_uu,
            f_uv: g[2] * self.f_u * self.f_v + g[1] * self.f_uv,
            f_vv: g[2] * self.f_v * self.f_v + g[1] * self.f_vv,
        }
    }

    fn scale(self, s: f64) -> Self {
        Jet2x2 {
            f: self.f * s,
            f_u: self.f_u * s,
            f_v: self.f_v * s,
            f_uu: self.f_uu * s,
            f_uv: self.f_uv * s,
            f_vv: self.f_vv * s,
        }
    }
}
