use thiserror::Error;

use crate::exprparse::ParseError;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, GeoError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("domain error in `{expr}`: {reason}")]
    Domain { expr: String, reason: String },

    #[error("integration diverged at t = {t}")]
    Diverged { t: f64 },

    #[error("non-finite sample at x = {x}")]
    NonFinite { x: f64 },

    #[error("degenerate chart at ({u}, {v})")]
    DegenerateChart { u: f64, v: f64 },

    #[error("first fundamental form is not positive definite")]
    NotPositiveDefinite,

    #[error("irregular parametrization at t = {t} (speed {speed:e})")]
    IrregularParametrization { t: f64, speed: f64 },

    #[error("Frenet frame undefined at t = {t}: curvature {kappa:e} below floor")]
    FrameUndefined { t: f64, kappa: f64 },

    #[error("curve is straight at t = {t}; tangent direction ({dx}, {dy})")]
    StraightLine { t: f64, dx: f64, dy: f64 },

    #[error("osculating sphere undefined at t = {t}: torsion {tau:e} vanishes")]
    SphereUndefined { t: f64, tau: f64 },

    #[error("oriented angle undefined at corner {index}: the curve turns back")]
    Cusp { index: usize },

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("curve is not planar (|z| up to {max_z:e})")]
    NotPlanar { max_z: f64 },

    #[error("curve is not spherical (| |p| - 1 | up to {deviation:e})")]
    NotSpherical { deviation: f64 },

    #[error("closed curve fails periodicity at the endpoints (gap {gap:e})")]
    NotPeriodic { gap: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("underdetermined alignment: {0}")]
    Underdetermined(String),

    #[error("generatrix is not unit speed at s = {s} (|speed - 1| = {deviation:e}); reparametrize by arclength first")]
    NotUnitSpeed { s: f64, deviation: f64 },

    #[error("region is empty on the sampling grid")]
    EmptyRegion,

    #[error("trace left the chart domain at t = {t}")]
    DomainExit { t: f64 },

    #[error("shooting did not converge (best residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("chart is not orthogonal at ({u}, {v}): F = {f:e}")]
    NonOrthogonalChart { u: f64, v: f64, f: f64 },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
}
