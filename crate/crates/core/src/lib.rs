//! Numerical differential geometry of curves and surfaces.
//!
//! Curves and surfaces are described by small expression strings (see
//! [`exprparse`]) or by builtin analytic charts, and every derivative is
//! taken exactly with Taylor jets rather than by finite differences.

pub mod curvebuild;
pub mod curves;
pub mod error;
pub mod exprparse;
pub mod gallery;
pub mod geodesy;
pub mod intrinsic;
pub mod numcore;
pub mod surfaces;
pub mod transport;
pub mod verify;

pub use error::{GeoError, Result};
pub use exprparse::{Expr, Jet2x2, Jet3, ParseError};
pub use numcore::{Mat2, OdeTrajectory, Vec2, Vec3};
