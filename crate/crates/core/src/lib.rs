//! Finsler geometry of finite unitary groups.
//!
//! Geodesics and the `d_inf`, `d_p` metrics on `U(n)`, numerical convexity
//! scans, minimax circumcenters, and fixed-point solvers for finite group
//! actions (intertwiners and invariant projections).
//!
//! Everything is generic over the real scalar `T: Real` (`f32` or `f64`);
//! the aliases below fix `T = f64`.

pub mod center;
pub mod convexity;
pub mod experiment;
pub mod geodesic;
pub mod linalg;
pub mod metric;
pub mod random;
pub mod rigidity;
pub mod report;
pub mod scalar;
pub mod subspace;
pub mod tolerance;
mod error;

pub use error::{Error, Result};
pub use linalg::{ComplexSquareMatrix, SkewHermitianTangent, TraceConvention, UnitaryPoint};
pub use scalar::{Real, C};
pub use tolerance::Tolerances;

pub type Matrix = ComplexSquareMatrix<f64>;
pub type Tangent = SkewHermitianTangent<f64>;
pub type Unitary = UnitaryPoint<f64>;
pub type Matrix32 = ComplexSquareMatrix<f32>;
pub type Unitary32 = UnitaryPoint<f32>;
