//! Centralized numerical tolerances.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Tolerance record used by every invariant check in the crate.
///
/// Values are stored as `f64` and converted to the working scalar on use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// `||m + m*|| <= skew_tol * ||m||` for skew-Hermitian tangents.
    pub skew_tol: f64,
    /// `||u* u - id|| <= unit_tol` for unitary points.
    pub unit_tol: f64,
    /// Spectral reconstruction residual per dimension.
    pub eig_tol: f64,
    /// Distance to `-1` below which an eigenvalue is treated as on the branch cut.
    pub branch_tol: f64,
    /// `||m m* - m* m|| <= normal_tol * max(1, ||m||^2)` for normal matrices.
    pub normal_tol: f64,
    /// Relative gap under which Hermitian-part eigenvalues are clustered.
    pub cluster_tol: f64,
    /// Margin slack accepted by ball membership.
    pub ball_tol: f64,
    /// Defining-equation residual accepted by subspace membership.
    pub member_tol: f64,
    /// Maximum number of cyclic Jacobi sweeps.
    pub max_sweeps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            skew_tol: 1e-12,
            unit_tol: 1e-10,
            eig_tol: 1e-10,
            branch_tol: 1e-8,
            normal_tol: 1e-9,
            cluster_tol: 1e-6,
            ball_tol: 1e-9,
            member_tol: 1e-8,
            max_sweeps: 100,
        }
    }
}

impl Tolerances {
    /// Defaults loosened for single precision.
    pub fn single_precision() -> Self {
        Self {
            skew_tol: 1e-5,
            unit_tol: 1e-4,
            eig_tol: 1e-4,
            branch_tol: 1e-3,
            normal_tol: 1e-4,
            cluster_tol: 1e-3,
            ball_tol: 1e-4,
            member_tol: 1e-4,
            max_sweeps: 100,
        }
    }

    /// Defaults matched to the precision of `T`.
    pub fn for_scalar<T: Real>() -> Self {
        if T::epsilon().to_f64_lossy() > 1e-10 {
            Self::single_precision()
        } else {
            Self::default()
        }
    }

    /// Multiplies every tolerance by `factor` (sweep limits untouched).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            skew_tol: self.skew_tol * factor,
            unit_tol: self.unit_tol * factor,
            eig_tol: self.eig_tol * factor,
            branch_tol: self.branch_tol * factor,
            normal_tol: self.normal_tol * factor,
            cluster_tol: self.cluster_tol,
            ball_tol: self.ball_tol * factor,
            member_tol: self.member_tol * factor,
            max_sweeps: self.max_sweeps,
        }
    }

    #[inline]
    pub(crate) fn get<T: Real>(v: f64) -> T {
        T::lit(v)
    }
}
