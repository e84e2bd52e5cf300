//! Rectifiable distances `d_inf`, `d_p` on the unitary group and closed balls.
//!
//! Both metrics are evaluated through the principal logarithm:
//! `d(u, v) = ||log(u^-1 v)||`, where the norm is the operator norm for `d_inf`
//! and the Schatten `p`-norm for `d_p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::functions::{unitary_angles, UnitaryAngles};
use crate::linalg::jacobi::hermitian_eigen;
use crate::linalg::norms::{schatten_from_moduli, validate_p};
use crate::linalg::types::{TraceConvention, UnitaryPoint};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Spectral angles of `u^-1 v`.
pub fn relative_angles<T: Real>(
    u: &UnitaryPoint<T>,
    v: &UnitaryPoint<T>,
    tol: &Tolerances,
) -> Result<UnitaryAngles<T>> {
    u.mat().check_same_dim(v.mat())?;
    unitary_angles(&u.left_quotient(v), tol)
}

pub(crate) fn max_abs_angle<T: Real>(angles: &[T]) -> T {
    angles.iter().map(|a| a.abs()).fold(T::zero(), T::max).min(T::PI())
}

/// `d_inf(u, v) = ||log(u^-1 v)||_inf`, in `[0, pi]`.
pub fn d_inf<T: Real>(u: &UnitaryPoint<T>, v: &UnitaryPoint<T>, tol: &Tolerances) -> Result<T> {
    Ok(max_abs_angle(&relative_angles(u, v, tol)?.angles))
}

/// `d_p(u, v) = ||log(u^-1 v)||_p` under the given trace convention.
pub fn d_p<T: Real>(
    u: &UnitaryPoint<T>,
    v: &UnitaryPoint<T>,
    p: u32,
    conv: TraceConvention,
    tol: &Tolerances,
) -> Result<T> {
    validate_p(p)?;
    let ra = relative_angles(u, v, tol)?;
    Ok(schatten_from_moduli(ra.angles, p, conv, u.n()))
}

/// `d_2`, the Riemannian distance of the trace inner product.
pub fn d_2<T: Real>(
    u: &UnitaryPoint<T>,
    v: &UnitaryPoint<T>,
    conv: TraceConvention,
    tol: &Tolerances,
) -> Result<T> {
    d_p(u, v, 2, conv, tol)
}

/// Metric defining a ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BallMetric {
    DInf,
    DP { p: u32, conv: TraceConvention },
}

/// Closed ball `B[center, radius]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSpec<T: Real> {
    pub center: UnitaryPoint<T>,
    pub radius: T,
    pub metric: BallMetric,
}

impl<T: Real> BallSpec<T> {
    pub fn new(center: UnitaryPoint<T>, radius: T, metric: BallMetric) -> Result<Self> {
        if !radius.is_finite() || radius < T::zero() {
            return Err(Error::InvalidBall(format!("radius {radius} must be finite and >= 0")));
        }
        match metric {
            BallMetric::DInf if radius > T::PI() => {
                return Err(Error::InvalidBall(format!("d_inf radius {radius} exceeds pi")));
            }
            BallMetric::DP { p, .. } => validate_p(p)?,
            BallMetric::DInf => {}
        }
        Ok(Self { center, radius, metric })
    }

    /// `B_inf[center, radius]`.
    pub fn d_inf(center: UnitaryPoint<T>, radius: T) -> Result<Self> {
        Self::new(center, radius, BallMetric::DInf)
    }
}

/// Ball membership with a signed margin (nonnegative inside).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallMembership<T> {
    pub inside: bool,
    /// For `d_inf`: `lambda_min(q + q*) - 2 cos(r)` with `q = w^-1 u`.
    /// For `d_p`: `r - d_p(u, w)`.
    pub margin: T,
}

/// Ball membership. For `d_inf` this is the operator inequality
/// `q + q* >= 2 cos(r) id` with `q = w^-1 u`, which stays well conditioned at
/// the branch cut.
pub fn in_ball<T: Real>(u: &UnitaryPoint<T>, b: &BallSpec<T>, tol: &Tolerances) -> Result<BallMembership<T>> {
    u.mat().check_same_dim(b.center.mat())?;
    let margin = match b.metric {
        BallMetric::DInf => {
            let q = b.center.left_quotient(u);
            let s = q.mat() + &q.mat().adjoint();
            let lambda_min = if u.n() == 1 {
                s[(0, 0)].re
            } else {
                hermitian_eigen(&s, tol.max_sweeps)?.values[0]
            };
            lambda_min - T::lit(2.0) * b.radius.cos()
        }
        BallMetric::DP { p, conv } => b.radius - d_p(u, &b.center, p, conv, tol)?,
    };
    Ok(BallMembership {
        inside: margin >= -Tolerances::get::<T>(tol.ball_tol),
        margin,
    })
}
