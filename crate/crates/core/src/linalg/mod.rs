//! Dense complex linear algebra: spectral calculus of normal matrices,
//! operator/Schatten norms and trace forms.

pub mod functions;
pub mod io;
pub mod jacobi;
pub mod matrix;
pub mod norms;
pub mod spectral;
pub mod types;

pub use functions::{exp_skew, log_unitary, unitary_angles, PrincipalLog, UnitaryAngles};
pub use io::{matrix_from_json, matrix_to_json, MatrixJson};
pub use jacobi::{hermitian_eigen, HermitianEigen};
pub use matrix::ComplexSquareMatrix;
pub use norms::{hessian_form, op_norm, schatten_norm, singular_values, trace_inner};
pub use spectral::{spectral_normal, SpectralDecomposition};
pub use types::{unitarity_residual, SkewHermitianTangent, TraceConvention, UnitaryPoint};
