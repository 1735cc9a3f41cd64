//! Vector, matrix and rotation primitives on SO(3).
//!
//! Everything here is a plain value type. The eigen-solver and the polar
//! projection are specialised to 3x3 and carry no external linear-algebra
//! dependency.

mod eigen;
mod linalg;
mod rotation;

pub use eigen::{sym_eigen, sym_eigen_with_tol, Spectrum3};
pub use linalg::{Mat3, Vec3};
pub use rotation::{
    hat, log_axis_angle, project_to_so3, psi_map, rodrigues, rotation_about, vee, vee_with_tol,
    AxisAngle, Rotation,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum So3Error {
    #[error("matrix is not antisymmetric (‖A + Aᵀ‖ = {0:.3e})")]
    NotAntisymmetric(f64),
    #[error("matrix is not symmetric (‖A − Aᵀ‖ = {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not a rotation (orthogonality error {orth:.3e}, det {det})")]
    NotRotation { orth: f64, det: f64 },
    #[error("axis is not a unit vector (|u| = {0})")]
    NonUnitAxis(f64),
    #[error("angle {0} is outside [0, π]")]
    AngleOutOfRange(f64),
    #[error("cannot project a matrix with det = {0} ≤ 0 onto SO(3)")]
    NonPositiveDeterminant(f64),
    #[error("non-finite input")]
    NonFinite,
}
