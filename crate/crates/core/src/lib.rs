//! Centrally synergistic potential-function families on SO(3), built from a single
//! modified trace function `Ψ_M(X) = tr(M(I − X))` by warping the attitude about
//! several directions, together with gap certification and a hybrid attitude
//! tracking simulator.
//!
//! Module map:
//! - [`so3`]: vectors, matrices, rotations and the symmetric eigen-solver.
//! - [`trace`]: modified trace functions and their critical-point structure.
//! - [`family`]: warping directions, the warped family, gap bounds and certification.
//! - [`sim`]: rigid-body plant, reference, noise, controllers and the hybrid integrator.
//! - [`exec`]: data-parallel helpers with a sequential fallback.

// `!(x > tol)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod exec;
pub mod family;
pub mod sim;
pub mod so3;
pub mod tolerance;
pub mod trace;

pub use family::{CertificationReport, FamilyError, SynergisticFamily, WarpingDirections};
pub use so3::{AxisAngle, Mat3, Rotation, Spectrum3, Vec3};
pub use trace::{InertialVectorSet, SpectrumCase, TraceShape};
