//! Numerical tolerances shared across the crate.

use serde::{Deserialize, Serialize};

/// Structural checks: orthogonality, determinant, symmetry, eigen-residuals.
pub const STRUCTURAL: f64 = 1e-9;
/// Algebraic identities: unit norms, exact orthogonality of chosen directions.
pub const ALGEBRAIC: f64 = 1e-12;
/// Default relative tolerance for declaring two eigenvalues equal.
pub const MULTIPLICITY: f64 = 1e-9;

/// Tolerance set passed to validating constructors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub structural: f64,
    pub algebraic: f64,
    pub multiplicity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: STRUCTURAL,
            algebraic: ALGEBRAIC,
            multiplicity: MULTIPLICITY,
        }
    }
}
