use serde::{Deserialize, Serialize};

use super::SimError;
use crate::so3::{hat, sym_eigen, Mat3, Vec3};

/// Rigid-body inertia.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Mat3", into = "Mat3")]
pub struct PlantParams {
    inertia: Mat3,
    inertia_inv: Mat3,
}

impl PlantParams {
    pub fn new(inertia: Mat3) -> Result<Self, SimError> {
        let spec = sym_eigen(&inertia).map_err(|e| SimError::InvalidScenario(format!("inertia: {e}")))?;
        if !(spec.min() > 0.0) {
            return Err(SimError::InvalidScenario(format!(
                "inertia must be positive definite (smallest eigenvalue {})",
                spec.min()
            )));
        }
        let inertia = inertia.sym_part();
        let inertia_inv = inertia
            .inverse(0.0)
            .ok_or_else(|| SimError::InvalidScenario("singular inertia".into()))?;
        Ok(Self { inertia, inertia_inv })
    }

    pub fn inertia(&self) -> &Mat3 {
        &self.inertia
    }

    pub fn inertia_inv(&self) -> &Mat3 {
        &self.inertia_inv
    }
}

impl Default for PlantParams {
    /// `diag(0.5, 0.7, 0.3)` kg·m².
    fn default() -> Self {
        Self::new(Mat3::diag([0.5, 0.7, 0.3])).expect("default inertia is positive definite")
    }
}

impl TryFrom<Mat3> for PlantParams {
    type Error = SimError;
    fn try_from(m: Mat3) -> Result<Self, SimError> {
        Self::new(m)
    }
}

impl From<PlantParams> for Mat3 {
    fn from(p: PlantParams) -> Mat3 {
        p.inertia
    }
}

/// `Ṙ = R ω^`, `J ω̇ = −ω × Jω + τ`.
pub fn plant_derivative(params: &PlantParams, r: &Mat3, omega: Vec3, torque: Vec3) -> (Mat3, Vec3) {
    let j_omega = *params.inertia() * omega;
    let omega_dot = *params.inertia_inv() * (torque - omega.cross(&j_omega));
    (*r * hat(omega), omega_dot)
}
