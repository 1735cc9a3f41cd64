use serde::{Deserialize, Serialize};

use super::SimError;
use crate::so3::{Rotation, Vec3};

/// Angular-velocity profile of the desired trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ReferenceProfile {
    /// `ω_d(t) = (t e^{−t/2}, 0.6 sin 0.4t, 0.6 sin 0.7t)`.
    Benchmark,
    /// Constant `ω_d`.
    Constant { omega: Vec3 },
}

impl ReferenceProfile {
    pub fn omega(&self, t: f64) -> Vec3 {
        match self {
            ReferenceProfile::Benchmark => Vec3::new(
                t * (-0.5 * t).exp(),
                0.6 * (0.4 * t).sin(),
                0.6 * (0.7 * t).sin(),
            ),
            ReferenceProfile::Constant { omega } => *omega,
        }
    }

    pub fn omega_dot(&self, t: f64) -> Vec3 {
        match self {
            ReferenceProfile::Benchmark => Vec3::new(
                (1.0 - 0.5 * t) * (-0.5 * t).exp(),
                0.24 * (0.4 * t).cos(),
                0.42 * (0.7 * t).cos(),
            ),
            ReferenceProfile::Constant { .. } => Vec3::ZERO,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConfig {
    pub initial: Rotation,
    pub profile: ReferenceProfile,
    /// Bound on `|ω_d|`.
    pub omega_bound: f64,
    /// Bound on `|ω̇_d|`.
    pub accel_bound: f64,
}

impl Default for ReferenceConfig {
    /// The benchmark profile needs `|ω_d| ≈ 1.04` and `|ω̇_d(0)| ≈ 1.11`, so both
    /// bounds are 1.5.
    fn default() -> Self {
        Self {
            initial: Rotation::IDENTITY,
            profile: ReferenceProfile::Benchmark,
            omega_bound: 1.5,
            accel_bound: 1.5,
        }
    }
}

impl ReferenceConfig {
    pub fn at_rest() -> Self {
        Self {
            profile: ReferenceProfile::Constant { omega: Vec3::ZERO },
            ..Self::default()
        }
    }

    /// Evaluate `(ω_d, ω̇_d)` and check both bounds.
    pub fn sample(&self, t: f64) -> Result<(Vec3, Vec3), SimError> {
        let w = self.profile.omega(t);
        let a = self.profile.omega_dot(t);
        if w.norm() > self.omega_bound {
            return Err(SimError::ReferenceBound { t, quantity: "|ω_d|", value: w.norm(), bound: self.omega_bound });
        }
        if a.norm() > self.accel_bound {
            return Err(SimError::ReferenceBound { t, quantity: "|ω̇_d|", value: a.norm(), bound: self.accel_bound });
        }
        Ok((w, a))
    }
}
