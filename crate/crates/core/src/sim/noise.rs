//! Seeded measurement noise.
//!
//! The generator is xoshiro256++ seeded through SplitMix64 (`seed_from_u64`).
//! Uniforms use the top 53 bits, `u = (x >> 11) · 2⁻⁵³ ∈ [0, 1)`. Each normal
//! consumes two uniforms through the cosine branch of Box–Muller,
//! `√(−2 ln(1 − u₁)) cos(2π u₂)`. Every step draws, in order: three normals for
//! the attitude-noise axis, one uniform for its angle, three normals for the gyro.

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::so3::{rotation_about, Rotation, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Attitude noise angle is uniform on `(0, attitude_max_angle)`.
    pub attitude_max_angle: f64,
    /// Standard deviation of the additive gyro noise.
    pub gyro_sigma: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn none() -> Self {
        Self { attitude_max_angle: 0.0, gyro_sigma: 0.0, seed: 0 }
    }

    /// `α ~ U(0, 0.01π)`, `σ_ω = 0.01`.
    pub fn benchmark(seed: u64) -> Self {
        Self { attitude_max_angle: 0.01 * std::f64::consts::PI, gyro_sigma: 0.01, seed }
    }

    pub fn is_silent(&self) -> bool {
        self.attitude_max_angle == 0.0 && self.gyro_sigma == 0.0
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self::none()
    }
}

/// One measurement perturbation: `R̄ = R · attitude`, `ω̄ = ω + gyro`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSample {
    pub attitude: Rotation,
    pub gyro: Vec3,
}

impl NoiseSample {
    pub const NONE: NoiseSample = NoiseSample { attitude: Rotation::IDENTITY, gyro: Vec3::ZERO };
}

pub struct MeasurementNoise {
    config: NoiseConfig,
    rng: Xoshiro256PlusPlus,
}

impl MeasurementNoise {
    pub fn new(config: NoiseConfig) -> Self {
        Self { config, rng: Xoshiro256PlusPlus::seed_from_u64(config.seed) }
    }

    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    fn normal3(&mut self) -> Vec3 {
        let x = self.normal();
        let y = self.normal();
        let z = self.normal();
        Vec3::new(x, y, z)
    }

    pub fn sample(&mut self) -> NoiseSample {
        let n = self.normal3();
        let alpha = self.config.attitude_max_angle * self.uniform();
        let gyro = self.normal3() * self.config.gyro_sigma;
        if self.config.is_silent() {
            return NoiseSample::NONE;
        }
        let attitude = match n.normalized() {
            Some(axis) if alpha > 0.0 => rotation_about(axis, alpha),
            _ => Rotation::IDENTITY,
        };
        NoiseSample { attitude, gyro }
    }
}
