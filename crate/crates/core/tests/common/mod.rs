#![allow(dead_code)]

use proptest::prelude::*;
use so3_synergy::family::FamilyConfig;
use so3_synergy::so3::{log_axis_angle, rotation_about};
use so3_synergy::{Mat3, Rotation, SynergisticFamily, TraceShape, Vec3};

pub fn unit_vec() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("non-degenerate", |(x, y, z)| x * x + y * y + z * z > 1e-3)
        .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalized().unwrap())
}

pub fn rotation() -> impl Strategy<Value = Rotation> {
    (unit_vec(), 0.0f64..std::f64::consts::PI).prop_map(|(u, a)| rotation_about(u, a))
}

pub fn benchmark_family() -> SynergisticFamily {
    family([0.2, 0.4, 0.4], 0.465)
}

pub fn family(diag: [f64; 3], k: f64) -> SynergisticFamily {
    let shape = TraceShape::from_matrix(&Mat3::diag(diag)).unwrap();
    SynergisticFamily::new(shape, FamilyConfig::with_k(k)).unwrap()
}

/// Rotation vector `θu` of `r`.
pub fn rotation_vector(r: &Rotation) -> Vec3 {
    let aa = log_axis_angle(r).unwrap();
    aa.axis() * aa.angle()
}

/// Central difference of `f(X exp(sω^))` at `s = 0`.
pub fn directional_fd(f: impl Fn(&Rotation) -> f64, x: &Rotation, omega: Vec3, h: f64) -> f64 {
    let n = omega.norm();
    let u = omega * (1.0 / n);
    let plus = x.compose(&rotation_about(u, h * n));
    let minus = x.compose(&rotation_about(u, -h * n));
    (f(&plus) - f(&minus)) / (2.0 * h)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (b.abs() + 1e-12)
}
