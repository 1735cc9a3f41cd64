//! Unwanted critical points of the warped family.
//!
//! Every such point has `T(Y, q) = R_a(π, v)` for a unit eigenvector `v` of `M`,
//! so `Y = R_a(π, v) R_a(θ(Y), u_q)ᵀ`. Writing `s = sin(θ(Y)/2)` the consistency
//! condition `Ψ_M(Y) = 2λ_max^G s / k` together with
//! `Ψ_M(R_a(π, v) R_a(θ, u)) = 2λ^G − 2s²Δ(v, u)` reduces to
//! `Δ s² + (λ_max^G / k) s − λ^G = 0`.

use std::f64::consts::PI;

use serde::Serialize;

use super::{FamilyError, SynergisticFamily};
use crate::so3::{rotation_about, AxisAngle, Rotation, Vec3};
use crate::trace::SpectrumCase;

/// Below this `|Δ|` the quadratic is treated as linear.
const LINEAR_DELTA: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalPointRecord {
    pub q: usize,
    pub v: Vec3,
    pub y: Rotation,
    pub psi_at_y: f64,
    pub theta_at_y: f64,
    pub refined_gap: f64,
    pub full_gap: f64,
    /// `‖ρ_V(Y, q)‖`, zero up to rounding.
    pub rho_norm: f64,
    /// `max_{p ∈ Q_q} Δ(v, u_pq)`; positive at every point of a synergistic family.
    pub necessary_margin: f64,
}

/// Points on the golden-angle spiral, roughly uniform on the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            Vec3::new(r * c, r * s, z)
        })
        .collect()
}

/// Unit eigenvectors of `M` labelling the critical branches. `v` and `−v` give the
/// same half turn, so continua are sampled over half a circle. Multi-dimensional
/// eigenspaces use `grid` samples per circle (and `sphere_points` spiral points
/// when every direction is an eigenvector).
pub fn eigen_branches(fam: &SynergisticFamily, grid: usize) -> Vec<Vec3> {
    let tag = fam.shape().tag();
    let [b0, b1, b2] = tag.basis;
    let circle = |a: Vec3, b: Vec3| -> Vec<Vec3> {
        (0..grid.max(1))
            .map(|i| {
                let (s, c) = (i as f64 * PI / grid.max(1) as f64).sin_cos();
                a * c + b * s
            })
            .collect::<Vec<_>>()
    };
    match tag.case {
        SpectrumCase::AllDistinct => vec![b0, b1, b2],
        SpectrumCase::AllEqual => {
            let mut out = vec![b0, b1, b2];
            out.extend(circle(b0, b1));
            out.extend(circle(b1, b2));
            out.extend(circle(b2, b0));
            out.extend(fibonacci_sphere(fam.config().sphere_points));
            out
        }
        SpectrumCase::TwoLargeEqualPosMin | SpectrumCase::TwoLargeEqualAnyMin | SpectrumCase::TwoSmallEqual => {
            let mut out = vec![b2];
            out.extend(circle(b0, b1));
            out
        }
    }
}

/// Admissible `s = sin(θ(Y)/2)` values on the branch `v` for member `q`.
fn branch_roots(fam: &SynergisticFamily, q: usize, v: &Vec3) -> Result<Vec<f64>, FamilyError> {
    let shape = fam.shape();
    let lam_g = shape.lambda_g_of(v)?;
    let delta = shape.delta_vu(v, &fam.directions().direction(q))?;
    let b = shape.lambda_max_g() / fam.k();
    let k = fam.k();
    let admissible = |s: f64| s > 0.0 && s <= k * (1.0 + 1e-12);
    if delta.abs() < LINEAR_DELTA {
        let s = lam_g / b;
        return Ok(if admissible(s) { vec![s.min(k)] } else { vec![] });
    }
    let disc = b * b + 4.0 * delta * lam_g;
    if disc < 0.0 {
        return Ok(vec![]);
    }
    let root = disc.sqrt();
    let mut out = Vec::with_capacity(2);
    let s1 = 2.0 * lam_g / (b + root);
    if admissible(s1) {
        out.push(s1.min(k));
    }
    let s2 = -(b + root) / (2.0 * delta);
    if admissible(s2) && (s2 - s1).abs() > 1e-12 {
        out.push(s2.min(k));
    }
    Ok(out)
}

/// Critical points of `V(·, q)` on the branch `v`.
pub fn solve_on_branch(fam: &SynergisticFamily, q: usize, v: &Vec3) -> Result<Vec<CriticalPointRecord>, FamilyError> {
    if q >= fam.len() {
        return Err(FamilyError::BadIndex(q));
    }
    let roots = branch_roots(fam, q, v)?;
    if roots.is_empty() {
        return Err(FamilyError::NoAdmissibleRoot { q, v: *v });
    }
    let u = fam.directions().direction(q);
    let half_turn = rotation_about(*v, PI);
    roots
        .into_iter()
        .map(|s| {
            let theta = 2.0 * s.asin();
            let y = half_turn.compose(&rotation_about(u, theta).transpose());
            record(fam, q, *v, y)
        })
        .collect()
}

fn record(fam: &SynergisticFamily, q: usize, v: Vec3, y: Rotation) -> Result<CriticalPointRecord, FamilyError> {
    let shape = fam.shape();
    let mut margin = f64::NEG_INFINITY;
    for &p in fam.directions().subset(q) {
        let upq = composed_rotation(fam, &y, p, q)?;
        margin = margin.max(shape.delta_vu(&v, &upq.axis())?);
    }
    Ok(CriticalPointRecord {
        q,
        v,
        psi_at_y: shape.psi_value(&y),
        theta_at_y: fam.warp_angle(&y),
        refined_gap: fam.refined_gap(&y, q),
        full_gap: fam.full_gap(&y, q),
        rho_norm: fam.rho(&y, q).norm(),
        necessary_margin: margin,
        y,
    })
}

/// All critical points of `V(·, q)` other than the identity, over the sampled branches.
pub fn solve_critical_points(
    fam: &SynergisticFamily,
    q: usize,
    grid: usize,
) -> Result<Vec<CriticalPointRecord>, FamilyError> {
    let mut out = Vec::new();
    for v in eigen_branches(fam, grid) {
        out.extend(solve_on_branch(fam, q, &v)?);
    }
    Ok(out)
}

/// `R_a(θ_pq, u_pq) = R_a(θ(Y), −u_q) R_a(θ(Y), u_p)` with `sin(θ_pq/2) > 0`.
pub fn composed_rotation(fam: &SynergisticFamily, y: &Rotation, p: usize, q: usize) -> Result<AxisAngle, FamilyError> {
    if p == q {
        return Err(FamilyError::SameMember);
    }
    if p >= fam.len() || q >= fam.len() {
        return Err(FamilyError::BadIndex(p.max(q)));
    }
    let up = fam.directions().direction(p);
    let uq = fam.directions().direction(q);
    Ok(composed_rotation_at_angle(fam.warp_angle(y), up, uq))
}

/// `R_a(θ, −u_q) R_a(θ, u_p)` as an axis-angle pair with `sin(θ_pq/2) ≥ 0`.
pub fn composed_rotation_at_angle(theta: f64, up: Vec3, uq: Vec3) -> AxisAngle {
    let (sh, ch) = (0.5 * theta).sin_cos();
    let scalar = ch * ch + sh * sh * up.dot(&uq);
    let vector = (up - uq) * (0.5 * theta.sin()) + up.cross(&uq) * (sh * sh);
    let n = vector.norm();
    let angle = 2.0 * n.atan2(scalar);
    let axis = vector.normalized().unwrap_or(Vec3::E1);
    AxisAngle::new(axis, angle.clamp(0.0, PI)).unwrap_or_else(|_| {
        // only reached for a degenerate axis; fall back to the canonical form
        AxisAngle::from_signed(axis, angle).expect("finite composed rotation")
    })
}
