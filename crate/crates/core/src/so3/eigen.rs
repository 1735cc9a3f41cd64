use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Mat3, So3Error, Vec3};
use crate::tolerance::STRUCTURAL;

/// Eigen-decomposition of a symmetric 3x3 matrix.
///
/// `values` are ascending; `vectors[i]` belongs to `values[i]` and the frame is
/// right-handed (`vectors[2] == vectors[0] × vectors[1]`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum3 {
    pub values: [f64; 3],
    pub vectors: [Vec3; 3],
}

impl Spectrum3 {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[2]
    }

    /// `Σ λᵢ vᵢ vᵢᵀ`.
    pub fn reconstruct(&self) -> Mat3 {
        self.values
            .iter()
            .zip(self.vectors.iter())
            .fold(Mat3::ZERO, |acc, (l, v)| acc + v.outer(v) * *l)
    }
}

pub fn sym_eigen(a: &Mat3) -> Result<Spectrum3, So3Error> {
    sym_eigen_with_tol(a, STRUCTURAL)
}

/// Closed-form eigen-solver: trigonometric roots of the characteristic polynomial,
/// one Newton polish per root, the most isolated eigenvector from cross products of
/// the shifted rows and the remaining pair from a 2x2 problem on its orthogonal
/// complement.
pub fn sym_eigen_with_tol(a: &Mat3, tol: f64) -> Result<Spectrum3, So3Error> {
    if !a.is_finite() {
        return Err(So3Error::NonFinite);
    }
    let asym = (*a - a.transpose()).frobenius_norm();
    if asym > tol {
        return Err(So3Error::NotSymmetric(asym));
    }
    let a = a.sym_part();
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(Spectrum3 {
            values: [0.0; 3],
            vectors: [Vec3::E1, Vec3::E2, Vec3::E3],
        });
    }
    let b = a * (1.0 / scale);

    let q = b.trace() / 3.0;
    let shifted = b - Mat3::scaled_identity(q);
    let p = (shifted.0.iter().flatten().map(|e| e * e).sum::<f64>() / 6.0).sqrt();
    if p < 1e-14 {
        let l = q * scale;
        return Ok(Spectrum3 {
            values: [l; 3],
            vectors: [Vec3::E1, Vec3::E2, Vec3::E3],
        });
    }
    let r = (0.5 * (shifted * (1.0 / p)).det()).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let mut mu3 = q + 2.0 * p * phi.cos();
    let mut mu1 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    mu1 = newton_polish(&b, mu1);
    mu3 = newton_polish(&b, mu3);
    let mu2 = 3.0 * q - mu1 - mu3;

    let isolate_top = mu3 - mu2 > mu2 - mu1;
    let first_mu = if isolate_top { mu3 } else { mu1 };
    let first = isolated_vector(&b, first_mu);

    let (u, w) = complement_basis(&first);
    let bu = b * u;
    let bw = b * w;
    let (p11, p12, p22) = (u.dot(&bu), u.dot(&bw), w.dot(&bw));
    // Eigenvector of the smaller 2x2 eigenvalue; a tied pair resolves to `u`.
    let theta = 0.5 * (-2.0 * p12).atan2(p22 - p11);
    let (s, c) = theta.sin_cos();
    let smaller = u * c + w * s;

    let (v1, v2) = if isolate_top {
        let v1 = smaller.canonical_sign(1e-9);
        (v1, first.cross(&v1).canonical_sign(1e-9))
    } else {
        (first.canonical_sign(1e-9), smaller.canonical_sign(1e-9))
    };
    let v3 = v1.cross(&v2);

    let rq = |v: &Vec3| v.dot(&(a * *v));
    let (l1, l2, l3) = (rq(&v1), rq(&v2), rq(&v3));
    // Rayleigh quotients of a nearly repeated pair can swap order by an ulp.
    let values = [l1.min(l2), l1.max(l2).min(l3), l3.max(l2)];
    Ok(Spectrum3 {
        values,
        vectors: [v1, v2, v3],
    })
}

fn char_poly(b: &Mat3, l: f64) -> (f64, f64) {
    let s = *b - Mat3::scaled_identity(l);
    let m = &s.0;
    let minors = (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
        + (m[0][0] * m[1][1] - m[0][1] * m[1][0]);
    (s.det(), -minors)
}

fn newton_polish(b: &Mat3, l: f64) -> f64 {
    let (f, df) = char_poly(b, l);
    if df.abs() < 1e-8 {
        return l;
    }
    let cand = l - f / df;
    if char_poly(b, cand).0.abs() < f.abs() {
        cand
    } else {
        l
    }
}

fn isolated_vector(b: &Mat3, mu: f64) -> Vec3 {
    let s = *b - Mat3::scaled_identity(mu);
    let (r0, r1, r2) = (s.row(0), s.row(1), s.row(2));
    [r0.cross(&r1), r0.cross(&r2), r1.cross(&r2)]
        .into_iter()
        .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
        .and_then(|v| v.normalized())
        .unwrap_or(Vec3::E1)
}

/// Orthonormal `(u, w)` with `(v, u, w)` right-handed; `u` starts from the coordinate
/// axis least aligned with `v` so that diagonal inputs keep coordinate axes.
pub(crate) fn complement_basis(v: &Vec3) -> (Vec3, Vec3) {
    let k = (0..3)
        .min_by(|&i, &j| v.0[i].abs().total_cmp(&v.0[j].abs()))
        .unwrap_or(0);
    let e = Vec3::basis(k);
    let u = (e - *v * v.dot(&e)).normalized().unwrap_or(Vec3::E2);
    (u, v.cross(&u))
}
