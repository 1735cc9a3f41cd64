use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::eigen::sym_eigen;
use super::{Mat3, So3Error, Vec3};
use crate::tolerance::{ALGEBRAIC, STRUCTURAL};

/// Skew-symmetric matrix with `hat(v) * w == v × w`.
pub fn hat(v: Vec3) -> Mat3 {
    let [x, y, z] = v.0;
    Mat3([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])
}

/// Inverse of [`hat`], rejecting inputs whose symmetric part exceeds the structural tolerance.
pub fn vee(a: &Mat3) -> Result<Vec3, So3Error> {
    vee_with_tol(a, STRUCTURAL)
}

pub fn vee_with_tol(a: &Mat3, tol: f64) -> Result<Vec3, So3Error> {
    let err = (*a + a.transpose()).frobenius_norm();
    if !err.is_finite() {
        return Err(So3Error::NonFinite);
    }
    if err > tol {
        return Err(So3Error::NotAntisymmetric(err));
    }
    Ok(vee_unchecked(a))
}

#[inline]
fn vee_unchecked(a: &Mat3) -> Vec3 {
    // Averaging the mirrored entries makes this the vee of the antisymmetric part.
    Vec3([
        0.5 * (a.0[2][1] - a.0[1][2]),
        0.5 * (a.0[0][2] - a.0[2][0]),
        0.5 * (a.0[1][0] - a.0[0][1]),
    ])
}

/// `ψ(A) = (P_a(A))^∨` where `P_a(A) = (A − Aᵀ)/2`.
#[inline]
pub fn psi_map(a: &Mat3) -> Vec3 {
    vee_unchecked(a)
}

/// A 3x3 orthonormal matrix with determinant +1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Mat3", into = "Mat3")]
pub struct Rotation(Mat3);

impl Rotation {
    pub const IDENTITY: Rotation = Rotation(Mat3::IDENTITY);

    pub fn try_new(m: Mat3) -> Result<Self, So3Error> {
        Self::try_new_with_tol(m, STRUCTURAL)
    }

    pub fn try_new_with_tol(m: Mat3, tol: f64) -> Result<Self, So3Error> {
        if !m.is_finite() {
            return Err(So3Error::NonFinite);
        }
        let orth = (m.transpose() * m - Mat3::IDENTITY).frobenius_norm();
        let det = m.det();
        if orth > tol || (det - 1.0).abs() > tol {
            return Err(So3Error::NotRotation { orth, det });
        }
        Ok(Rotation(m))
    }

    /// Wrap a matrix the caller has already established to be a rotation.
    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    #[inline]
    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn compose(&self, o: &Rotation) -> Rotation {
        Rotation(self.0 * o.0)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * *v
    }

    /// Geodesic distance to the identity, `arccos((tr R − 1)/2)`, evaluated stably.
    pub fn angle(&self) -> f64 {
        let s = psi_map(&self.0).norm();
        let c = 0.5 * (self.0.trace() - 1.0);
        s.atan2(c)
    }

    pub fn distance(&self, o: &Rotation) -> f64 {
        self.compose(&o.transpose()).angle()
    }

    /// Frobenius norm of `Rᵀ R − I` and `|det R − 1|`, the two structural residuals.
    pub fn residuals(&self) -> (f64, f64) {
        (
            (self.0.transpose() * self.0 - Mat3::IDENTITY).frobenius_norm(),
            (self.0.det() - 1.0).abs(),
        )
    }
}

impl From<Rotation> for Mat3 {
    fn from(r: Rotation) -> Mat3 {
        r.0
    }
}

impl TryFrom<Mat3> for Rotation {
    type Error = So3Error;
    fn try_from(m: Mat3) -> Result<Self, So3Error> {
        Rotation::try_new(m)
    }
}

/// Unit axis and angle in `[0, π]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    axis: Vec3,
    angle: f64,
}

impl AxisAngle {
    pub fn new(axis: Vec3, angle: f64) -> Result<Self, So3Error> {
        if !axis.is_finite() || !angle.is_finite() {
            return Err(So3Error::NonFinite);
        }
        let n = axis.norm();
        if (n - 1.0).abs() > ALGEBRAIC {
            return Err(So3Error::NonUnitAxis(n));
        }
        if !(0.0..=PI).contains(&angle) {
            return Err(So3Error::AngleOutOfRange(angle));
        }
        Ok(Self { axis, angle })
    }

    /// Build from an arbitrary signed angle and non-zero axis, normalising into the
    /// canonical representation.
    pub fn from_signed(axis: Vec3, angle: f64) -> Result<Self, So3Error> {
        let u = axis.normalized().ok_or(So3Error::NonUnitAxis(axis.norm()))?;
        log_axis_angle(&rotation_about(u, angle))
            .map(|aa| if aa.angle == 0.0 { AxisAngle { axis: Vec3::E1, angle: 0.0 } } else { aa })
    }

    pub fn axis(&self) -> Vec3 {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Rodrigues formula `I + sin θ u^ + (1 − cos θ)(u^)²`.
pub fn rodrigues(aa: &AxisAngle) -> Rotation {
    rotation_about(aa.axis, aa.angle)
}

/// Rodrigues formula for any real angle; `axis` is assumed unit.
pub fn rotation_about(axis: Vec3, angle: f64) -> Rotation {
    let k = hat(axis);
    let (s, c) = angle.sin_cos();
    Rotation(Mat3::IDENTITY + k * s + (k * k) * (1.0 - c))
}

/// Inverse of Rodrigues. The angle lies in `[0, π]`; the identity maps to axis `e₁`.
/// At a half turn the axis is read from the symmetric part and its sign fixed so that
/// the first non-negligible component is positive.
pub fn log_axis_angle(r: &Rotation) -> Result<AxisAngle, So3Error> {
    let m = r.matrix();
    let w = psi_map(m);
    let s = w.norm();
    let c = 0.5 * (m.trace() - 1.0);
    let angle = s.atan2(c);

    if angle == 0.0 || s < f64::EPSILON && c > 0.0 {
        return Ok(AxisAngle { axis: Vec3::E1, angle: 0.0 });
    }

    let axis = if c >= 0.0 {
        w * (1.0 / s)
    } else {
        // (R + Rᵀ)/2 − cos θ I = (1 − cos θ) u uᵀ
        let uu = m.sym_part() - Mat3::scaled_identity(c);
        let k = (0..3)
            .max_by(|&a, &b| uu.0[a][a].total_cmp(&uu.0[b][b]))
            .unwrap_or(0);
        let mut u = uu.col(k).normalized().ok_or(So3Error::NonFinite)?;
        if s > 1e-6 {
            if u.dot(&w) < 0.0 {
                u = -u;
            }
        } else {
            u = u.canonical_sign(1e-9);
        }
        u
    };
    // Renormalise so the result passes the unit-axis invariant exactly.
    let axis = axis.normalized().ok_or(So3Error::NonFinite)?;
    Ok(AxisAngle { axis, angle })
}

/// Nearest rotation in the Frobenius sense (orthogonal polar factor).
pub fn project_to_so3(a: &Mat3) -> Result<Rotation, So3Error> {
    if !a.is_finite() {
        return Err(So3Error::NonFinite);
    }
    let det = a.det();
    if det <= 0.0 {
        return Err(So3Error::NonPositiveDeterminant(det));
    }
    let ata = (a.transpose() * *a).sym_part();
    let spec = sym_eigen(&ata)?;
    // (AᵀA)^{-1/2} = Σ vᵢ vᵢᵀ / √λᵢ
    let mut inv_sqrt = Mat3::ZERO;
    for (lam, v) in spec.values.iter().zip(spec.vectors.iter()) {
        if *lam <= 0.0 {
            return Err(So3Error::NonPositiveDeterminant(det));
        }
        inv_sqrt = inv_sqrt + v.outer(v) * (1.0 / lam.sqrt());
    }
    Ok(Rotation(*a * inv_sqrt))
}
