//! Modified trace functions `Ψ_M(X) = tr(M(I − X))` on SO(3).
//!
//! A [`TraceShape`] bundles the weight matrix `M`, the induced
//! `G = tr(M) I − M`, both spectra and the multiplicity class that decides how
//! warping directions are chosen later on.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::so3::{psi_map, sym_eigen, Mat3, Rotation, So3Error, Spectrum3, Vec3};
use crate::tolerance::{ALGEBRAIC, MULTIPLICITY, STRUCTURAL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("need at least two inertial vectors, got {0}")]
    TooFewVectors(usize),
    #[error("inertial vector {index} is not unit (|a| = {norm})")]
    NonUnitVector { index: usize, norm: f64 },
    #[error("weight {index} must be positive, got {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("inertial vectors are all collinear")]
    Collinear,
    #[error("M is not positive semi-definite (smallest eigenvalue {0})")]
    NotPositiveSemidefinite(f64),
    #[error("G = tr(M)I − M is not positive definite (smallest eigenvalue {0})")]
    GNotPositiveDefinite(f64),
    #[error("vector is not an eigenvector of M (residual {0:.3e})")]
    NotEigenvector(f64),
    #[error("case {requested:?} does not apply to a shape of class {actual:?}")]
    IncompatibleCase { requested: SpectrumCase, actual: SpectrumCase },
    #[error(transparent)]
    So3(#[from] So3Error),
}

/// Weighted unit vectors known in the inertial frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InertialVectorSet {
    vectors: Vec<Vec3>,
    weights: Vec<f64>,
}

impl InertialVectorSet {
    pub fn new(pairs: impl IntoIterator<Item = (Vec3, f64)>) -> Result<Self, TraceError> {
        let (vectors, weights): (Vec<Vec3>, Vec<f64>) = pairs.into_iter().unzip();
        if vectors.len() < 2 {
            return Err(TraceError::TooFewVectors(vectors.len()));
        }
        for (index, a) in vectors.iter().enumerate() {
            let norm = a.norm();
            if !a.is_finite() || (norm - 1.0).abs() > ALGEBRAIC {
                return Err(TraceError::NonUnitVector { index, norm });
            }
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight > 0.0 && weight.is_finite()) {
                return Err(TraceError::NonPositiveWeight { index, weight });
            }
        }
        let noncollinear = vectors
            .iter()
            .enumerate()
            .any(|(i, a)| vectors[i + 1..].iter().any(|b| a.cross(b).norm() > STRUCTURAL));
        if !noncollinear {
            return Err(TraceError::Collinear);
        }
        Ok(Self { vectors, weights })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec3, f64)> {
        self.vectors.iter().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `Σ wᵢ aᵢ aᵢᵀ`.
    pub fn weight_matrix(&self) -> Mat3 {
        self.iter().fold(Mat3::ZERO, |m, (a, w)| m + a.outer(a) * w)
    }

    /// Wahba cost `½ Σ wᵢ |bᵢ − R_dᵀ aᵢ|²` with body measurements `bᵢ = Rᵀ aᵢ`.
    pub fn wahba_cost(&self, r: &Rotation, rd: &Rotation) -> f64 {
        let rt = r.transpose();
        let rdt = rd.transpose();
        0.5 * self
            .iter()
            .map(|(a, w)| w * (rt.apply(a) - rdt.apply(a)).norm_squared())
            .sum::<f64>()
    }
}

/// The five eigenvalue configurations that select a warping-direction design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumCase {
    /// `λ₁ = λ₂ = λ₃ > 0`.
    AllEqual,
    /// `λ₁ = λ₂ > λ₃ > 0`, four directions.
    TwoLargeEqualPosMin,
    /// `λ₁ = λ₂ > λ₃ ≥ 0`, six directions at 60° spacing.
    TwoLargeEqualAnyMin,
    /// `0 < λ₁ = λ₂ < λ₃`.
    TwoSmallEqual,
    /// `0 ≤ λ₁ < λ₂ < λ₃`.
    AllDistinct,
}

impl SpectrumCase {
    /// Item number (1–5) in the usual enumeration of the cases.
    pub fn item(self) -> u8 {
        match self {
            SpectrumCase::AllEqual => 1,
            SpectrumCase::TwoLargeEqualPosMin => 2,
            SpectrumCase::TwoLargeEqualAnyMin => 3,
            SpectrumCase::TwoSmallEqual => 4,
            SpectrumCase::AllDistinct => 5,
        }
    }

    pub fn from_item(item: u8) -> Option<Self> {
        Some(match item {
            1 => SpectrumCase::AllEqual,
            2 => SpectrumCase::TwoLargeEqualPosMin,
            3 => SpectrumCase::TwoLargeEqualAnyMin,
            4 => SpectrumCase::TwoSmallEqual,
            5 => SpectrumCase::AllDistinct,
            _ => return None,
        })
    }
}

/// Multiplicity class with the eigenbasis relabelled to the per-case convention:
/// for the paired cases `basis[0], basis[1]` span the repeated eigenspace and
/// `basis[2]` is the simple eigenvector; otherwise the order is ascending in `λ^M`.
/// The basis is right-handed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MulticlassTag {
    pub case: SpectrumCase,
    pub basis: [Vec3; 3],
    pub lambda_m: [f64; 3],
    pub lambda_g: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceShape {
    m: Mat3,
    g: Mat3,
    spec_m: Spectrum3,
    spec_g: Spectrum3,
    xi: f64,
    tag: MulticlassTag,
    mult_tol: f64,
}

impl TraceShape {
    pub fn from_vectors(vs: &InertialVectorSet) -> Result<Self, TraceError> {
        Self::from_matrix(&vs.weight_matrix())
    }

    pub fn from_matrix(m: &Mat3) -> Result<Self, TraceError> {
        Self::from_matrix_with_tol(m, MULTIPLICITY)
    }

    pub fn from_matrix_with_tol(m: &Mat3, mult_tol: f64) -> Result<Self, TraceError> {
        let spec_m = sym_eigen(m)?;
        let m = m.sym_part();
        let scale = spec_m.values.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
        if spec_m.min() < -STRUCTURAL * scale.max(1.0) {
            return Err(TraceError::NotPositiveSemidefinite(spec_m.min()));
        }
        let tr = m.trace();
        let g = Mat3::scaled_identity(tr) - m;
        let [_, v2, v3] = spec_m.vectors;
        let spec_g = Spectrum3 {
            values: [tr - spec_m.values[2], tr - spec_m.values[1], tr - spec_m.values[0]],
            vectors: [v3, v2, v3.cross(&v2)],
        };
        if !(spec_g.min() > STRUCTURAL * scale) {
            return Err(TraceError::GNotPositiveDefinite(spec_g.min()));
        }
        let mut shape = TraceShape {
            m,
            g,
            spec_m,
            spec_g,
            xi: spec_g.min() / spec_g.max(),
            tag: MulticlassTag {
                case: SpectrumCase::AllDistinct,
                basis: spec_m.vectors,
                lambda_m: spec_m.values,
                lambda_g: [0.0; 3],
            },
            mult_tol,
        };
        shape.tag = classify(&shape, mult_tol);
        Ok(shape)
    }

    /// Same shape, with the direction design forced to `case`. Only a refinement that
    /// the eigenvalues admit is accepted (item 2 shapes may be treated as item 3).
    pub fn with_case(mut self, case: SpectrumCase) -> Result<Self, TraceError> {
        let actual = self.tag.case;
        let ok = case == actual
            || (actual == SpectrumCase::TwoLargeEqualPosMin && case == SpectrumCase::TwoLargeEqualAnyMin);
        if !ok {
            return Err(TraceError::IncompatibleCase { requested: case, actual });
        }
        self.tag.case = case;
        Ok(self)
    }

    pub fn m(&self) -> &Mat3 {
        &self.m
    }

    pub fn g(&self) -> &Mat3 {
        &self.g
    }

    pub fn spec_m(&self) -> &Spectrum3 {
        &self.spec_m
    }

    pub fn spec_g(&self) -> &Spectrum3 {
        &self.spec_g
    }

    /// `ξ = λ_min^G / λ_max^G`.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn lambda_max_g(&self) -> f64 {
        self.spec_g.max()
    }

    pub fn tag(&self) -> &MulticlassTag {
        &self.tag
    }

    pub fn case(&self) -> SpectrumCase {
        self.tag.case
    }

    pub fn mult_tol(&self) -> f64 {
        self.mult_tol
    }

    /// `Ψ_M(X) = tr(M(I − X))`.
    pub fn psi_value(&self, x: &Rotation) -> f64 {
        let xm = x.matrix();
        let mut tr_mx = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                tr_mx += self.m.0[i][k] * xm.0[k][i];
            }
        }
        self.m.trace() - tr_mx
    }

    /// `ψ(M X)`: half the body-frame gradient of `Ψ_M` along `Ẋ = X ω^`.
    pub fn psi_rho(&self, x: &Rotation) -> Vec3 {
        psi_map(&(self.m * *x.matrix()))
    }

    /// Eigenvalue of `G` belonging to the eigenvector `v` of `M`, after checking `v`.
    pub fn lambda_g_of(&self, v: &Vec3) -> Result<f64, TraceError> {
        let mv = self.m * *v;
        let lam = v.dot(&mv);
        let resid = (mv - *v * lam).norm();
        if resid > STRUCTURAL * self.spec_m.max().max(1.0) || (v.norm() - 1.0).abs() > STRUCTURAL {
            return Err(TraceError::NotEigenvector(resid));
        }
        Ok(self.m.trace() - lam)
    }

    /// `Δ(v, u)` in `Ψ_M(R_a(π, v) R_a(θ, u)) = 2λ^G − (1 − cos θ) Δ(v, u)`, evaluated
    /// with the formula matching the multiplicity structure of `M`.
    pub fn delta_vu(&self, v: &Vec3, u: &Vec3) -> Result<f64, TraceError> {
        let lam_g = self.lambda_g_of(v)?;
        let t = &self.tag;
        let [b1, b2, b3] = t.basis;
        let [g1, g2, g3] = t.lambda_g;
        Ok(match t.case {
            SpectrumCase::AllEqual => lam_g * v.dot(u).powi(2),
            SpectrumCase::TwoLargeEqualPosMin | SpectrumCase::TwoLargeEqualAnyMin | SpectrumCase::TwoSmallEqual => {
                let u3 = u.dot(&b3);
                if v.dot(&b3).powi(2) > 0.5 {
                    g3 - g2 * (1.0 - u3 * u3)
                } else {
                    let u_perp = *u - b3 * u3;
                    let n2 = u_perp.norm_squared();
                    if n2 <= f64::EPSILON * f64::EPSILON {
                        0.0
                    } else {
                        let sin2_phi = (1.0 - v.dot(&u_perp).powi(2) / n2).max(0.0);
                        (1.0 - u3 * u3) * (g2 - g3 * sin2_phi)
                    }
                }
            }
            SpectrumCase::AllDistinct => {
                let basis = [(b1, g1), (b2, g2), (b3, g3)];
                let i = (0..3)
                    .max_by(|&a, &b| v.dot(&basis[a].0).abs().total_cmp(&v.dot(&basis[b].0).abs()))
                    .unwrap_or(0);
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                basis[i].1 - u.dot(&basis[j].0).powi(2) * basis[k].1 - u.dot(&basis[k].0).powi(2) * basis[j].1
            }
        })
    }
}

/// Classify the spectrum of `M` into one of the five cases. Eigenvalues are equal when
/// they differ by less than `mult_tol` relative to `λ_max^M`.
pub fn classify(shape: &TraceShape, mult_tol: f64) -> MulticlassTag {
    let spec = shape.spec_m();
    let [a, b, c] = spec.values;
    let [w1, w2, w3] = spec.vectors;
    let scale = c.abs().max(f64::MIN_POSITIVE);
    let gap = |x: f64, y: f64| (x - y).abs() / scale;
    let eq = |x: f64, y: f64| gap(x, y) <= mult_tol;
    for (x, y) in [(a, b), (b, c)] {
        let g = gap(x, y);
        if g > mult_tol && g <= 10.0 * mult_tol {
            log::warn!(
                "eigenvalues {x} and {y} of M are within 10x of the multiplicity tolerance; \
                 the direction design changes discontinuously here"
            );
        }
    }
    let tr = shape.m().trace();
    let to_g = |l: [f64; 3]| l.map(|x| tr - x);

    let (case, basis, lambda_m) = if eq(a, b) && eq(b, c) {
        let l = (a + b + c) / 3.0;
        (SpectrumCase::AllEqual, [w1, w2, w3], [l; 3])
    } else if eq(b, c) {
        let l = 0.5 * (b + c);
        let case = if a <= mult_tol * scale {
            SpectrumCase::TwoLargeEqualAnyMin
        } else {
            SpectrumCase::TwoLargeEqualPosMin
        };
        (case, [w2, w3, w1], [l, l, a.max(0.0)])
    } else if eq(a, b) {
        let l = 0.5 * (a + b);
        (SpectrumCase::TwoSmallEqual, [w1, w2, w3], [l, l, c])
    } else {
        (SpectrumCase::AllDistinct, [w1, w2, w3], [a.max(0.0), b, c])
    };
    MulticlassTag {
        case,
        basis,
        lambda_m,
        lambda_g: to_g(lambda_m),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::so3::rotation_about;

    fn benchmark_shape() -> TraceShape {
        let vs = InertialVectorSet::new([(Vec3::E1, 0.2), (Vec3::E2, 0.4), (Vec3::E3, 0.4)]).unwrap();
        TraceShape::from_vectors(&vs).unwrap()
    }

    #[test]
    fn benchmark_shape_matrices() {
        let s = benchmark_shape();
        assert_eq!(*s.m(), Mat3::diag([0.2, 0.4, 0.4]));
        let g = *s.g() - Mat3::diag([0.8, 0.6, 0.6]);
        assert!(g.max_abs() < 1e-14);
        assert!((s.xi() - 0.75).abs() < 1e-14);
        assert_eq!(s.case(), SpectrumCase::TwoLargeEqualPosMin);
        assert_eq!(s.tag().basis, [Vec3::E2, Vec3::E3, Vec3::E1]);
    }

    #[test]
    fn two_orthogonal_vectors_give_rank_two() {
        let vs = InertialVectorSet::new([(Vec3::E1, 1.0), (Vec3::E2, 1.0)]).unwrap();
        let s = TraceShape::from_vectors(&vs).unwrap();
        assert_eq!(*s.m(), Mat3::diag([1.0, 1.0, 0.0]));
        assert!((*s.g() - Mat3::diag([1.0, 1.0, 2.0])).max_abs() < 1e-15);
        assert_eq!(s.case(), SpectrumCase::TwoLargeEqualAnyMin);
        assert_eq!(s.tag().lambda_m[2], 0.0);
    }

    #[test]
    fn collinear_vectors_rejected() {
        assert_eq!(
            InertialVectorSet::new([(Vec3::E1, 0.3), (Vec3::E1, 0.7)]),
            Err(TraceError::Collinear)
        );
        assert!(matches!(
            InertialVectorSet::new([(Vec3::E1, 0.3), (Vec3::E2, -0.7)]),
            Err(TraceError::NonPositiveWeight { index: 1, .. })
        ));
        assert!(matches!(InertialVectorSet::new([(Vec3::E1, 0.3)]), Err(TraceError::TooFewVectors(1))));
    }

    #[test]
    fn rank_one_rejected() {
        assert!(matches!(
            TraceShape::from_matrix(&Mat3::diag([1.0, 0.0, 0.0])),
            Err(TraceError::GNotPositiveDefinite(_))
        ));
        assert!(matches!(
            TraceShape::from_matrix(&Mat3::diag([1.0, 1.0, -0.5])),
            Err(TraceError::NotPositiveSemidefinite(_))
        ));
    }

    #[test]
    fn classification_of_each_case() {
        let c = |d: [f64; 3]| TraceShape::from_matrix(&Mat3::diag(d)).unwrap().case();
        assert_eq!(c([0.4; 3]), SpectrumCase::AllEqual);
        assert_eq!(c([0.2, 0.4, 0.4]), SpectrumCase::TwoLargeEqualPosMin);
        assert_eq!(c([1.0, 1.0, 0.0]), SpectrumCase::TwoLargeEqualAnyMin);
        assert_eq!(c([0.3, 0.3, 0.6]), SpectrumCase::TwoSmallEqual);
        assert_eq!(c([0.1, 0.3, 0.6]), SpectrumCase::AllDistinct);
        assert_eq!(c([0.0, 0.3, 0.6]), SpectrumCase::AllDistinct);
    }

    #[test]
    fn case_override_rules() {
        let s = benchmark_shape();
        assert_eq!(
            s.clone().with_case(SpectrumCase::TwoLargeEqualAnyMin).unwrap().case(),
            SpectrumCase::TwoLargeEqualAnyMin
        );
        assert!(s.with_case(SpectrumCase::AllEqual).is_err());
    }

    #[test]
    fn psi_at_identity_and_half_turn() {
        let s = benchmark_shape();
        assert_eq!(s.psi_value(&Rotation::IDENTITY), 0.0);
        assert_eq!(s.psi_rho(&Rotation::IDENTITY), Vec3::ZERO);
        let half = rotation_about(Vec3::E1, PI);
        assert!((s.psi_value(&half) - 1.6).abs() < 1e-14);
    }

    #[test]
    fn delta_examples() {
        let s = benchmark_shape();
        assert!((s.delta_vu(&Vec3::E1, &Vec3::E2).unwrap() - (0.8 - 0.6)).abs() < 1e-15);
        // v = e₁ is the simple eigenvector (G eigenvalue 0.8), u = e₂ lies in the pair plane
        let all = TraceShape::from_matrix(&Mat3::scaled_identity(0.4)).unwrap();
        assert_eq!(all.delta_vu(&Vec3::E1, &Vec3::E2).unwrap(), 0.0);
        assert!((all.delta_vu(&Vec3::E1, &Vec3::E1).unwrap() - 0.8).abs() < 1e-15);
        assert!(matches!(
            s.delta_vu(&Vec3::new(1.0, 1.0, 0.0).normalized().unwrap(), &Vec3::E1),
            Err(TraceError::NotEigenvector(_))
        ));
    }

    #[test]
    fn wahba_cost_equals_trace_form() {
        let vs = InertialVectorSet::new([
            (Vec3::E1, 0.5),
            (Vec3::new(0.0, 0.6, 0.8), 1.5),
            (Vec3::new(0.6, 0.0, -0.8), 0.7),
        ])
        .unwrap();
        let shape = TraceShape::from_vectors(&vs).unwrap();
        let r = rotation_about(Vec3::new(0.36, 0.48, 0.8), 2.1);
        let rd = rotation_about(Vec3::new(0.0, 0.6, -0.8), -0.4);
        let err = r.compose(&rd.transpose());
        assert!((vs.wahba_cost(&r, &rd) - shape.psi_value(&err)).abs() < 1e-13);
    }
}
