//! The warped family `V(X, q) = Ψ_M(X R_a(θ(X), u_q))` and everything needed to
//! certify and use it: warping angle, the map `Θ`, the feedback vector `ρ_V`,
//! refined and full synergistic gaps, closed-form gap bounds and a numerical
//! certification over the unwanted critical points.

mod bounds;
mod certify;
mod critical;
mod directions;

pub use bounds::{
    closed_form_gap, gain_upper_bound, gap_bound_all_equal, gap_bound_two_large, gap_bound_two_large_hexagonal,
    hexagonal_envelope, min_envelope_on_grid, min_f_check, xi_1, xi_21, xi_22,
};
pub use certify::{certify, certify_with, CertificationReport};
pub use critical::{
    composed_rotation, composed_rotation_at_angle, eigen_branches, fibonacci_sphere, solve_critical_points, solve_on_branch, CriticalPointRecord,
};
pub use directions::{select_directions, WarpingDirections};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::so3::{psi_map, rotation_about, Mat3, Rotation, Vec3};
use crate::trace::{SpectrumCase, TraceError, TraceShape};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("warping gain k = {k} outside (0, {bound})")]
    GainOutOfRange { k: f64, bound: f64 },
    #[error("invalid warping directions: {0}")]
    InvalidDirections(String),
    #[error("no direction satisfies both Δ inequalities (best score {0})")]
    DirectionSearchFailed(f64),
    #[error("hysteresis δ({q}) = {delta} must lie in (0, δ̄ = {bound})")]
    HysteresisOutOfRange { q: usize, delta: f64, bound: f64 },
    #[error("member index {0} out of range")]
    BadIndex(usize),
    #[error("composed rotation needs p ≠ q")]
    SameMember,
    #[error("no admissible critical-point root for member {q} on branch {v:?}")]
    NoAdmissibleRoot { q: usize, v: Vec3 },
    #[error("family is not synergistic: smallest refined gap {0}")]
    NotSynergistic(f64),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// How `δ̄_q` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// Exact closed form (items 1 and 2).
    ClosedForm,
    /// Closed-form lower bound (item 3).
    ClosedFormLowerBound,
    /// 0.99 × certified numerical minimum (items 4 and 5).
    Certified,
}

/// Construction parameters for a [`SynergisticFamily`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub k: f64,
    /// `δ(q) = delta_fraction · δ̄_q`.
    pub delta_fraction: f64,
    /// Samples of each eigenvector circle used when certifying.
    pub branch_grid: usize,
    /// Fibonacci-sphere points used when every unit vector is an eigenvector.
    pub sphere_points: usize,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        Self {
            k: 0.465,
            delta_fraction: 0.8,
            branch_grid: 720,
            sphere_points: 10_000,
        }
    }
}

impl FamilyConfig {
    pub fn with_k(k: f64) -> Self {
        Self { k, ..Self::default() }
    }
}

/// Safety factor applied to the certified minimum when no closed form exists.
pub const CERTIFIED_SAFETY: f64 = 0.99;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynergisticFamily {
    shape: TraceShape,
    dirs: WarpingDirections,
    k: f64,
    delta_bar: Vec<f64>,
    delta_hyst: Vec<f64>,
    bound_source: BoundSource,
    config: FamilyConfig,
}

impl SynergisticFamily {
    pub fn new(shape: TraceShape, config: FamilyConfig) -> Result<Self, FamilyError> {
        let bound = gain_upper_bound(shape.xi());
        if !(config.k > 0.0 && config.k < bound) {
            return Err(FamilyError::GainOutOfRange { k: config.k, bound });
        }
        let dirs = select_directions(&shape)?;
        let n = dirs.len();
        let mut fam = SynergisticFamily {
            shape,
            dirs,
            k: config.k,
            delta_bar: vec![0.0; n],
            delta_hyst: vec![0.0; n],
            bound_source: BoundSource::ClosedForm,
            config,
        };
        let (bar, source) = match closed_form_gap(fam.shape.tag(), fam.shape.xi(), fam.k) {
            Some(v) if fam.shape.case() == SpectrumCase::TwoLargeEqualAnyMin => (vec![v; n], BoundSource::ClosedFormLowerBound),
            Some(v) => (vec![v; n], BoundSource::ClosedForm),
            None => {
                let per_q = certify::minimum_refined_gaps(&fam, config.branch_grid, Execution::default())?;
                (per_q.iter().map(|m| CERTIFIED_SAFETY * m).collect(), BoundSource::Certified)
            }
        };
        if let Some(&m) = bar.iter().find(|b| !(**b > 0.0)) {
            return Err(FamilyError::NotSynergistic(m));
        }
        fam.delta_hyst = bar.iter().map(|b| config.delta_fraction * b).collect();
        fam.delta_bar = bar;
        fam.bound_source = source;
        for q in 0..n {
            fam.check_hysteresis(q, fam.delta_hyst[q])?;
        }
        Ok(fam)
    }

    /// Replace the hysteresis levels `δ(q)`; each must lie in `(0, δ̄_q)`.
    pub fn with_hysteresis(mut self, delta: Vec<f64>) -> Result<Self, FamilyError> {
        if delta.len() != self.len() {
            return Err(FamilyError::BadIndex(delta.len()));
        }
        for (q, d) in delta.iter().enumerate() {
            self.check_hysteresis(q, *d)?;
        }
        self.delta_hyst = delta;
        Ok(self)
    }

    fn check_hysteresis(&self, q: usize, delta: f64) -> Result<(), FamilyError> {
        let bound = self.delta_bar[q];
        if !(delta > 0.0 && delta < bound) {
            return Err(FamilyError::HysteresisOutOfRange { q, delta, bound });
        }
        Ok(())
    }

    pub fn shape(&self) -> &TraceShape {
        &self.shape
    }

    pub fn directions(&self) -> &WarpingDirections {
        &self.dirs
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn config(&self) -> &FamilyConfig {
        &self.config
    }

    pub fn case(&self) -> SpectrumCase {
        self.shape.case()
    }

    /// Number of members `|Q|`.
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// `δ̄_q`.
    pub fn gap_lower_bound(&self, q: usize) -> f64 {
        self.delta_bar[q]
    }

    pub fn delta_bar(&self) -> &[f64] {
        &self.delta_bar
    }

    /// Hysteresis level `δ(q)`.
    pub fn hysteresis(&self, q: usize) -> f64 {
        self.delta_hyst[q]
    }

    pub fn hysteresis_levels(&self) -> &[f64] {
        &self.delta_hyst
    }

    pub fn bound_source(&self) -> BoundSource {
        self.bound_source
    }

    /// `z = kΨ_M(X)/(2λ_max^G)`, the sine of half the warping angle.
    fn half_angle_sine(&self, psi: f64) -> f64 {
        self.k * psi / (2.0 * self.shape.lambda_max_g())
    }

    /// `θ(X) = 2 arcsin(kΨ_M(X)/(2λ_max^G))`.
    pub fn warp_angle(&self, x: &Rotation) -> f64 {
        2.0 * self.half_angle_sine(self.shape.psi_value(x)).asin()
    }

    /// `T(X, q) = X R_a(θ(X), u_q)`.
    pub fn warp(&self, x: &Rotation, q: usize) -> Rotation {
        x.compose(&rotation_about(self.dirs.direction(q), self.warp_angle(x)))
    }

    /// `ψ(Xᵀ∇θ(X)) = c(X) ψ(MX)` with `c = k / (λ_max^G √(1 − z²))`.
    fn theta_gradient(&self, x: &Rotation, psi: f64) -> Vec3 {
        let z = self.half_angle_sine(psi);
        let radicand = 1.0 - z * z;
        assert!(radicand > 1e-12, "warping angle derivative is singular (z = {z})");
        let c = self.k / (self.shape.lambda_max_g() * radicand.sqrt());
        self.shape.psi_rho(x) * c
    }

    /// `Θ(X, q) = R_a(θ(X), u_q)ᵀ + 2 u_q ψ(Xᵀ∇θ(X))ᵀ`, so that `Ṫ = T (Θ ω)^`.
    pub fn theta_matrix(&self, x: &Rotation, q: usize) -> Mat3 {
        let psi = self.shape.psi_value(x);
        let theta = 2.0 * self.half_angle_sine(psi).asin();
        let u = self.dirs.direction(q);
        let grad = self.theta_gradient(x, psi);
        rotation_about(u, theta).matrix().transpose() + u.outer(&grad) * 2.0
    }

    /// `V(X, q) = Ψ_M(T(X, q))`.
    pub fn value(&self, x: &Rotation, q: usize) -> f64 {
        self.shape.psi_value(&self.warp(x, q))
    }

    /// All members' values at `X`.
    pub fn values(&self, x: &Rotation) -> Vec<f64> {
        let theta = self.warp_angle(x);
        (0..self.len())
            .map(|q| self.shape.psi_value(&x.compose(&rotation_about(self.dirs.direction(q), theta))))
            .collect()
    }

    /// `ρ_V(X, q) = Θ(X, q)ᵀ ψ(M T(X, q))`; `V̇ = 2 ρ_Vᵀ ω` along `Ẋ = X ω^`.
    pub fn rho(&self, x: &Rotation, q: usize) -> Vec3 {
        let t = self.warp(x, q);
        self.theta_matrix(x, q).transpose() * psi_map(&(*self.shape.m() * *t.matrix()))
    }

    /// Refined gap `π_V(X, q) = V(X, q) − min_{p ∈ Q_q ∪ {q}} V(X, p)`.
    pub fn refined_gap(&self, x: &Rotation, q: usize) -> f64 {
        self.refined_check(x, q).gap
    }

    /// Full gap `μ_V(X, q) = V(X, q) − min_{p ∈ Q} V(X, p)`.
    pub fn full_gap(&self, x: &Rotation, q: usize) -> f64 {
        self.full_check(x, q).gap
    }

    /// Refined gap with the member attaining the minimum and the number of
    /// potentials evaluated (`|Q_q| + 1`).
    pub fn refined_check(&self, x: &Rotation, q: usize) -> GapCheck {
        let theta = self.warp_angle(x);
        let eval = |p: usize| self.shape.psi_value(&x.compose(&rotation_about(self.dirs.direction(p), theta)));
        let vq = eval(q);
        let mut members: Vec<usize> = self.dirs.subset(q).to_vec();
        members.push(q);
        members.sort_unstable();
        let (argmin, vmin) = members
            .iter()
            .map(|&p| (p, if p == q { vq } else { eval(p) }))
            .fold((q, f64::INFINITY), |best, (p, v)| if v < best.1 { (p, v) } else { best });
        GapCheck {
            value: vq,
            gap: vq - vmin,
            argmin,
            evaluations: members.len(),
        }
    }

    /// Full gap over every member; `|Q|` evaluations.
    pub fn full_check(&self, x: &Rotation, q: usize) -> GapCheck {
        let vals = self.values(x);
        let (argmin, vmin) = lowest_argmin(&vals);
        GapCheck {
            value: vals[q],
            gap: vals[q] - vmin,
            argmin,
            evaluations: vals.len(),
        }
    }
}

/// First index attaining the minimum.
pub fn lowest_argmin(vals: &[f64]) -> (usize, f64) {
    vals.iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (p, v)| if v < best.1 { (p, v) } else { best })
}

/// Outcome of one gap evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapCheck {
    /// `V(X, q)`.
    pub value: f64,
    pub gap: f64,
    /// Lowest-index minimiser over the members that were compared.
    pub argmin: usize,
    pub evaluations: usize,
}
