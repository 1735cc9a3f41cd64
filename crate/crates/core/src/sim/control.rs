//! Torque laws and switching logic.
//!
//! The synergistic controllers work on the left errors `R̃ = R Rᵀ_d`,
//! `ω̃ = ω − ω_d`. The non-centrally synergistic baseline uses
//! `X = Rᵀ R_d` and `ω_e = ω − X ω_d`; along its flow `Ẋ = −ω_e^ X` and each
//! of its potentials satisfies `Ψ̇ = eᵀ ω_e`.

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::family::{lowest_argmin, SynergisticFamily};
use crate::so3::{Mat3, Rotation, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gains {
    pub k1: f64,
    pub k2: f64,
}

impl Gains {
    /// `k₁ = 60`, `k₂ = 6`.
    pub const SYNERGISTIC: Gains = Gains { k1: 60.0, k2: 6.0 };
    /// `k₁ = 30`, `k₂ = 3`.
    pub const NONCS: Gains = Gains { k1: 30.0, k2: 3.0 };
}

/// Parameters of the non-centrally synergistic baseline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonCsParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub b1: Vec3,
    pub b2: Vec3,
}

impl Default for NonCsParams {
    fn default() -> Self {
        Self { alpha: 1.5, beta: 0.4, delta: 0.025, b1: Vec3::E1, b2: Vec3::E2 }
    }
}

impl NonCsParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidScenario(m));
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return bad(format!("NonCS α = {} must lie in (1, 2)", self.alpha));
        }
        if !(self.beta.abs() < self.alpha - 1.0) {
            return bad(format!("NonCS |β| = {} must be below α − 1", self.beta.abs()));
        }
        let cap = (2.0 - self.alpha).min(self.alpha - self.beta.abs() - 1.0);
        if !(self.delta > 0.0 && self.delta < cap) {
            return bad(format!("NonCS δ = {} must lie in (0, {cap})", self.delta));
        }
        for b in [self.b1, self.b2] {
            if (b.norm() - 1.0).abs() > 1e-9 {
                return bad("NonCS body vectors must be unit".into());
            }
        }
        if self.b1.dot(&self.b2).abs() > 1e-9 {
            return bad("NonCS body vectors must be orthogonal".into());
        }
        Ok(())
    }
}

/// `(V(X, q), e_H(X, q))` of the baseline, `q ∈ {0, 1, 2}`:
/// `V(X, 0) = Ψ_N₁ + Ψ_N₂`, `V(X, 1) = Ψ_N₁ + Ψ_E₂`, `V(X, 2) = Ψ_N₂ + Ψ_E₁`.
pub fn noncs_errors(p: &NonCsParams, x: &Rotation, q: usize) -> (f64, Vec3) {
    let c = p.b1.cross(&p.b2);
    let xc = x.apply(&c);
    let b = [p.b1, p.b2];
    let nav = |i: usize| {
        let xb = x.apply(&b[i]);
        (1.0 - b[i].dot(&xb), xb.cross(&b[i]))
    };
    let aux = |i: usize| (p.alpha + p.beta * b[i].dot(&xc), b[i].cross(&xc) * p.beta);
    let ((v1, e1), (v2, e2)) = match q {
        0 => (nav(0), nav(1)),
        1 => (nav(0), aux(1)),
        _ => (nav(1), aux(0)),
    };
    (v1 + v2, e1 + e2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ControllerKind {
    /// Smooth law with the member frozen at the initial index.
    Solo,
    /// Hybrid switching on the refined gap.
    PiCs,
    /// Hybrid switching on the full gap.
    MuCs,
    /// Non-centrally synergistic baseline with switching.
    NonCs(NonCsParams),
    /// Baseline law with the member frozen at the initial index.
    NonCsFixed(NonCsParams),
}

impl ControllerKind {
    pub fn label(&self) -> &'static str {
        match self {
            ControllerKind::Solo => "solo",
            ControllerKind::PiCs => "pi-cs",
            ControllerKind::MuCs => "mu-cs",
            ControllerKind::NonCs(_) => "noncs",
            ControllerKind::NonCsFixed(_) => "noncs-fixed",
        }
    }

    pub fn default_gains(&self) -> Gains {
        match self {
            ControllerKind::NonCs(_) | ControllerKind::NonCsFixed(_) => Gains::NONCS,
            _ => Gains::SYNERGISTIC,
        }
    }

    fn noncs(&self) -> Option<&NonCsParams> {
        match self {
            ControllerKind::NonCs(p) | ControllerKind::NonCsFixed(p) => Some(p),
            _ => None,
        }
    }
}

/// Feedforward, proportional and derivative parts of the torque.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorqueParts {
    pub feedforward: Vec3,
    pub proportional: Vec3,
    pub derivative: Vec3,
}

impl TorqueParts {
    pub fn total(&self) -> Vec3 {
        self.feedforward + self.proportional + self.derivative
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchDecision {
    /// New member index when the jump set is reached.
    pub next: Option<usize>,
    /// Gap compared against the hysteresis level.
    pub gap: f64,
    /// Potentials evaluated for this check.
    pub evaluations: usize,
}

/// A controller bound to its potential family and gains.
#[derive(Clone, Debug, PartialEq)]
pub struct Controller {
    kind: ControllerKind,
    family: SynergisticFamily,
    gains: Gains,
}

impl Controller {
    pub fn new(kind: ControllerKind, family: SynergisticFamily, gains: Gains) -> Result<Self, SimError> {
        if !(gains.k1 > 0.0 && gains.k2 > 0.0) {
            return Err(SimError::InvalidScenario(format!("gains must be positive, got {gains:?}")));
        }
        if let Some(p) = kind.noncs() {
            p.validate()?;
        }
        Ok(Self { kind, family, gains })
    }

    pub fn kind(&self) -> &ControllerKind {
        &self.kind
    }

    pub fn family(&self) -> &SynergisticFamily {
        &self.family
    }

    pub fn gains(&self) -> Gains {
        self.gains
    }

    /// Number of member indices the controller can take.
    pub fn members(&self) -> usize {
        match self.kind.noncs() {
            Some(_) => 3,
            None => self.family.len(),
        }
    }

    /// Attitude error used by the potentials: `R Rᵀ_d`, or `Rᵀ R_d` for the baseline.
    pub fn attitude_error(&self, r: &Rotation, rd: &Rotation) -> Rotation {
        match self.kind.noncs() {
            Some(_) => r.transpose().compose(rd),
            None => r.compose(&rd.transpose()),
        }
    }

    /// Velocity error paired with [`Controller::attitude_error`].
    pub fn rate_error(&self, r: &Rotation, omega: Vec3, rd: &Rotation, omega_d: Vec3) -> Vec3 {
        match self.kind.noncs() {
            Some(_) => omega - self.attitude_error(r, rd).apply(&omega_d),
            None => omega - omega_d,
        }
    }

    /// Potential of member `q` at the attitude error of `(r, rd)`.
    pub fn potential(&self, r: &Rotation, rd: &Rotation, q: usize) -> f64 {
        let x = self.attitude_error(r, rd);
        match self.kind.noncs() {
            Some(p) => noncs_errors(p, &x, q).0,
            None => self.family.value(&x, q),
        }
    }

    /// `k₁ V + eᵀ J e` with `e` the velocity error.
    pub fn energy(&self, inertia: &Mat3, r: &Rotation, omega: Vec3, rd: &Rotation, omega_d: Vec3, q: usize) -> f64 {
        let e = self.rate_error(r, omega, rd, omega_d);
        self.gains.k1 * self.potential(r, rd, q) + e.dot(&(*inertia * e))
    }

    /// Torque from measured `(r, omega)` and the noise-free reference.
    #[allow(clippy::too_many_arguments)]
    pub fn torque(
        &self,
        inertia: &Mat3,
        q: usize,
        r: &Rotation,
        omega: Vec3,
        rd: &Rotation,
        omega_d: Vec3,
        omega_d_dot: Vec3,
    ) -> TorqueParts {
        let Gains { k1, k2 } = self.gains;
        match self.kind.noncs() {
            Some(p) => {
                let x = self.attitude_error(r, rd);
                let wd_body = x.apply(&omega_d);
                let (_, e_h) = noncs_errors(p, &x, q);
                TorqueParts {
                    feedforward: wd_body.cross(&(*inertia * wd_body)) + *inertia * x.apply(&omega_d_dot),
                    proportional: e_h * -k1,
                    derivative: (omega - wd_body) * -k2,
                }
            }
            None => {
                let r_tilde = self.attitude_error(r, rd);
                let w_tilde = omega - omega_d;
                TorqueParts {
                    feedforward: omega_d.cross(&(*inertia * omega)) + *inertia * omega_d_dot,
                    proportional: rd.matrix().transpose() * self.family.rho(&r_tilde, q) * -k1,
                    derivative: w_tilde * -k2,
                }
            }
        }
    }

    /// Evaluate the jump condition (strictly above the hysteresis level). When a
    /// jump occurs the new index is the lowest-index minimiser over all members;
    /// potentials not already evaluated for the check are added to the count.
    pub fn check(&self, r: &Rotation, rd: &Rotation, q: usize) -> SwitchDecision {
        let x = self.attitude_error(r, rd);
        let fam = &self.family;
        match &self.kind {
            ControllerKind::Solo | ControllerKind::NonCsFixed(_) => {
                SwitchDecision { next: None, gap: 0.0, evaluations: 0 }
            }
            ControllerKind::PiCs => {
                let c = fam.refined_check(&x, q);
                if c.gap > fam.hysteresis(q) {
                    let full = fam.full_check(&x, q);
                    SwitchDecision {
                        next: (full.argmin != q).then_some(full.argmin),
                        gap: c.gap,
                        evaluations: c.evaluations.max(full.evaluations),
                    }
                } else {
                    SwitchDecision { next: None, gap: c.gap, evaluations: c.evaluations }
                }
            }
            ControllerKind::MuCs => {
                let c = fam.full_check(&x, q);
                let jump = c.gap > fam.hysteresis(q) && c.argmin != q;
                SwitchDecision { next: jump.then_some(c.argmin), gap: c.gap, evaluations: c.evaluations }
            }
            ControllerKind::NonCs(p) => {
                let vals: Vec<f64> = (0..3).map(|i| noncs_errors(p, &x, i).0).collect();
                let (argmin, vmin) = lowest_argmin(&vals);
                let gap = vals[q] - vmin;
                let jump = gap > p.delta && argmin != q;
                SwitchDecision { next: jump.then_some(argmin), gap, evaluations: 3 }
            }
        }
    }
}
