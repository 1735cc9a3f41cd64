//! Fixed-step hybrid integrator.
//!
//! Each step integrates `(R, ω, R_d)` with classical RK4, holding the member index
//! and the current noise sample, re-projects both attitudes onto SO(3), draws the
//! next noise sample and then evaluates the switching condition once. At most one
//! jump happens per step and a jump changes only the member index.

use serde::Serialize;

use super::control::{Controller, ControllerKind, Gains};
use super::log::{JumpEvent, LogRow, SimLog};
use super::noise::{MeasurementNoise, NoiseConfig, NoiseSample};
use super::plant::{plant_derivative, PlantParams};
use super::reference::ReferenceConfig;
use super::SimError;
use crate::exec::Execution;
use crate::family::{solve_on_branch, FamilyError, SynergisticFamily};
use crate::so3::{hat, project_to_so3, Mat3, Rotation, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InitialCondition {
    pub attitude: Rotation,
    pub omega: Vec3,
    pub q: usize,
}

impl Default for InitialCondition {
    fn default() -> Self {
        Self { attitude: Rotation::IDENTITY, omega: Vec3::ZERO, q: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub kind: ControllerKind,
    pub gains: Gains,
    pub family: SynergisticFamily,
    pub plant: PlantParams,
    pub reference: ReferenceConfig,
    pub noise: NoiseConfig,
    pub initial: InitialCondition,
    pub horizon: f64,
    pub step: f64,
    /// Keep every n-th row (jumps are always kept).
    pub log_every: usize,
}

impl Scenario {
    /// Benchmark plant and reference, no noise, 1 ms step, 20 s horizon.
    pub fn new(name: impl Into<String>, kind: ControllerKind, family: SynergisticFamily) -> Self {
        Self {
            name: name.into(),
            gains: kind.default_gains(),
            kind,
            family,
            plant: PlantParams::default(),
            reference: ReferenceConfig::default(),
            noise: NoiseConfig::none(),
            initial: InitialCondition::default(),
            horizon: 20.0,
            step: 1e-3,
            log_every: 1,
        }
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn with_noise(mut self, noise: NoiseConfig) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HybridState {
    pub t: f64,
    pub j: u64,
    pub q: usize,
    pub r: Rotation,
    pub omega: Vec3,
    pub r_d: Rotation,
    pub omega_d: Vec3,
    pub eval_count: u64,
}

/// `U = k₁ V + eᵀ J e` at the true state.
pub fn lyapunov(ctrl: &Controller, plant: &PlantParams, s: &HybridState) -> f64 {
    ctrl.energy(plant.inertia(), &s.r, s.omega, &s.r_d, s.omega_d, s.q)
}

/// An exact unwanted critical point of member `q` on the branch `v`.
pub fn critical_attitude(fam: &SynergisticFamily, q: usize, v: &Vec3) -> Result<Rotation, FamilyError> {
    Ok(solve_on_branch(fam, q, v)?[0].y)
}

struct Integrator<'a> {
    scn: &'a Scenario,
    ctrl: Controller,
}

impl Integrator<'_> {
    fn measured(&self, r: &Rotation, omega: Vec3, n: &NoiseSample) -> (Rotation, Vec3) {
        (r.compose(&n.attitude), omega + n.gyro)
    }

    fn torque(&self, s: &HybridState, n: &NoiseSample, omega_d_dot: Vec3) -> Vec3 {
        let (rm, wm) = self.measured(&s.r, s.omega, n);
        self.ctrl
            .torque(self.scn.plant.inertia(), s.q, &rm, wm, &s.r_d, s.omega_d, omega_d_dot)
            .total()
    }

    fn derivative(&self, t: f64, r: &Mat3, omega: Vec3, rd: &Mat3, q: usize, n: &NoiseSample) -> (Mat3, Vec3, Mat3) {
        let profile = &self.scn.reference.profile;
        let (wd, wdd) = (profile.omega(t), profile.omega_dot(t));
        let stage = HybridState {
            t,
            j: 0,
            q,
            r: Rotation::from_matrix_unchecked(*r),
            omega,
            r_d: Rotation::from_matrix_unchecked(*rd),
            omega_d: wd,
            eval_count: 0,
        };
        let tau = self.torque(&stage, n, wdd);
        let (r_dot, w_dot) = plant_derivative(&self.scn.plant, r, omega, tau);
        (r_dot, w_dot, *rd * hat(wd))
    }

    fn rk4(&self, s: &HybridState, h: f64, n: &NoiseSample) -> (Mat3, Vec3, Mat3) {
        let (r0, w0, d0) = (*s.r.matrix(), s.omega, *s.r_d.matrix());
        let f = |t: f64, r: &Mat3, w: Vec3, d: &Mat3| self.derivative(t, r, w, d, s.q, n);
        let k1 = f(s.t, &r0, w0, &d0);
        let k2 = f(s.t + 0.5 * h, &(r0 + k1.0 * (0.5 * h)), w0 + k1.1 * (0.5 * h), &(d0 + k1.2 * (0.5 * h)));
        let k3 = f(s.t + 0.5 * h, &(r0 + k2.0 * (0.5 * h)), w0 + k2.1 * (0.5 * h), &(d0 + k2.2 * (0.5 * h)));
        let k4 = f(s.t + h, &(r0 + k3.0 * h), w0 + k3.1 * h, &(d0 + k3.2 * h));
        let w = h / 6.0;
        (
            r0 + (k1.0 + k2.0 * 2.0 + k3.0 * 2.0 + k4.0) * w,
            w0 + (k1.1 + k2.1 * 2.0 + k3.1 * 2.0 + k4.1) * w,
            d0 + (k1.2 + k2.2 * 2.0 + k3.2 * 2.0 + k4.2) * w,
        )
    }

    /// Switching check, jump bookkeeping and the log row for the current state.
    fn settle(&self, s: &mut HybridState, n: &NoiseSample, log: &mut SimLog, keep_row: bool) -> Result<(), SimError> {
        let (_, wdd) = self.scn.reference.sample(s.t)?;
        let (rm, _) = self.measured(&s.r, s.omega, n);
        let d = self.ctrl.check(&rm, &s.r_d, s.q);
        s.eval_count += d.evaluations as u64;
        if let Some(next) = d.next {
            let before = lyapunov(&self.ctrl, &self.scn.plant, s);
            let q_minus = s.q;
            s.q = next;
            s.j += 1;
            log.jumps.push(JumpEvent {
                t: s.t,
                j: s.j,
                q_minus,
                q_plus: next,
                gap: d.gap,
                energy_before: before,
                energy_after: lyapunov(&self.ctrl, &self.scn.plant, s),
            });
        }
        if keep_row {
            let e = self.ctrl.rate_error(&s.r, s.omega, &s.r_d, s.omega_d);
            log.rows.push(LogRow {
                t: s.t,
                j: s.j,
                q: s.q,
                theta_err: s.r.compose(&s.r_d.transpose()).angle(),
                omega_err_norm: e.norm(),
                torque_norm: self.torque(s, n, wdd).norm(),
                potential: self.ctrl.potential(&s.r, &s.r_d, s.q),
                energy: lyapunov(&self.ctrl, &self.scn.plant, s),
                eval_count: s.eval_count,
            });
        }
        Ok(())
    }
}

fn validate(scn: &Scenario, ctrl: &Controller) -> Result<(), SimError> {
    let bad = |m: String| Err(SimError::InvalidScenario(m));
    if !(scn.step > 0.0 && scn.step.is_finite()) {
        return bad(format!("step must be positive, got {}", scn.step));
    }
    if !(scn.horizon >= 0.0 && scn.horizon.is_finite()) {
        return bad(format!("horizon must be non-negative, got {}", scn.horizon));
    }
    if scn.log_every == 0 {
        return bad("log_every must be at least 1".into());
    }
    if scn.initial.q >= ctrl.members() {
        return bad(format!("initial member {} out of range 0..{}", scn.initial.q, ctrl.members()));
    }
    if !(scn.noise.attitude_max_angle >= 0.0 && scn.noise.gyro_sigma >= 0.0) {
        return bad("noise levels must be non-negative".into());
    }
    Ok(())
}

/// Simulate one scenario. A zero horizon yields an empty log.
pub fn run(scn: &Scenario) -> Result<SimLog, SimError> {
    let ctrl = Controller::new(scn.kind, scn.family.clone(), scn.gains)?;
    validate(scn, &ctrl)?;
    let mut log = SimLog { name: scn.name.clone(), ..SimLog::default() };
    if scn.horizon == 0.0 {
        return Ok(log);
    }
    let integ = Integrator { scn, ctrl };
    let h = scn.step;
    let steps = (scn.horizon / h).round().max(1.0) as u64;
    let mut noise = MeasurementNoise::new(scn.noise);
    let mut state = HybridState {
        t: 0.0,
        j: 0,
        q: scn.initial.q,
        r: scn.initial.attitude,
        omega: scn.initial.omega,
        r_d: scn.reference.initial,
        omega_d: scn.reference.sample(0.0)?.0,
        eval_count: 0,
    };
    let mut sample = noise.sample();
    integ.settle(&mut state, &sample, &mut log, true)?;
    for i in 1..=steps {
        let (r, w, rd) = integ.rk4(&state, h, &sample);
        let t = i as f64 * h;
        if !(r.is_finite() && w.is_finite() && rd.is_finite()) {
            return Err(SimError::NonFinite { t });
        }
        let nonfinite = |_| SimError::NonFinite { t };
        state.r = project_to_so3(&r).map_err(nonfinite)?;
        state.r_d = project_to_so3(&rd).map_err(nonfinite)?;
        state.omega = w;
        state.t = t;
        state.omega_d = scn.reference.sample(t)?.0;
        sample = noise.sample();
        let keep = i % scn.log_every as u64 == 0 || i == steps;
        integ.settle(&mut state, &sample, &mut log, keep)?;
    }
    Ok(log)
}

/// Run independent scenarios, results in input order.
pub fn run_many(scenarios: &[Scenario], exec: Execution) -> Vec<Result<SimLog, SimError>> {
    exec.map(scenarios, run)
}
