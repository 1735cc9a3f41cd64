use std::fmt::Write as _;

use serde::Serialize;

/// Attitude error below which a run counts as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.01;
/// How long the error must stay below the threshold, in seconds.
pub const CONVERGENCE_SUSTAIN: f64 = 1.0;

pub const ROW_HEADER: &str = "t,j,q,theta_err,omega_err_norm,torque_norm,V,U,eval_count_cum";
pub const JUMP_HEADER: &str = "t,j,q_minus,q_plus,gap_at_jump";

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogRow {
    pub t: f64,
    pub j: u64,
    pub q: usize,
    /// Geodesic angle of the true attitude error.
    pub theta_err: f64,
    pub omega_err_norm: f64,
    pub torque_norm: f64,
    /// Potential of the active member at the true attitude error.
    pub potential: f64,
    /// `k₁ V + eᵀ J e`.
    pub energy: f64,
    /// Potentials evaluated by the switching logic so far.
    pub eval_count: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpEvent {
    pub t: f64,
    /// Jump counter after the jump.
    pub j: u64,
    pub q_minus: usize,
    pub q_plus: usize,
    pub gap: f64,
    pub energy_before: f64,
    pub energy_after: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SimLog {
    pub name: String,
    pub rows: Vec<LogRow>,
    pub jumps: Vec<JumpEvent>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub convergence_time: Option<f64>,
    pub jumps: usize,
    pub total_evaluations: u64,
    pub final_theta: f64,
    pub max_theta: f64,
    pub final_time: f64,
}

impl SimLog {
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(ROW_HEADER);
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.t, r.j, r.q, r.theta_err, r.omega_err_norm, r.torque_norm, r.potential, r.energy, r.eval_count
            );
        }
        s
    }

    pub fn jumps_to_csv(&self) -> String {
        let mut s = String::from(JUMP_HEADER);
        s.push('\n');
        for e in &self.jumps {
            let _ = writeln!(s, "{},{},{},{},{}", e.t, e.j, e.q_minus, e.q_plus, e.gap);
        }
        s
    }

    /// First logged time after which `ϑ` stays below the threshold for the sustain
    /// window; `None` if that never happens within the log.
    pub fn convergence_time(&self, threshold: f64, sustain: f64) -> Option<f64> {
        let mut start: Option<f64> = None;
        for r in &self.rows {
            if r.theta_err < threshold {
                let s = *start.get_or_insert(r.t);
                if r.t - s >= sustain - 1e-12 {
                    return Some(s);
                }
            } else {
                start = None;
            }
        }
        None
    }

    pub fn summary(&self) -> RunSummary {
        let last = self.rows.last();
        RunSummary {
            name: self.name.clone(),
            convergence_time: self.convergence_time(CONVERGENCE_THRESHOLD, CONVERGENCE_SUSTAIN),
            jumps: self.jumps.len(),
            total_evaluations: last.map_or(0, |r| r.eval_count),
            final_theta: last.map_or(0.0, |r| r.theta_err),
            max_theta: self.rows.iter().map(|r| r.theta_err).fold(0.0, f64::max),
            final_time: last.map_or(0.0, |r| r.t),
        }
    }
}
