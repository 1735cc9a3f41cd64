//! Numerical certification of the synergistic gap over the unwanted critical points.

use std::fmt::Write as _;

use serde::Serialize;

use super::critical::{eigen_branches, solve_on_branch, CriticalPointRecord};
use super::{BoundSource, FamilyError, SynergisticFamily};
use crate::exec::Execution;
use crate::so3::Vec3;
use crate::trace::SpectrumCase;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub case: SpectrumCase,
    pub item: u8,
    pub k: f64,
    pub delta_bar: Vec<f64>,
    pub bound_source: BoundSource,
    pub delta_hyst: Vec<f64>,
    pub min_refined_gap: f64,
    pub min_full_gap: f64,
    pub worst_q: usize,
    pub worst_v: Vec3,
    pub per_q_min_refined: Vec<f64>,
    pub per_q_min_full: Vec<f64>,
    pub branch_grid: usize,
    pub branch_samples: usize,
    pub critical_points: usize,
    pub max_rho_norm: f64,
    pub theta_range: (f64, f64),
    pub min_necessary_margin: f64,
    pub passed: bool,
}

impl CertificationReport {
    /// `key = value` lines, one per field.
    pub fn to_text(&self) -> String {
        let list = |xs: &[f64]| xs.iter().map(|x| format!("{x:.9}")).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "class = item-{} ({:?})", self.item, self.case);
        let _ = writeln!(s, "k = {}", self.k);
        let _ = writeln!(s, "delta_bar = [{}]", list(&self.delta_bar));
        let _ = writeln!(s, "delta_bar_source = {:?}", self.bound_source);
        let _ = writeln!(s, "delta_hysteresis = [{}]", list(&self.delta_hyst));
        let _ = writeln!(s, "min_refined_gap = {:.9}", self.min_refined_gap);
        let _ = writeln!(s, "min_full_gap = {:.9}", self.min_full_gap);
        let _ = writeln!(s, "per_q_min_refined_gap = [{}]", list(&self.per_q_min_refined));
        let _ = writeln!(s, "per_q_min_full_gap = [{}]", list(&self.per_q_min_full));
        let v = self.worst_v;
        let _ = writeln!(s, "worst = (q = {}, v = [{:.6}, {:.6}, {:.6}])", self.worst_q, v[0], v[1], v[2]);
        let _ = writeln!(s, "branch_grid = {}", self.branch_grid);
        let _ = writeln!(s, "branch_samples = {}", self.branch_samples);
        let _ = writeln!(s, "critical_points = {}", self.critical_points);
        let _ = writeln!(s, "max_rho_norm = {:.3e}", self.max_rho_norm);
        let _ = writeln!(s, "theta_range = [{:.6}, {:.6}]", self.theta_range.0, self.theta_range.1);
        let _ = writeln!(s, "min_necessary_margin = {:.9}", self.min_necessary_margin);
        let _ = writeln!(s, "passed = {}", self.passed);
        s
    }
}

fn all_records(fam: &SynergisticFamily, grid: usize, exec: Execution) -> Result<(usize, Vec<CriticalPointRecord>), FamilyError> {
    let branches = eigen_branches(fam, grid);
    let pairs: Vec<(usize, Vec3)> = (0..fam.len()).flat_map(|q| branches.iter().map(move |v| (q, *v))).collect();
    let chunks = exec.map(&pairs, |(q, v)| solve_on_branch(fam, *q, v));
    let mut out = Vec::with_capacity(pairs.len());
    for c in chunks {
        out.extend(c?);
    }
    Ok((branches.len(), out))
}

/// Smallest refined gap per member. Used to set `δ̄_q` when no closed form exists.
pub(crate) fn minimum_refined_gaps(fam: &SynergisticFamily, grid: usize, exec: Execution) -> Result<Vec<f64>, FamilyError> {
    let (_, recs) = all_records(fam, grid, exec)?;
    let mut mins = vec![f64::INFINITY; fam.len()];
    for r in &recs {
        mins[r.q] = mins[r.q].min(r.refined_gap);
    }
    Ok(mins)
}

/// Certify with the family's configured branch grid and the default execution.
pub fn certify(fam: &SynergisticFamily, grid: usize) -> Result<CertificationReport, FamilyError> {
    certify_with(fam, grid, Execution::default())
}

/// Solve every unwanted critical point and check `π_V(Y, q) > δ(q)`.
pub fn certify_with(fam: &SynergisticFamily, grid: usize, exec: Execution) -> Result<CertificationReport, FamilyError> {
    let (branch_samples, recs) = all_records(fam, grid, exec)?;
    let n = fam.len();
    let mut per_q_ref = vec![f64::INFINITY; n];
    let mut per_q_full = vec![f64::INFINITY; n];
    let mut worst: Option<&CriticalPointRecord> = None;
    let mut max_rho = 0.0_f64;
    let mut theta_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut margin = f64::INFINITY;
    for r in &recs {
        per_q_ref[r.q] = per_q_ref[r.q].min(r.refined_gap);
        per_q_full[r.q] = per_q_full[r.q].min(r.full_gap);
        if worst.is_none_or(|w| r.refined_gap < w.refined_gap) {
            worst = Some(r);
        }
        max_rho = max_rho.max(r.rho_norm);
        theta_range = (theta_range.0.min(r.theta_at_y), theta_range.1.max(r.theta_at_y));
        margin = margin.min(r.necessary_margin);
    }
    let passed = !recs.is_empty() && (0..n).all(|q| per_q_ref[q] > fam.hysteresis(q));
    let (worst_q, worst_v) = worst.map_or((0, Vec3::ZERO), |w| (w.q, w.v));
    Ok(CertificationReport {
        case: fam.case(),
        item: fam.case().item(),
        k: fam.k(),
        delta_bar: fam.delta_bar().to_vec(),
        bound_source: fam.bound_source(),
        delta_hyst: fam.hysteresis_levels().to_vec(),
        min_refined_gap: per_q_ref.iter().copied().fold(f64::INFINITY, f64::min),
        min_full_gap: per_q_full.iter().copied().fold(f64::INFINITY, f64::min),
        worst_q,
        worst_v,
        per_q_min_refined: per_q_ref,
        per_q_min_full: per_q_full,
        branch_grid: grid,
        branch_samples,
        critical_points: recs.len(),
        max_rho_norm: max_rho,
        theta_range,
        min_necessary_margin: margin,
        passed,
    })
}
