//! The four CLI verbs. Each returns its in-memory result as well as writing files,
//! so callers (and tests) can inspect what was produced.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use so3_synergy::exec::Execution;
use so3_synergy::family::{certify_with, gain_upper_bound};
use so3_synergy::sim::{run_many, SimLog, CONVERGENCE_SUSTAIN, CONVERGENCE_THRESHOLD};
use so3_synergy::so3::rotation_about;
use so3_synergy::{CertificationReport, Mat3, SynergisticFamily, TraceShape};

use crate::config::{ProfileSection, RunConfig};
use crate::error::CliError;

pub const CERTIFICATION_FILE: &str = "certification.txt";
pub const POTENTIALS_FILE: &str = "potentials.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_HEADER: &str = "k,xi,item,gain_bound,delta_bar,certified_min_refined";

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(CliError::io(&path))?;
    info!("wrote {}", path.display());
    Ok(path)
}

/// Certify the configured family and write the report. A family that fails the
/// gap check is reported as [`CliError::CertificationFailed`] after the report is written.
pub fn cmd_certify(cfg: &RunConfig, out: &Path) -> Result<CertificationReport, CliError> {
    let fam = cfg.build_family()?;
    info!("certifying item {} family with {} members, k = {}", fam.case().item(), fam.len(), fam.k());
    let report = certify_with(&fam, cfg.family.branch_grid, Execution::default())?;
    write(out, CERTIFICATION_FILE, &report.to_text())?;
    if let Some(profile) = &cfg.profile {
        write(out, POTENTIALS_FILE, &potential_profile(&fam, profile)?)?;
    }
    if !report.passed {
        return Err(CliError::CertificationFailed { min_gap: report.min_refined_gap });
    }
    Ok(report)
}

/// `Ψ_M` and every `V(·, q)` along `R_a(θ, axis)`, `s` running over all segments.
fn potential_profile(fam: &SynergisticFamily, profile: &ProfileSection) -> Result<String, CliError> {
    use std::f64::consts::TAU;
    if profile.samples_per_turn == 0 {
        return Err(CliError::Config("profile.samples_per_turn must be positive".into()));
    }
    let mut s = String::from("s,segment,theta,psi");
    for q in 0..fam.len() {
        let _ = write!(s, ",v{q}");
    }
    s.push('\n');
    let n = profile.samples_per_turn;
    for (seg, axis) in profile.axes.iter().enumerate() {
        let axis = axis
            .normalized()
            .ok_or_else(|| CliError::Config(format!("profile.axes[{seg}] is zero")))?;
        for i in 0..=n {
            let theta = TAU * i as f64 / n as f64;
            let x = rotation_about(axis, theta);
            let _ = write!(s, "{},{seg},{theta},{}", seg as f64 * TAU + theta, fam.shape().psi_value(&x));
            for v in fam.values(&x) {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
    }
    Ok(s)
}

/// Run every configured scenario and write `<name>.csv`, `<name>_jumps.csv` and the summary.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Vec<SimLog>, CliError> {
    let fam = cfg.build_family()?;
    let scenarios = cfg.scenarios(&fam)?;
    info!("running {} scenario(s)", scenarios.len());
    let results = run_many(&scenarios, Execution::default());
    let mut logs = Vec::with_capacity(results.len());
    for (scn, res) in scenarios.iter().zip(results) {
        let log = res.map_err(|e| CliError::from_sim(&scn.name, e))?;
        write(out, &format!("{}.csv", log.name), &log.to_csv())?;
        write(out, &format!("{}_jumps.csv", log.name), &log.jumps_to_csv())?;
        logs.push(log);
    }
    write(out, SUMMARY_FILE, &summary_table(&logs))?;
    Ok(logs)
}

pub fn summary_table(logs: &[SimLog]) -> String {
    let mut s = format!(
        "# convergence_time: first t after which theta_err < {CONVERGENCE_THRESHOLD} rad holds for {CONVERGENCE_SUSTAIN} s (\"-\" if never)\n"
    );
    s.push_str("name,convergence_time,jumps,total_evaluations,final_theta,max_theta,final_time\n");
    for log in logs {
        let r = log.summary();
        let conv = r.convergence_time.map_or_else(|| "-".to_string(), |t| format!("{t:.3}"));
        let _ = writeln!(
            s,
            "{},{conv},{},{},{:.6},{:.6},{:.3}",
            r.name, r.jumps, r.total_evaluations, r.final_theta, r.max_theta, r.final_time
        );
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k: f64,
    pub xi: f64,
    pub item: u8,
    pub gain_bound: f64,
    pub delta_bar: f64,
    pub certified_min_refined: f64,
}

/// Closed-form (or certified) `δ̄` against `k`, and against `ξ` when `sweep.xi` is set.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<Vec<SweepRow>, CliError> {
    let sweep = cfg.sweep.clone().unwrap_or_default();
    if sweep.k.is_empty() {
        return Err(CliError::Config("sweep.k is empty".into()));
    }
    let base = cfg.shape()?;
    let shapes: Vec<TraceShape> = if sweep.xi.is_empty() {
        vec![base]
    } else {
        let m2 = base.spec_m().max();
        sweep
            .xi
            .iter()
            .map(|&xi| {
                let mut sub = cfg.clone();
                sub.shape.matrix = Some(Mat3::diag([2.0 * m2 * xi - m2, m2, m2]));
                sub.shape.vectors = None;
                sub.shape().map_err(|e| CliError::Config(format!("sweep.xi = {xi}: {e}")))
            })
            .collect::<Result<_, _>>()?
    };
    let mut rows = Vec::new();
    for shape in &shapes {
        for &k in &sweep.k {
            let bound = gain_upper_bound(shape.xi());
            let fam = cfg.family_with_shape(shape.clone(), k)?;
            let report = certify_with(&fam, sweep.branch_grid, Execution::default())?;
            rows.push(SweepRow {
                k,
                xi: shape.xi(),
                item: fam.case().item(),
                gain_bound: bound,
                delta_bar: fam.delta_bar().iter().copied().fold(f64::INFINITY, f64::min),
                certified_min_refined: report.min_refined_gap,
            });
        }
    }
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in &rows {
        let _ = writeln!(s, "{},{},{},{},{},{}", r.k, r.xi, r.item, r.gain_bound, r.delta_bar, r.certified_min_refined);
    }
    write(out, SWEEP_FILE, &s)?;
    Ok(rows)
}
