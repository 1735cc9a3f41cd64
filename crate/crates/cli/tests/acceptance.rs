//! Acceptance checks: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use so3_synergy::exec::Execution;
use so3_synergy::family::{certify_with, closed_form_gap, gain_upper_bound, min_envelope_on_grid, FamilyConfig};
use so3_synergy::sim::{
    critical_attitude, noncs_errors, run, Controller, ControllerKind, Gains, InitialCondition, NonCsParams,
    PlantParams, Scenario, SimLog,
};
use so3_synergy::so3::rotation_about;
use so3_synergy::{CertificationReport, Mat3, Rotation, SynergisticFamily, TraceShape, Vec3};
use so3_synergy_cli::{cmd_simulate, presets};

const GAP_TARGET: f64 = 0.0712;
const GAP_TOL: f64 = 5e-4;
const TIGHTNESS_REL: f64 = 0.01;
const TIGHTNESS_ABS: f64 = 1e-9;
const CERTIFY_GRID: usize = 720;
const CERTIFY_BUDGET_S: f64 = 30.0;
const RHO_TOL: f64 = 1e-8;
const GRAD_REL: f64 = 1e-5;
const GRAD_SAMPLES: usize = 1_000;
const DET_SAMPLES: usize = 100_000;
const POSITIVITY_SAMPLES: usize = 10_000;
const ENVELOPE_TOL: f64 = 1e-6;
const ENVELOPE_GRID: usize = 1_000_000;
const FLOW_SLACK: f64 = 1e-7;
const HYSTERESIS: f64 = 0.057;
const STALL_TORQUE: f64 = 1e-6;
const STALL_THETA: f64 = 0.1;

struct Sampler(Xoshiro256PlusPlus);

impl Sampler {
    fn new(seed: u64) -> Self {
        Sampler(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn unit(&mut self) -> Vec3 {
        loop {
            let v = Vec3::new(2.0 * self.uniform() - 1.0, 2.0 * self.uniform() - 1.0, 2.0 * self.uniform() - 1.0);
            if (1e-4..=1.0).contains(&v.norm_squared()) {
                return v.normalized().unwrap();
            }
        }
    }

    fn rotation(&mut self) -> Rotation {
        let u = self.unit();
        rotation_about(u, PI * self.uniform())
    }

    fn index(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }
}

fn family(diag: [f64; 3], item: Option<u8>, k: f64) -> SynergisticFamily {
    let mut shape = TraceShape::from_matrix(&Mat3::diag(diag)).unwrap();
    if let Some(i) = item {
        shape = shape.with_case(so3_synergy::SpectrumCase::from_item(i).unwrap()).unwrap();
    }
    SynergisticFamily::new(shape, FamilyConfig::with_k(k)).unwrap()
}

fn benchmark_family() -> SynergisticFamily {
    family([0.2, 0.4, 0.4], None, 0.465)
}

/// The five direction designs in order.
fn item_families() -> Vec<SynergisticFamily> {
    vec![
        family([0.4, 0.4, 0.4], None, 0.3),
        family([0.2, 0.4, 0.4], None, 0.465),
        family([0.2, 0.4, 0.4], Some(3), 0.465),
        family([0.3, 0.3, 0.6], None, 0.4),
        family([0.1, 0.3, 0.6], None, 0.4),
    ]
}

/// Central-difference gradient of `f` along `basis_step(e_i, s)` for the three axes.
fn fd_gradient(f: impl Fn(&Rotation) -> f64, step: impl Fn(Vec3, f64) -> Rotation) -> Vec3 {
    let h = 1e-5;
    let d = |i: usize| (f(&step(Vec3::basis(i), h)) - f(&step(Vec3::basis(i), -h))) / (2.0 * h);
    Vec3::new(d(0), d(1), d(2))
}

/// Worst relative error over `GRAD_SAMPLES` samples whose numerical gradient is
/// large enough for a relative comparison.
fn gradient_check(seed: u64, mut sample: impl FnMut(&mut Sampler) -> (Vec3, Vec3)) -> (f64, usize) {
    let mut rng = Sampler::new(seed);
    let (mut worst, mut skipped, mut kept) = (0.0_f64, 0, 0);
    while kept < GRAD_SAMPLES {
        let (analytic, numeric) = sample(&mut rng);
        if numeric.norm() < 1e-3 {
            skipped += 1;
            continue;
        }
        worst = worst.max((analytic - numeric).norm() / numeric.norm());
        kept += 1;
    }
    (worst, skipped)
}

fn s1(kind: ControllerKind) -> Scenario {
    let fam = benchmark_family();
    let y = critical_attitude(&fam, 0, &Vec3::E3).unwrap();
    Scenario::new("s1", kind, fam).with_initial(InitialCondition { attitude: y, omega: Vec3::ZERO, q: 0 })
}

fn s2(kind: ControllerKind) -> Scenario {
    let axis = Vec3::new(0.25, -0.69, 0.69).normalized().unwrap();
    let r0 = rotation_about(axis, 1.15 * PI);
    Scenario::new("s2", kind, benchmark_family()).with_initial(InitialCondition { attitude: r0, omega: Vec3::ZERO, q: 0 })
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gap_bound() -> Outcome {
    let shape = TraceShape::from_matrix(&Mat3::diag([0.2, 0.4, 0.4])).unwrap();
    let reps = 1000;
    let start = Instant::now();
    let mut gap = 0.0;
    for _ in 0..reps {
        gap = closed_form_gap(std::hint::black_box(shape.tag()), shape.xi(), 0.465).unwrap();
    }
    let per_call = start.elapsed().as_secs_f64() / reps as f64;
    ensure(
        (gap - GAP_TARGET).abs() <= GAP_TOL && per_call < 1e-3,
        format!("delta_bar = {gap:.6} (target {GAP_TARGET} ± {GAP_TOL}), {:.2} µs per evaluation", per_call * 1e6),
    )
}

fn tightness(reports: &[(CertificationReport, f64)]) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, (rep, secs)) in reports.iter().take(3).enumerate() {
        let fam = &item_families()[i];
        let closed = closed_form_gap(fam.shape().tag(), fam.shape().xi(), fam.k()).unwrap();
        let cert = rep.min_refined_gap;
        let good = match i {
            0 | 1 => (cert - closed).abs() <= TIGHTNESS_REL * closed,
            _ => cert >= closed - TIGHTNESS_ABS,
        } && *secs < CERTIFY_BUDGET_S;
        ok &= good;
        lines.push(format!("item {}: certified {cert:.6} vs closed form {closed:.6} in {secs:.2} s", i + 1));
    }
    ensure(ok, lines.join("; "))
}

fn critical_points(reports: &[(CertificationReport, f64)]) -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for (rep, _) in reports {
        let (lo, hi) = rep.theta_range;
        let good = rep.critical_points > 0 && rep.max_rho_norm < RHO_TOL && lo > 0.0 && hi < FRAC_PI_2;
        ok &= good;
        lines.push(format!(
            "item {}: {} points, max |rho| {:.1e}, theta in [{lo:.3}, {hi:.3}]",
            rep.item, rep.critical_points, rep.max_rho_norm
        ));
    }
    ensure(ok, lines.join("; "))
}

fn gradients() -> Outcome {
    let fam = benchmark_family();
    let right = |x: Rotation| move |w: Vec3, s: f64| x.compose(&rotation_about(w, s));
    let (rho, s1) = gradient_check(11, |rng| {
        let (x, q) = (rng.rotation(), rng.index(fam.len()));
        (fam.rho(&x, q) * 2.0, fd_gradient(|r| fam.value(r, q), right(x)))
    });
    let shape = fam.shape().clone();
    let (psi, s2) = gradient_check(12, |rng| {
        let x = rng.rotation();
        (shape.psi_rho(&x) * 2.0, fd_gradient(|r| shape.psi_value(r), right(x)))
    });
    let p = NonCsParams::default();
    let (noncs, s3) = gradient_check(13, |rng| {
        let (x, q) = (rng.rotation(), rng.index(3));
        let left = move |w: Vec3, s: f64| rotation_about(w, -s).compose(&x);
        (noncs_errors(&p, &x, q).1, fd_gradient(|r| noncs_errors(&p, r, q).0, left))
    });
    ensure(
        rho < GRAD_REL && psi < GRAD_REL && noncs < GRAD_REL,
        format!(
            "worst relative error over {GRAD_SAMPLES} samples each: rho_V {rho:.1e}, psi_rho {psi:.1e}, NonCS {noncs:.1e} \
             (skipped near-stationary samples: {s1}, {s2}, {s3})"
        ),
    )
}

fn diffeomorphism() -> Outcome {
    let bound = gain_upper_bound(0.75);
    let gains: Vec<f64> = (1..=20).map(|i| bound * (i as f64 - 0.5) / 20.0).collect();
    let families: Vec<SynergisticFamily> = gains.iter().map(|&k| family([0.2, 0.4, 0.4], None, k)).collect();
    let mut rng = Sampler::new(21);
    let mut min_det = f64::INFINITY;
    for i in 0..DET_SAMPLES {
        let fam = &families[i % families.len()];
        let (x, q) = (rng.rotation(), rng.index(fam.len()));
        min_det = min_det.min(fam.theta_matrix(&x, q).det().abs());
    }
    let fam = benchmark_family();
    let mut rng = Sampler::new(22);
    let mut positive = true;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..POSITIVITY_SAMPLES {
        let x = rng.rotation();
        for q in 0..fam.len() {
            let v = fam.value(&x, q);
            positive &= v > 0.0 || x.angle() == 0.0;
            min_ratio = min_ratio.min(v / x.angle().powi(2));
        }
    }
    ensure(
        min_det > 0.0 && positive,
        format!(
            "min |det Theta| = {min_det:.4} over {DET_SAMPLES} samples and k in (0, {bound:.4}); \
             V > 0 on {POSITIVITY_SAMPLES} samples (min V/angle² = {min_ratio:.4})"
        ),
    )
}

fn envelope() -> Outcome {
    let mut worst = 0.0_f64;
    for xi in [0.5, 0.6, 0.75, 0.9, 1.0] {
        let m = min_envelope_on_grid(xi, ENVELOPE_GRID, Execution::default());
        worst = worst.max((m - (xi - 0.25)).abs());
    }
    ensure(worst <= ENVELOPE_TOL, format!("max |min F − (xi − 1/4)| = {worst:.2e} on a {ENVELOPE_GRID}-interval grid"))
}

fn lyapunov_checks(log: &SimLog, k1: f64) -> Result<String, String> {
    let mut worst_flow = f64::NEG_INFINITY;
    for w in log.rows.windows(2) {
        let end = log.jumps.iter().find(|j| j.t == w[1].t).map_or(w[1].energy, |j| j.energy_before);
        worst_flow = worst_flow.max(end - w[0].energy);
    }
    let min_drop = log
        .jumps
        .iter()
        .map(|j| j.energy_before - j.energy_after)
        .fold(f64::INFINITY, f64::min);
    let u0 = match log.jumps.first() {
        Some(j) if j.t == 0.0 => j.energy_before,
        _ => log.rows[0].energy,
    };
    let jump_cap = u0 / (k1 * HYSTERESIS);
    let conv = log.convergence_time(0.01, 1.0);
    let detail = format!(
        "{}: flow increase {worst_flow:.1e}, {} jump(s) (cap {jump_cap:.1}), min drop {min_drop:.3} (need {:.3}), converged at {}",
        log.name,
        log.jumps.len(),
        k1 * HYSTERESIS,
        conv.map_or("never".into(), |t| format!("{t:.2} s"))
    );
    let ok = worst_flow <= FLOW_SLACK
        && (log.jumps.is_empty() || min_drop >= k1 * HYSTERESIS)
        && (log.jumps.len() as f64) <= jump_cap
        && conv.is_some();
    ensure(ok, detail)
}

fn hybrid_lyapunov() -> Outcome {
    let fam = benchmark_family();
    let hyst_ok = fam.hysteresis_levels().iter().all(|d| (d - HYSTERESIS).abs() < 5e-4);
    let k1 = Gains::SYNERGISTIC.k1;
    let a = lyapunov_checks(&run(&s1(ControllerKind::PiCs)).map_err(|e| e.to_string())?, k1);
    let b = lyapunov_checks(&run(&s2(ControllerKind::PiCs)).map_err(|e| e.to_string())?, k1);
    let detail = format!("{}; {}", a.as_ref().unwrap_or_else(|e| e), b.as_ref().unwrap_or_else(|e| e));
    ensure(hyst_ok && a.is_ok() && b.is_ok(), detail)
}

fn baseline_contrast(dir: &Path) -> Outcome {
    let fam = benchmark_family();
    let scn = s1(ControllerKind::Solo);
    let solo = Controller::new(ControllerKind::Solo, fam, Gains::SYNERGISTIC).map_err(|e| e.to_string())?;
    let (wd, wd_dot) = scn.reference.sample(0.0).map_err(|e| e.to_string())?;
    let plant = PlantParams::default();
    let parts = solo.torque(plant.inertia(), 0, &scn.initial.attitude, Vec3::ZERO, &Rotation::IDENTITY, wd, wd_dot);
    let stall = parts.proportional.norm();
    let picks = run(&s1(ControllerKind::PiCs)).map_err(|e| e.to_string())?;
    let first_jump = picks.jumps.first().map(|j| j.t);

    let cfg = presets::get("fig7").map_err(|e| e.to_string())?;
    let logs = cmd_simulate(&cfg, dir).map_err(|e| e.to_string())?;
    let by_name = |n: &str| logs.iter().find(|l| l.name == n).unwrap();
    let stalled: Vec<f64> = ["noncs-fixed_q1", "noncs-fixed_q2"]
        .iter()
        .map(|n| by_name(n).rows.last().unwrap().theta_err)
        .collect();
    let solo_conv: Vec<Option<f64>> = (0..4).map(|q| by_name(&format!("solo_q{q}")).convergence_time(0.01, 1.0)).collect();
    ensure(
        stall < STALL_TORQUE
            && first_jump == Some(0.0)
            && stalled.iter().all(|&t| t > STALL_THETA)
            && solo_conv.iter().all(Option::is_some),
        format!(
            "Solo proportional torque at t = 0: {stall:.1e} N·m; PiCS first jump at {first_jump:?}; \
             fixed NonCS members 2, 3 end at theta {stalled:.3?}; fixed synergistic members converge at {solo_conv:.2?}"
        ),
    )
}

fn evaluation_accounting() -> Outcome {
    let fam = benchmark_family();
    let pics = Controller::new(ControllerKind::PiCs, fam.clone(), Gains::SYNERGISTIC).map_err(|e| e.to_string())?;
    let mucs = Controller::new(ControllerKind::MuCs, fam, Gains::SYNERGISTIC).map_err(|e| e.to_string())?;
    let mut rng = Sampler::new(31);
    let (mut pi_counts, mut mu_counts) = (std::collections::BTreeSet::new(), std::collections::BTreeSet::new());
    for _ in 0..GRAD_SAMPLES {
        let (x, q) = (rng.rotation(), rng.index(4));
        let d = pics.check(&x, &Rotation::IDENTITY, q);
        if d.next.is_none() {
            pi_counts.insert(d.evaluations);
        }
        mu_counts.insert(mucs.check(&x, &Rotation::IDENTITY, q).evaluations);
    }
    let steps = |log: &SimLog| -> std::collections::BTreeSet<u64> {
        log.rows.windows(2).map(|w| w[1].eval_count - w[0].eval_count).collect()
    };
    let pi_log = run(&s2(ControllerKind::PiCs)).map_err(|e| e.to_string())?;
    let mu_log = run(&s2(ControllerKind::MuCs)).map_err(|e| e.to_string())?;
    let (pi_steps, mu_steps) = (steps(&pi_log), steps(&mu_log));
    let pi_ok = pi_counts.iter().eq([3].iter()) && pi_steps.iter().all(|s| *s == 3 || *s == 4);
    let mu_ok = mu_counts.iter().eq([4].iter()) && mu_steps.iter().eq([4].iter());
    ensure(
        pi_ok && mu_ok,
        format!(
            "PiCS evaluations per check {pi_counts:?} (per logged step {pi_steps:?}, 4 only at jumps); \
             MuCS {mu_counts:?} (per logged step {mu_steps:?})"
        ),
    )
}

fn determinism(dir: &Path) -> Outcome {
    let cfg = presets::get("fig5").map_err(|e| e.to_string())?;
    let (a, b) = (dir.join("a"), dir.join("b"));
    cmd_simulate(&cfg, &a).map_err(|e| e.to_string())?;
    cmd_simulate(&cfg, &b).map_err(|e| e.to_string())?;
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut bytes = 0;
    for n in &names {
        let (x, y) = (std::fs::read(a.join(n)).unwrap(), std::fs::read(b.join(n)).unwrap());
        if x != y {
            return Err(format!("{} differs between runs", n.to_string_lossy()));
        }
        bytes += x.len();
    }
    ensure(names.len() == 9, format!("{} files ({bytes} bytes) identical across two seeded runs", names.len()))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let mut failures = 0;
    let mut report = |id: u8, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(d) => println!("PASS  {id:>2} {name} ({secs:.2} s): {d}"),
            Err(d) => {
                failures += 1;
                println!("FAIL  {id:>2} {name} ({secs:.2} s): {d}");
            }
        }
    };

    let reports: Vec<(CertificationReport, f64)> = item_families()
        .iter()
        .map(|fam| {
            let start = Instant::now();
            let rep = certify_with(fam, CERTIFY_GRID, Execution::default()).expect("certification runs");
            (rep, start.elapsed().as_secs_f64())
        })
        .collect();

    report(1, "gap-bound reproduction", &mut gap_bound);
    report(2, "certification tightness", &mut || tightness(&reports));
    report(3, "critical-point oracle", &mut || critical_points(&reports));
    report(4, "gradient suite", &mut gradients);
    report(5, "diffeomorphism suite", &mut diffeomorphism);
    report(6, "envelope minimum", &mut envelope);
    report(7, "hybrid Lyapunov suite", &mut hybrid_lyapunov);
    report(8, "baseline contrast", &mut || baseline_contrast(&tmp.path().join("fig7")));
    report(9, "evaluation accounting", &mut evaluation_accounting);
    report(10, "determinism", &mut || determinism(&tmp.path().join("det")));

    if failures > 0 {
        println!("{failures} criterion/criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
