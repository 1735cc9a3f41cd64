//! Built-in configurations for the benchmark shape and the five direction designs.

use so3_synergy::sim::NonCsParams;
use so3_synergy::{Mat3, Vec3};

use crate::config::{
    ControllerName, FamilySection, InitialSection, NoiseSection, ProfileSection, ReferenceSection, RunConfig,
    RunSpec, ShapeSection, SimulationSection,
};
use crate::error::CliError;

pub const NAMES: [&str; 10] = [
    "fig4a",
    "fig4b",
    "fig5",
    "fig6",
    "fig7",
    "certify-item1",
    "certify-item2",
    "certify-item3",
    "certify-item4",
    "certify-item5",
];

pub const SEED: u64 = 20_240_601;

/// `diag(0.2, 0.4, 0.4)`.
pub fn benchmark_shape() -> Mat3 {
    Mat3::diag([0.2, 0.4, 0.4])
}

pub fn get(name: &str) -> Result<RunConfig, CliError> {
    let cfg = match name {
        "fig4a" => profile_config(None),
        "fig4b" => profile_config(Some(3)),
        "fig5" => tracking(s1_initial(), &[ControllerName::Solo, ControllerName::PiCs, ControllerName::MuCs, ControllerName::Noncs]),
        "fig6" => tracking(s2_initial(), &[ControllerName::Solo, ControllerName::PiCs, ControllerName::MuCs, ControllerName::Noncs]),
        "fig7" => fig7(),
        "certify-item1" => certify_config(Mat3::diag([0.4, 0.4, 0.4]), None, 0.3),
        "certify-item2" => certify_config(benchmark_shape(), None, 0.465),
        "certify-item3" => certify_config(benchmark_shape(), Some(3), 0.465),
        "certify-item4" => certify_config(Mat3::diag([0.3, 0.3, 0.6]), None, 0.4),
        "certify-item5" => certify_config(Mat3::diag([0.1, 0.3, 0.6]), None, 0.4),
        other => {
            return Err(CliError::Config(format!("unknown preset `{other}` (known: {})", NAMES.join(", "))));
        }
    };
    Ok(cfg)
}

fn base(matrix: Mat3, item: Option<u8>, k: f64) -> RunConfig {
    RunConfig {
        output_dir: None,
        shape: ShapeSection { matrix: Some(matrix), vectors: None, item },
        family: FamilySection { k, ..FamilySection::default() },
        simulation: None,
        sweep: None,
        profile: None,
    }
}

fn certify_config(matrix: Mat3, item: Option<u8>, k: f64) -> RunConfig {
    base(matrix, item, k)
}

fn profile_config(item: Option<u8>) -> RunConfig {
    RunConfig { profile: Some(ProfileSection::default()), ..base(benchmark_shape(), item, 0.465) }
}

/// Exact unwanted critical point of member 0 on the `e₃` branch, `R_a(π, (0.364, 0, 0.931))`.
fn s1_initial() -> InitialSection {
    InitialSection {
        axis: Vec3::new(0.37, 0.0, 0.93),
        angle: std::f64::consts::PI,
        critical_branch: Some(Vec3::E3),
        critical_member: Some(0),
        ..InitialSection::default()
    }
}

fn s2_initial() -> InitialSection {
    InitialSection {
        axis: Vec3::new(0.25, -0.69, 0.69),
        angle: 1.15 * std::f64::consts::PI,
        ..InitialSection::default()
    }
}

fn simulation(initial: InitialSection, runs: Vec<RunSpec>, horizon: f64) -> SimulationSection {
    SimulationSection {
        runs,
        horizon,
        seed: SEED,
        noise: NoiseSection { attitude_max_angle: 0.01 * std::f64::consts::PI, gyro_sigma: 0.01 },
        initial,
        reference: ReferenceSection::default(),
        noncs: NonCsParams::default(),
        ..SimulationSection::default()
    }
}

fn tracking(initial: InitialSection, controllers: &[ControllerName]) -> RunConfig {
    let runs = controllers.iter().map(|&controller| RunSpec { controller, q: None, name: None }).collect();
    RunConfig { simulation: Some(simulation(initial, runs, 20.0)), ..base(benchmark_shape(), None, 0.465) }
}

/// Every synergistic member and every baseline member with switching disabled.
fn fig7() -> RunConfig {
    let solo = (0..4).map(|q| RunSpec { controller: ControllerName::Solo, q: Some(q), name: None });
    let noncs = (0..3).map(|q| RunSpec { controller: ControllerName::NoncsFixed, q: Some(q), name: None });
    let runs = solo.chain(noncs).collect();
    RunConfig { simulation: Some(simulation(s1_initial(), runs, 30.0)), ..base(benchmark_shape(), None, 0.465) }
}
