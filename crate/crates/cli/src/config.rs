//! TOML run configuration.
//!
//! ```toml
//! [shape]
//! matrix = [[0.2, 0.0, 0.0], [0.0, 0.4, 0.0], [0.0, 0.0, 0.4]]
//! item = 3            # optional direction-design override
//!
//! [family]
//! k = 0.465
//!
//! [simulation]
//! horizon = 20.0
//! runs = [{ controller = "pi-cs" }, { controller = "solo", q = 2 }]
//!
//! [simulation.initial]
//! axis = [0.25, -0.69, 0.69]
//! angle = 3.6128
//! ```

use serde::{Deserialize, Serialize};

use so3_synergy::family::FamilyConfig;
use so3_synergy::sim::{
    critical_attitude, ControllerKind, Gains, InitialCondition, NoiseConfig, NonCsParams, PlantParams,
    ReferenceConfig, ReferenceProfile, Scenario,
};
use so3_synergy::so3::rotation_about;
use so3_synergy::{InertialVectorSet, Mat3, SynergisticFamily, SpectrumCase, TraceShape, Vec3};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Default output directory; `--out` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub shape: ShapeSection,
    #[serde(default)]
    pub family: FamilySection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSection>,
}

/// Either an explicit weight matrix or a list of weighted inertial directions.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Mat3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<WeightedVector>>,
    /// Force a direction design (1–5) compatible with the spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedVector {
    pub direction: Vec3,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilySection {
    pub k: f64,
    pub delta_fraction: f64,
    pub branch_grid: usize,
    pub sphere_points: usize,
    /// Explicit `δ(q)` per member, replacing `delta_fraction · δ̄`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hysteresis: Option<Vec<f64>>,
}

impl Default for FamilySection {
    fn default() -> Self {
        let d = FamilyConfig::default();
        Self {
            k: d.k,
            delta_fraction: d.delta_fraction,
            branch_grid: d.branch_grid,
            sphere_points: d.sphere_points,
            hysteresis: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerName {
    Solo,
    PiCs,
    MuCs,
    Noncs,
    NoncsFixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub controller: ControllerName,
    /// Initial member index; defaults to `simulation.initial.q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    /// Output file stem; defaults to the controller label (plus `_q<n>` when `q` is set).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub runs: Vec<RunSpec>,
    pub horizon: f64,
    pub step: f64,
    pub log_every: usize,
    pub seed: u64,
    pub noise: NoiseSection,
    pub initial: InitialSection,
    pub inertia: Mat3,
    pub reference: ReferenceSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains: Option<Gains>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noncs_gains: Option<Gains>,
    pub noncs: NonCsParams,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            runs: Vec::new(),
            horizon: 20.0,
            step: 1e-3,
            log_every: 1,
            seed: 1,
            noise: NoiseSection::default(),
            initial: InitialSection::default(),
            inertia: *PlantParams::default().inertia(),
            reference: ReferenceSection::default(),
            gains: None,
            noncs_gains: None,
            noncs: NonCsParams::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub attitude_max_angle: f64,
    pub gyro_sigma: f64,
}

/// Initial attitude is `R_a(angle, axis/|axis|)` unless `critical_branch` is given, in
/// which case it is the exact unwanted critical point of member `critical_member`
/// on that eigenvector branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub axis: Vec3,
    pub angle: f64,
    pub omega: Vec3,
    pub q: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_branch: Option<Vec3>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_member: Option<usize>,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { axis: Vec3::E1, angle: 0.0, omega: Vec3::ZERO, q: 0, critical_branch: None, critical_member: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    Benchmark,
    Rest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReferenceSection {
    pub profile: ReferenceKind,
    pub omega_bound: f64,
    pub accel_bound: f64,
}

impl Default for ReferenceSection {
    fn default() -> Self {
        let d = ReferenceConfig::default();
        Self { profile: ReferenceKind::Benchmark, omega_bound: d.omega_bound, accel_bound: d.accel_bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub k: Vec<f64>,
    /// Optional `ξ` values for shapes with a repeated largest eigenvalue; the repeated
    /// eigenvalue is kept and the simple one is set to give the requested `ξ`.
    pub xi: Vec<f64>,
    /// Branch grid of the certified column.
    pub branch_grid: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { k: vec![0.1, 0.2, 0.3, 0.4, 0.465, 0.5], xi: Vec::new(), branch_grid: 180 }
    }
}

/// Potentials along `R_a(θ, axis)`, `θ ∈ [0, 2π]`, one segment per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileSection {
    pub axes: Vec<Vec3>,
    pub samples_per_turn: usize,
}

impl Default for ProfileSection {
    fn default() -> Self {
        Self {
            axes: vec![Vec3::new(0.37, 0.0, 0.93), Vec3::new(0.25, 0.69, 0.69), Vec3::new(0.25, -0.69, 0.69)],
            samples_per_turn: 720,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    /// Parse TOML; syntax and type errors carry line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serialisable")
    }

    pub fn shape(&self) -> Result<TraceShape, CliError> {
        let s = &self.shape;
        let shape = match (&s.matrix, &s.vectors) {
            (Some(m), None) => TraceShape::from_matrix(m),
            (None, Some(vs)) => {
                let set = InertialVectorSet::new(vs.iter().map(|v| (v.direction, v.weight)))
                    .map_err(|e| config_err(format!("shape.vectors: {e}")))?;
                TraceShape::from_vectors(&set)
            }
            _ => return Err(config_err("shape: give exactly one of `matrix` or `vectors`")),
        }
        .map_err(|e| config_err(format!("shape: {e}")))?;
        match s.item {
            None => Ok(shape),
            Some(item) => {
                let case = SpectrumCase::from_item(item).ok_or_else(|| config_err(format!("shape.item = {item}: expected 1–5")))?;
                shape.with_case(case).map_err(|e| config_err(format!("shape.item: {e}")))
            }
        }
    }

    pub fn family_config(&self) -> FamilyConfig {
        FamilyConfig {
            k: self.family.k,
            delta_fraction: self.family.delta_fraction,
            branch_grid: self.family.branch_grid,
            sphere_points: self.family.sphere_points,
        }
    }

    pub fn build_family(&self) -> Result<SynergisticFamily, CliError> {
        self.family_with_shape(self.shape()?, self.family.k)
    }

    pub(crate) fn family_with_shape(&self, shape: TraceShape, k: f64) -> Result<SynergisticFamily, CliError> {
        if !(self.family.delta_fraction > 0.0 && self.family.delta_fraction < 1.0) {
            return Err(config_err(format!("family.delta_fraction = {} must lie in (0, 1)", self.family.delta_fraction)));
        }
        let fam = SynergisticFamily::new(shape, FamilyConfig { k, ..self.family_config() })?;
        match &self.family.hysteresis {
            Some(h) => Ok(fam.with_hysteresis(h.clone())?),
            None => Ok(fam),
        }
    }

    pub fn simulation(&self) -> Result<&SimulationSection, CliError> {
        self.simulation.as_ref().ok_or_else(|| config_err("missing [simulation] section"))
    }

    /// One scenario per configured run, all sharing the family, plant, reference,
    /// noise seed and initial state.
    pub fn scenarios(&self, family: &SynergisticFamily) -> Result<Vec<Scenario>, CliError> {
        let sim = self.simulation()?;
        if sim.runs.is_empty() {
            return Err(config_err("simulation.runs is empty"));
        }
        let plant = PlantParams::new(sim.inertia).map_err(|e| config_err(format!("simulation.inertia: {e}")))?;
        let reference = ReferenceConfig {
            initial: so3_synergy::Rotation::IDENTITY,
            profile: match sim.reference.profile {
                ReferenceKind::Benchmark => ReferenceProfile::Benchmark,
                ReferenceKind::Rest => ReferenceProfile::Constant { omega: Vec3::ZERO },
            },
            omega_bound: sim.reference.omega_bound,
            accel_bound: sim.reference.accel_bound,
        };
        let attitude = match sim.initial.critical_branch {
            Some(v) => {
                let v = v.normalized().ok_or_else(|| config_err("simulation.initial.critical_branch is zero"))?;
                let q = sim.initial.critical_member.unwrap_or(sim.initial.q);
                critical_attitude(family, q, &v).map_err(|e| config_err(format!("simulation.initial: {e}")))?
            }
            None => {
                let axis = sim.initial.axis.normalized().ok_or_else(|| config_err("simulation.initial.axis is zero"))?;
                rotation_about(axis, sim.initial.angle)
            }
        };
        let noise = NoiseConfig {
            attitude_max_angle: sim.noise.attitude_max_angle,
            gyro_sigma: sim.noise.gyro_sigma,
            seed: sim.seed,
        };
        let mut names = std::collections::BTreeSet::new();
        sim.runs
            .iter()
            .map(|run| {
                let kind = match run.controller {
                    ControllerName::Solo => ControllerKind::Solo,
                    ControllerName::PiCs => ControllerKind::PiCs,
                    ControllerName::MuCs => ControllerKind::MuCs,
                    ControllerName::Noncs => ControllerKind::NonCs(sim.noncs),
                    ControllerName::NoncsFixed => ControllerKind::NonCsFixed(sim.noncs),
                };
                let gains = match kind {
                    ControllerKind::NonCs(_) | ControllerKind::NonCsFixed(_) => sim.noncs_gains,
                    _ => sim.gains,
                }
                .unwrap_or_else(|| kind.default_gains());
                let name = run.name.clone().unwrap_or_else(|| match run.q {
                    Some(q) => format!("{}_q{q}", kind.label()),
                    None => kind.label().to_string(),
                });
                if !names.insert(name.clone()) {
                    return Err(config_err(format!("duplicate run name `{name}`")));
                }
                if name.is_empty() || name.contains(['/', '\\']) {
                    return Err(config_err(format!("invalid run name `{name}`")));
                }
                Ok(Scenario {
                    name,
                    kind,
                    gains,
                    family: family.clone(),
                    plant,
                    reference,
                    noise,
                    initial: InitialCondition { attitude, omega: sim.initial.omega, q: run.q.unwrap_or(sim.initial.q) },
                    horizon: sim.horizon,
                    step: sim.step,
                    log_every: sim.log_every,
                })
            })
            .collect()
    }
}
