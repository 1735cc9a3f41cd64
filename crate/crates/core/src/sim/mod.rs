//! Hybrid attitude tracking simulation: rigid-body plant, reference generator,
//! measurement noise, the four controllers and a fixed-step hybrid integrator.

mod control;
mod log;
mod noise;
mod plant;
mod reference;
mod run;

pub use control::{
    noncs_errors, Controller, ControllerKind, Gains, NonCsParams, SwitchDecision, TorqueParts,
};
pub use log::{
    JumpEvent, LogRow, RunSummary, SimLog, CONVERGENCE_SUSTAIN, CONVERGENCE_THRESHOLD, JUMP_HEADER, ROW_HEADER,
};
pub use noise::{MeasurementNoise, NoiseConfig, NoiseSample};
pub use plant::{plant_derivative, PlantParams};
pub use reference::{ReferenceConfig, ReferenceProfile};
pub use run::{critical_attitude, lyapunov, run, run_many, HybridState, InitialCondition, Scenario};

use thiserror::Error;

use crate::family::FamilyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("reference {quantity} = {value} exceeds its bound {bound} at t = {t}")]
    ReferenceBound {
        t: f64,
        quantity: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}
