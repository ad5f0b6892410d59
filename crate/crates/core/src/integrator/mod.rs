//! Explicit RK4 time stepping with CFL control and periodic constraint
//! projection, plus the exact per-mode solution of the linearized system.

mod oracle;
mod run;
mod step;

use thiserror::Error;

use crate::diagnostics::DiagnosticsError;
use crate::model::ModelError;

pub use oracle::{assemble_mode_matrix, linear_oracle_evolve, Matrix11, ModeMatrix, Vector11};
pub use run::{
    run_from_state, run_simulation, run_simulation_with, sample, DiagnosticsRequest, GridSpec, ProjectionEvent,
    RunConfig, SampleRow, TrajectoryRecord, VacuumEvent,
};
pub use step::{evolve_to, rk4_step, StepControl};

/// Rows and columns of [`ModeMatrix`].
pub mod layout {
    pub use super::oracle::{B, E, N, THETA, U};
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error("{0}")]
    Output(String),
}
