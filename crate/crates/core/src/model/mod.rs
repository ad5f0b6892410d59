//! The Euler-Maxwell perturbation system
//!
//! ```text
//! n_t     = -u . grad n - (1 + n) div u
//! u_t     = -u - E - grad theta - u x B_inf - u . grad u - (1 + theta)/(1 + n) grad n - u x B
//! theta_t = -theta - u . grad theta - (2/3)(1 + theta) div u + |u|^2 / 3
//! E_t     = curl B + u + n u
//! B_t     = -curl E
//! div E = -n,  div B = 0
//! ```
//!
//! in the nonconservative variables `n = rho - 1`, `theta = Theta - 1`,
//! `B = B_total - B_inf`.

mod bounds;
mod constraints;
mod init;
mod rhs;
mod state;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{divergence, SpectralError, SpectralField};

pub use bounds::{bound_factors, sobolev_norm};
pub use constraints::{constraint_residual, electric_field_from_density, leray_project, project_constraints};
pub use init::{
    make_initial_data, measure, ComponentMask, InitialDataSpec, NormalizedQuantity, Normalization, Profile,
};
pub use rhs::{linear_rhs, rhs};
pub use state::{Group, PlasmaState, Tendency, FIELD_COUNT, FIELD_NAMES};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Constant background magnetic field.
    pub b_infinity: [f64; 3],
    /// Two-thirds truncation of nonlinear terms.
    pub dealias: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            b_infinity: [0.0; 3],
            dealias: true,
        }
    }
}

impl ModelParams {
    pub fn has_background_field(&self) -> bool {
        self.b_infinity.iter().any(|b| *b != 0.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("vacuum reached at t = {time}: min(1 + n) = {min_density}")]
    Vacuum { time: f64, min_density: f64 },
    #[error("normalization requested but the seeded fields vanish")]
    DegenerateNormalization,
    #[error("invalid initial-data spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `psi = div u`, the velocity divergence.
pub fn velocity_divergence(state: &PlasmaState) -> SpectralField {
    divergence(&state.u)
}
