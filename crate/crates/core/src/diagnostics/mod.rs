//! Energy-method functionals evaluated on states and trajectories.
//!
//! Derivative norms `||grad^l f||` are evaluated as `||Lambda^l f||`, which
//! is exact for integer `l` on the torus. Norms of tuples of fields are
//! combined differently depending on the quantity: energies and
//! dissipations are sums of squared component norms, while negative-order
//! norms and decay targets use the plain sum `||(A, B)|| = ||A|| + ||B||`.

mod energy;
mod lyapunov;
mod negative;
mod window;

use thiserror::Error;

use crate::spectral::SpectralError;

pub use energy::{energy_report, group_level_norms_sqr, EnergyReport};
pub use lyapunov::{
    lyapunov_check, LyapunovOptions, LyapunovReport, LyapunovSample, Violation, DEFAULT_LAMBDA_PROBE,
    DEFAULT_RELATIVE_SLACK,
};
pub use negative::{
    decay_target_norm, track_negative_norms, track_negative_norms_with, DecayTarget, NegativeSpace, NormTrack,
};
pub use window::{window_functionals, WindowFunctionals, DEFAULT_EPSILON, DEFAULT_ETA};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("derivative order {order} exceeds what the grid resolves (max {max})")]
    Resolution { order: u32, max: u32 },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
