//! Periodic-box Fourier calculus.
//!
//! Fields live on the torus `[0, L)^3` sampled on `n^3` collocation points.
//! Coefficients are normalized so that `f(x) = sum_m c_m exp(i xi_m . x)` with
//! `xi_m = 2 pi m / L`; consequently `||f||_{L2}^2 = L^3 sum_m |c_m|^2`.
//!
//! Every multiplier in the crate (fractional powers `|xi|^s`, derivatives,
//! Littlewood-Paley rings, the two-thirds dealiasing mask) goes through
//! [`apply_symbol`] or one of the mode-wise helpers built on the same grid
//! wavevectors.
//!
//! For integer `l`, `||Lambda^l f||` equals the norm of the full derivative
//! tensor `nabla^l f` because `sum_{|alpha| = l} binom(l, alpha) xi^(2 alpha)
//! = |xi|^(2l)`; the energy functionals rely on this identity.

mod fft;
mod field;
mod grid;
mod norm;
mod symbol;

use thiserror::Error;

pub use field::{l2_pairing, real_pair_to_spectral, real_to_spectral, to_real_pair, RealField, SpectralField};
pub use grid::Grid;
pub use norm::{lp_norm, magnitude, norm_of_components, ring_energies, NormKind};
pub use symbol::{
    apply_symbol, bump, curl, dealias, divergence, gradient, ring_weight, rings_at, MultiplierSymbol,
    ZeroModeRule,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("array has {found} entries, grid expects {expected}")]
    Shape { expected: usize, found: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("negative-order operator applied to a field with nonzero mean ({mean:e})")]
    NonzeroMean { mean: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}
