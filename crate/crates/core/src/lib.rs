//! Pseudo-spectral simulation of the compressible non-isentropic
//! Euler-Maxwell system near the constant equilibrium `(1, 0, 1, 0, B_inf)`,
//! written in perturbation variables `(n, u, theta, E, B)`, together with the
//! energy-method diagnostics and decay-rate analysis used to study it.
//!
//! The crate is purely numerical; file formats and the command line live in
//! the `emaxwell-cli` crate.

pub mod analysis;
pub mod diagnostics;
pub mod integrator;
pub mod model;
pub mod rng;
pub mod spectral;
