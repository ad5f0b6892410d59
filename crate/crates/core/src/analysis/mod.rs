//! Decay-exponent estimation and randomized checks of the functional
//! inequalities behind the energy estimates.

mod calibration;
mod checks;
mod decay;
mod fit;
mod inequality;

use thiserror::Error;

use crate::spectral::SpectralError;

pub use calibration::{calibrated_constant, calibration_drift, CALIBRATION_TOLERANCE};
pub use checks::{
    constraint_conservation, oracle_equivalence, self_convergence_order, ConstraintCheck, ConstraintReport,
    ConvergenceCheck, ConvergenceReport, OracleCheck, OracleCheckReport,
};
pub use decay::{
    assess_claim, s_p, DecayAssessment, DecayClaim, RegularitySource, Tier, Verdict, CONSISTENCY_TOLERANCE, MIN_DECAY_ORDER,
    TORUS_CAVEAT,
};
pub use fit::{fit_decay_exponent, DecayFit, MIN_FIT_SAMPLES};
pub use inequality::{
    lemma_ratio, random_field, replay_sample, single_mode_field, verify_inequality, InequalityReport, LemmaId,
    LemmaParams, SampleRecord, SamplingConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("insufficient regularity: claim needs N >= {required}, run has N = {n}")]
    InsufficientRegularity { required: f64, n: u32 },
    #[error("need at least {needed} samples in the fit window, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("cannot take the logarithm of {value} at t = {time}")]
    LogDomain { time: f64, value: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
