use serde::{Deserialize, Serialize};

use super::{DiagnosticsError, WindowFunctionals};

pub const DEFAULT_LAMBDA_PROBE: f64 = 0.01;
/// Slack, as a fraction of the initial windowed energy.
pub const DEFAULT_RELATIVE_SLACK: f64 = 1e-3;

/// One sample of the Lyapunov pair `(E_tilde, D)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub time: f64,
    pub instant_energy: f64,
    pub window_energy: f64,
    pub dissipation: f64,
}

impl From<&WindowFunctionals> for LyapunovSample {
    fn from(w: &WindowFunctionals) -> Self {
        Self {
            time: w.time,
            instant_energy: w.instant_energy,
            window_energy: w.energy,
            dissipation: w.dissipation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovOptions {
    pub lambda_probe: f64,
    /// Absolute slack; `None` uses `1e-3` times the first sample's windowed energy.
    pub slack: Option<f64>,
}

impl Default for LyapunovOptions {
    fn default() -> Self {
        Self {
            lambda_probe: DEFAULT_LAMBDA_PROBE,
            slack: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub time: f64,
    /// `dE_tilde/dt + lambda_probe * D` at this sample.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub lambda_probe: f64,
    pub slack: f64,
    pub violations: Vec<Violation>,
    /// Largest `lambda` for which `dE_tilde/dt + lambda D <= slack` at every
    /// interior sample; `None` when even `lambda = 0` fails. Unbounded
    /// (all dissipation zero, no violation) is reported as `f64::INFINITY`.
    pub max_lambda: Option<f64>,
    pub interior_samples: usize,
}

/// Checks `dE_tilde/dt + lambda D <= slack` on a sampled trajectory, with
/// the time derivative taken by centred differences at interior samples.
pub fn lyapunov_check(samples: &[LyapunovSample], options: LyapunovOptions) -> Result<LyapunovReport, DiagnosticsError> {
    if samples.len() < 3 {
        return Err(DiagnosticsError::InsufficientData {
            needed: 3,
            got: samples.len(),
        });
    }
    let slack = options
        .slack
        .unwrap_or(DEFAULT_RELATIVE_SLACK * samples[0].window_energy);
    let mut violations = Vec::new();
    let mut max_lambda = f64::INFINITY;
    let mut feasible = true;
    for w in samples.windows(3) {
        let (prev, mid, next) = (&w[0], &w[1], &w[2]);
        let dt = next.time - prev.time;
        if !(dt > 0.0) {
            return Err(DiagnosticsError::Parameter(format!(
                "sample times must increase strictly (at t = {})",
                mid.time
            )));
        }
        let rate = (next.instant_energy - prev.instant_energy) / dt;
        let value = rate + options.lambda_probe * mid.dissipation;
        if value > slack {
            violations.push(Violation { time: mid.time, value });
        }
        let headroom = slack - rate;
        if headroom < 0.0 {
            feasible = false;
        } else if mid.dissipation > 0.0 {
            max_lambda = max_lambda.min(headroom / mid.dissipation);
        }
    }
    Ok(LyapunovReport {
        lambda_probe: options.lambda_probe,
        slack,
        violations,
        max_lambda: feasible.then_some(max_lambda),
        interior_samples: samples.len() - 2,
    })
}
