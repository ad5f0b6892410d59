use serde::{Deserialize, Serialize};

use crate::integrator::{evolve_to, linear_oracle_evolve, rk4_step, RunError, StepControl};
use crate::model::{
    constraint_residual, make_initial_data, project_constraints, ComponentMask, InitialDataSpec, ModelParams,
    PlasmaState, Profile,
};
use crate::spectral::Grid;

fn random_state(points: usize, box_length: f64, amplitude: f64, max_mode: u32, seed: u64) -> Result<PlasmaState, RunError> {
    let grid = Grid::new(points, box_length).map_err(|e| RunError::Config(format!("grid: {e}")))?;
    let spec = InitialDataSpec {
        amplitude,
        profile: Profile::BandLimitedRandom { max_mode, seed },
        mask: ComponentMask::ALL,
        normalization: None,
    };
    Ok(make_initial_data(&spec, &grid)?)
}

fn distance(a: &PlasmaState, b: &PlasmaState) -> f64 {
    let mut d = a.clone();
    d.axpy(-1.0, b);
    d.l2_norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub points_per_axis: usize,
    pub box_length: f64,
    pub amplitude: f64,
    pub max_mode: u32,
    pub t: f64,
    pub dt: f64,
    pub seed: u64,
}

impl Default for OracleCheck {
    fn default() -> Self {
        Self {
            points_per_axis: 16,
            box_length: 8.0 * std::f64::consts::PI,
            amplitude: 1e-8,
            max_mode: 4,
            t: 1.0,
            dt: 0.01,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCheckReport {
    pub check: OracleCheck,
    /// `||nonlinear - oracle|| / ||oracle||` at time `t`.
    pub relative_error: f64,
}

/// Steps small random data with the full nonlinear RK4 and compares with
/// the per-mode exponential of the linearized system.
pub fn oracle_equivalence(check: &OracleCheck, params: &ModelParams) -> Result<OracleCheckReport, RunError> {
    let s0 = random_state(check.points_per_axis, check.box_length, check.amplitude, check.max_mode, check.seed)?;
    let stepped = evolve_to(&s0, check.t, check.dt, params)?;
    let exact = linear_oracle_evolve(&s0, check.t, params);
    Ok(OracleCheckReport {
        check: *check,
        relative_error: distance(&stepped, &exact) / exact.l2_norm(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCheck {
    pub points_per_axis: usize,
    pub box_length: f64,
    pub amplitude: f64,
    pub max_mode: u32,
    pub t: f64,
    /// Coarse step; the runs use `dt`, `dt/2` and the reference `dt/8`.
    pub dt: f64,
    pub seed: u64,
}

impl Default for ConvergenceCheck {
    fn default() -> Self {
        Self {
            points_per_axis: 16,
            box_length: 8.0 * std::f64::consts::PI,
            amplitude: 1e-2,
            max_mode: 4,
            t: 0.5,
            dt: 0.05,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub check: ConvergenceCheck,
    pub error_coarse: f64,
    pub error_fine: f64,
    /// `log2(error_coarse / error_fine)`.
    pub order: f64,
}

/// Self-convergence of RK4 against a `dt/8` reference.
pub fn self_convergence_order(check: &ConvergenceCheck, params: &ModelParams) -> Result<ConvergenceReport, RunError> {
    let s0 = random_state(check.points_per_axis, check.box_length, check.amplitude, check.max_mode, check.seed)?;
    let coarse = evolve_to(&s0, check.t, check.dt, params)?;
    let fine = evolve_to(&s0, check.t, check.dt / 2.0, params)?;
    let reference = evolve_to(&s0, check.t, check.dt / 8.0, params)?;
    let error_coarse = distance(&coarse, &reference);
    let error_fine = distance(&fine, &reference);
    Ok(ConvergenceReport {
        check: *check,
        error_coarse,
        error_fine,
        order: (error_coarse / error_fine).log2(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub points_per_axis: usize,
    pub box_length: f64,
    pub amplitude: f64,
    pub max_mode: u32,
    pub steps: u64,
    pub control: StepControl,
    pub seed: u64,
}

impl Default for ConstraintCheck {
    fn default() -> Self {
        Self {
            points_per_axis: 32,
            box_length: 16.0 * std::f64::consts::PI,
            amplitude: 1e-3,
            max_mode: 8,
            steps: 1000,
            control: StepControl {
                max_dt: 0.05,
                ..Default::default()
            },
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub check: ConstraintCheck,
    pub projections: usize,
    /// Largest pre-projection `max(r_E, r_B) / ||state||`.
    pub max_relative_residual: f64,
}

/// Takes `steps` CFL-limited RK4 steps, projecting every
/// `control.reproject_every` steps, and records the drift just before each
/// projection and at the final step.
pub fn constraint_conservation(check: &ConstraintCheck, params: &ModelParams) -> Result<ConstraintReport, RunError> {
    check.control.validate().map_err(RunError::Config)?;
    let mut s = random_state(check.points_per_axis, check.box_length, check.amplitude, check.max_mode, check.seed)?;
    let mut worst: f64 = 0.0;
    let mut projections = 0;
    for step in 1..=check.steps {
        let dt = check.control.stable_dt(&s);
        s = rk4_step(&s, dt, params)?;
        if step % check.control.reproject_every == 0 || step == check.steps {
            let (re, rb) = constraint_residual(&s);
            worst = worst.max(re.max(rb) / s.l2_norm());
            s = project_constraints(&s);
            projections += 1;
        }
    }
    Ok(ConstraintReport {
        check: *check,
        projections,
        max_relative_residual: worst,
    })
}
