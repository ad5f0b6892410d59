use serde::{Deserialize, Serialize};

use super::{rk4_step, RunError, StepControl};
use crate::diagnostics::{
    decay_target_norm, energy_report, track_negative_norms_with, window_functionals, DecayTarget, EnergyReport,
    NegativeSpace, NormTrack, WindowFunctionals, DEFAULT_EPSILON, DEFAULT_ETA,
};
use crate::model::{constraint_residual, make_initial_data, project_constraints, InitialDataSpec, ModelError, ModelParams, PlasmaState};
use crate::spectral::{Grid, ZeroModeRule};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points_per_axis: usize,
    pub box_length: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid, RunError> {
        Grid::new(self.points_per_axis, self.box_length).map_err(|e| RunError::Config(format!("grid: {e}")))
    }
}

/// What to record at each sample time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRequest {
    /// Order `N` of `E_N`, `D_N`.
    pub energy_order: u32,
    /// Window levels `k` for the windowed functionals.
    pub window_levels: Vec<u32>,
    pub epsilon: f64,
    pub eta: f64,
    pub negative_norms: Vec<(f64, NegativeSpace)>,
    /// `||grad^k target||` series.
    pub decay_series: Vec<(DecayTarget, u32)>,
}

impl Default for DiagnosticsRequest {
    fn default() -> Self {
        Self {
            energy_order: 3,
            window_levels: vec![0],
            epsilon: DEFAULT_EPSILON,
            eta: DEFAULT_ETA,
            negative_norms: vec![(0.5, NegativeSpace::NegSobolev)],
            decay_series: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub model: ModelParams,
    pub initial: InitialDataSpec,
    pub control: StepControl,
    pub diagnostics: DiagnosticsRequest,
}

impl RunConfig {
    /// Checks every parameter against the preconditions of the module that
    /// consumes it.
    pub fn validate(&self) -> Result<Grid, RunError> {
        let grid = self.grid.build()?;
        self.initial
            .validate(&grid)
            .map_err(|e| RunError::Config(format!("initial: {e}")))?;
        self.control.validate().map_err(RunError::Config)?;
        let d = &self.diagnostics;
        let max = (grid.points_per_axis() / 3) as u32;
        if d.energy_order > max {
            return Err(RunError::Config(format!(
                "diagnostics.energy_order = {} exceeds the grid limit {max}",
                d.energy_order
            )));
        }
        if let Some(k) = d.window_levels.iter().find(|k| **k + 2 > max) {
            return Err(RunError::Config(format!(
                "diagnostics.window_levels: k = {k} needs order {} > {max}",
                k + 2
            )));
        }
        if !(d.epsilon >= 0.0 && d.eta >= 0.0) {
            return Err(RunError::Config("diagnostics.epsilon and eta must be nonnegative".into()));
        }
        if let Some((s, space)) = d.negative_norms.iter().find(|(s, space)| !space.admits(*s)) {
            return Err(RunError::Config(format!(
                "diagnostics.negative_norms: s = {s} outside the range of {space:?}"
            )));
        }
        if let Some((_, k)) = d.decay_series.iter().find(|(_, k)| *k > max) {
            return Err(RunError::Config(format!("diagnostics.decay_series: k = {k} exceeds {max}")));
        }
        Ok(grid)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub step: u64,
    pub energy: EnergyReport,
    pub windows: Vec<WindowFunctionals>,
    pub negative: Vec<NormTrack>,
    /// Aligned with [`DiagnosticsRequest::decay_series`].
    pub decay: Vec<f64>,
    /// Largest `|mean|` over the eleven fields.
    pub max_mean: f64,
    /// `||state||_{L2}`, the scale for relative residuals.
    pub state_norm: f64,
}

impl SampleRow {
    pub fn time(&self) -> f64 {
        self.energy.time
    }
}

/// Constraint residuals just before a projection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionEvent {
    pub step: u64,
    pub time: f64,
    pub residual_e: f64,
    pub residual_b: f64,
    pub state_norm: f64,
}

impl ProjectionEvent {
    pub fn relative(&self) -> f64 {
        if self.state_norm == 0.0 {
            0.0
        } else {
            self.residual_e.max(self.residual_b) / self.state_norm
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VacuumEvent {
    pub time: f64,
    pub min_density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub samples: Vec<SampleRow>,
    pub projections: Vec<ProjectionEvent>,
    pub vacuum: Option<VacuumEvent>,
    pub steps: u64,
}

pub fn sample(state: &PlasmaState, step: u64, request: &DiagnosticsRequest) -> Result<SampleRow, RunError> {
    let energy = energy_report(state, request.energy_order)?;
    let windows = request
        .window_levels
        .iter()
        .map(|k| window_functionals(state, *k, request.epsilon, request.eta))
        .collect::<Result<_, _>>()?;
    let negative = request
        .negative_norms
        .iter()
        .map(|(s, space)| track_negative_norms_with(state, *s, *space, ZeroModeRule::Annihilate))
        .collect::<Result<_, _>>()?;
    let decay = request
        .decay_series
        .iter()
        .map(|(target, k)| decay_target_norm(state, *target, *k))
        .collect();
    Ok(SampleRow {
        step,
        energy,
        windows,
        negative,
        decay,
        max_mean: state.max_mean(),
        state_norm: state.l2_norm(),
    })
}

pub fn run_simulation(config: &RunConfig) -> Result<TrajectoryRecord, RunError> {
    run_simulation_with(config, |_, _| Ok(()))
}

/// As [`run_simulation`]; `observer` sees the state and row at every sample.
pub fn run_simulation_with(
    config: &RunConfig,
    mut observer: impl FnMut(&PlasmaState, &SampleRow) -> Result<(), RunError>,
) -> Result<TrajectoryRecord, RunError> {
    let grid = config.validate()?;
    let state = make_initial_data(&config.initial, &grid)?;
    run_from_state(state, config, &mut observer)
}

pub fn run_from_state(
    mut state: PlasmaState,
    config: &RunConfig,
    observer: &mut dyn FnMut(&PlasmaState, &SampleRow) -> Result<(), RunError>,
) -> Result<TrajectoryRecord, RunError> {
    let control = &config.control;
    let request = &config.diagnostics;
    let mut record = TrajectoryRecord {
        samples: Vec::new(),
        projections: Vec::new(),
        vacuum: None,
        steps: 0,
    };
    let t0 = state.time;
    let t_end = t0 + control.t_end;
    let row = sample(&state, 0, request)?;
    observer(&state, &row)?;
    record.samples.push(row);

    let mut sample_index = 1u64;
    let next_sample = |i: u64| (t0 + i as f64 * control.sample_every).min(t_end);
    let eps = 1e-12 * control.t_end.max(1.0);
    while state.time < t_end - eps {
        let target = next_sample(sample_index);
        let mut dt = control.stable_dt(&state);
        let landing = state.time + dt >= target - eps;
        if landing {
            dt = target - state.time;
        }
        state = match rk4_step(&state, dt, &config.model) {
            Ok(s) => s,
            Err(ModelError::Vacuum { time, min_density }) => {
                record.vacuum = Some(VacuumEvent { time, min_density });
                break;
            }
            Err(e) => return Err(e.into()),
        };
        if landing {
            state.time = target;
        }
        record.steps += 1;
        if record.steps % control.reproject_every == 0 {
            let (residual_e, residual_b) = constraint_residual(&state);
            record.projections.push(ProjectionEvent {
                step: record.steps,
                time: state.time,
                residual_e,
                residual_b,
                state_norm: state.l2_norm(),
            });
            state = project_constraints(&state);
        }
        if landing {
            let row = sample(&state, record.steps, request)?;
            observer(&state, &row)?;
            record.samples.push(row);
            sample_index += 1;
        }
    }
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ComponentMask, Profile};
    use std::f64::consts::PI;

    fn config(t_end: f64) -> RunConfig {
        RunConfig {
            grid: GridSpec { points_per_axis: 12, box_length: 4.0 * PI },
            model: ModelParams::default(),
            initial: InitialDataSpec {
                amplitude: 1e-3,
                profile: Profile::BandLimitedRandom { max_mode: 3, seed: 5 },
                mask: ComponentMask::ALL,
                normalization: None,
            },
            control: StepControl {
                max_dt: 0.05,
                reproject_every: 7,
                t_end,
                sample_every: 0.25,
                ..Default::default()
            },
            diagnostics: DiagnosticsRequest {
                energy_order: 2,
                window_levels: vec![0],
                decay_series: vec![(DecayTarget::Full, 0), (DecayTarget::Density, 1)],
                ..Default::default()
            },
        }
    }

    #[test]
    fn zero_horizon_gives_initial_row() {
        let c = config(0.0);
        let rec = run_simulation(&c).unwrap();
        assert_eq!(rec.samples.len(), 1);
        assert_eq!(rec.steps, 0);
        let s0 = make_initial_data(&c.initial, &c.validate().unwrap()).unwrap();
        assert_eq!(rec.samples[0], sample(&s0, 0, &c.diagnostics).unwrap());
    }

    #[test]
    fn samples_land_on_cadence_and_run_is_deterministic() {
        let c = config(1.0);
        let a = run_simulation(&c).unwrap();
        let times: Vec<f64> = a.samples.iter().map(|r| r.time()).collect();
        assert_eq!(times, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(!a.projections.is_empty());
        assert!(a.projections.iter().all(|p| p.relative() < 1e-8));
        let b = run_simulation(&c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_config_names_field() {
        let mut c = config(1.0);
        c.diagnostics.window_levels = vec![3];
        let err = run_simulation(&c).unwrap_err().to_string();
        assert!(err.contains("window_levels"), "{err}");
        let mut c = config(1.0);
        c.grid.points_per_axis = 13;
        assert!(run_simulation(&c).unwrap_err().to_string().contains("grid"));
    }

    #[test]
    fn large_data_records_vacuum() {
        let mut c = config(5.0);
        c.initial.amplitude = 3.0;
        c.initial.mask = ComponentMask { n: true, ..ComponentMask::NONE };
        let rec = run_simulation(&c).unwrap();
        let v = rec.vacuum.expect("vacuum event");
        assert!(v.min_density <= 0.0);
    }
}
