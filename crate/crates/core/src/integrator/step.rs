use serde::{Deserialize, Serialize};

use crate::model::{rhs, ModelError, ModelParams, PlasmaState};
use crate::spectral::to_real_pair;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub cfl_number: f64,
    pub max_dt: f64,
    /// Steps between constraint projections.
    pub reproject_every: u64,
    pub t_end: f64,
    /// Diagnostic cadence in time units.
    pub sample_every: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            cfl_number: 0.4,
            max_dt: 0.05,
            reproject_every: 50,
            t_end: 1.0,
            sample_every: 0.1,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.cfl_number > 0.0 && self.cfl_number <= 1.0) {
            return Err(format!("control.cfl_number must be in (0, 1], got {}", self.cfl_number));
        }
        if !(self.max_dt > 0.0 && self.max_dt.is_finite()) {
            return Err(format!("control.max_dt must be positive, got {}", self.max_dt));
        }
        if self.reproject_every == 0 {
            return Err("control.reproject_every must be at least 1".into());
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(format!("control.t_end must be nonnegative, got {}", self.t_end));
        }
        if !(self.sample_every > 0.0 && self.sample_every.is_finite()) {
            return Err(format!("control.sample_every must be positive, got {}", self.sample_every));
        }
        Ok(())
    }

    /// `cfl * dx / (1 + max|u| + max sqrt(1 + theta) + 1)`, capped at `max_dt`.
    pub fn stable_dt(&self, state: &PlasmaState) -> f64 {
        let (u0, u1) = to_real_pair(&state.u[0], &state.u[1]);
        let (u2, th) = to_real_pair(&state.u[2], &state.theta);
        let speed = u0
            .values()
            .iter()
            .zip(u1.values())
            .zip(u2.values())
            .map(|((a, b), c)| (a * a + b * b + c * c).sqrt())
            .fold(0.0, f64::max);
        let sound = th.values().iter().map(|t| (1.0 + t).max(0.0).sqrt()).fold(0.0, f64::max);
        let bound = 1.0 + speed + sound + 1.0;
        (self.cfl_number * state.grid().spacing() / bound).min(self.max_dt)
    }
}

/// Classical four-stage Runge-Kutta step.
pub fn rk4_step(state: &PlasmaState, dt: f64, params: &ModelParams) -> Result<PlasmaState, ModelError> {
    assert!(dt > 0.0, "rk4_step needs dt > 0, got {dt}");
    let stage = |base: &PlasmaState, k: &PlasmaState, h: f64| {
        let mut s = base.clone();
        s.axpy(h, k);
        s.time = base.time + h;
        s
    };
    let k1 = rhs(state, params)?;
    let k2 = rhs(&stage(state, &k1, 0.5 * dt), params)?;
    let k3 = rhs(&stage(state, &k2, 0.5 * dt), params)?;
    let k4 = rhs(&stage(state, &k3, dt), params)?;
    let mut next = state.clone();
    next.axpy(dt / 6.0, &k1);
    next.axpy(dt / 3.0, &k2);
    next.axpy(dt / 3.0, &k3);
    next.axpy(dt / 6.0, &k4);
    next.time = state.time + dt;
    Ok(next)
}

/// Steps from `state.time` to `t` with uniform steps no longer than `dt`.
pub fn evolve_to(state: &PlasmaState, t: f64, dt: f64, params: &ModelParams) -> Result<PlasmaState, ModelError> {
    let span = t - state.time;
    if span <= 0.0 {
        return Ok(state.clone());
    }
    let steps = (span / dt).ceil().max(1.0) as u64;
    let h = span / steps as f64;
    let start = state.time;
    let mut s = state.clone();
    for i in 0..steps {
        s = rk4_step(&s, h, params)?;
        s.time = start + (i + 1) as f64 * h;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, RealField};
    use std::f64::consts::PI;

    #[test]
    fn equilibrium_is_fixed() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        for _ in 0..20 {
            s = rk4_step(&s, 0.37, &ModelParams::default()).unwrap();
        }
        assert!(s.is_equilibrium());
        assert!((s.time - 20.0 * 0.37).abs() < 1e-12);
    }

    #[test]
    fn theta_mean_relaxes() {
        // theta = c constant: theta' = -theta exactly (all other terms vanish)
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.theta = RealField::from_fn(&g, |_| 0.1).to_spectral();
        let out = evolve_to(&s, 1.0, 0.01, &ModelParams::default()).unwrap();
        let got = out.theta.mean().re;
        assert!((got - 0.1 * (-1.0f64).exp()).abs() < 1e-10, "{got}");
    }

    #[test]
    fn dt_respects_cfl_and_cap() {
        let g = Grid::new(16, 16.0 * PI).unwrap();
        let s = PlasmaState::equilibrium(&g);
        let c = StepControl { max_dt: 10.0, ..Default::default() };
        let expected = 0.4 * g.spacing() / 3.0;
        assert!((c.stable_dt(&s) - expected).abs() < 1e-15);
        let c = StepControl { max_dt: 0.01, ..Default::default() };
        assert_eq!(c.stable_dt(&s), 0.01);
    }

    #[test]
    fn control_validation() {
        assert!(StepControl::default().validate().is_ok());
        assert!(StepControl { cfl_number: 1.5, ..Default::default() }.validate().is_err());
        assert!(StepControl { reproject_every: 0, ..Default::default() }.validate().is_err());
    }
}
