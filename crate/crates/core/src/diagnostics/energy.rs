use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::model::{constraint_residual, Group, PlasmaState};
use crate::spectral::to_real_pair;

/// Energy, dissipation and per-level norms of one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub time: f64,
    pub order: u32,
    /// `E_N = sum_{l=0}^{N} ||grad^l (n, u, theta, E, B)||^2`.
    pub energy: f64,
    /// `D_N = sum_{l<=N} ||grad^l (n,u,theta)||^2 + sum_{l<=N-1} ||grad^l E||^2
    ///      + sum_{1<=l<=N-1} ||grad^l B||^2`.
    pub dissipation: f64,
    /// `||grad^l (n, u, theta, E, B)||` for `l = 0..=N`.
    pub level_norms: Vec<f64>,
    pub residual_e: f64,
    pub residual_b: f64,
    /// `min(1 + n)` over the grid.
    pub min_density: f64,
    /// `min(1 + theta)` over the grid.
    pub min_temperature: f64,
}

impl EnergyReport {
    /// The pointwise bounds `1/2 <= 1 + n, 1 + theta <= 3/2` of the
    /// small-data regime hold on the lower side.
    pub fn within_small_data_bounds(&self) -> bool {
        self.min_density >= 0.5 && self.min_temperature >= 0.5
    }
}

/// Squared level norms `||Lambda^l f||^2`, `l = 0..=order`, summed over the
/// fields of each group, in [`Group::ALL`] order.
pub fn group_level_norms_sqr(state: &PlasmaState, order: u32) -> [Vec<f64>; 5] {
    let grid = state.grid();
    let volume = grid.volume();
    let levels = order as usize + 1;
    Group::ALL.map(|g| {
        let mut acc = vec![0.0; levels];
        for f in state.group(g) {
            for (i, c) in f.coefficients().iter().enumerate() {
                let e = c.norm_sqr();
                if e == 0.0 {
                    continue;
                }
                let xi = grid.wavevector(i);
                let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                let mut w = 1.0;
                for a in acc.iter_mut() {
                    *a += w * e;
                    w *= r2;
                }
            }
        }
        acc.iter_mut().for_each(|a| *a *= volume);
        acc
    })
}

pub(crate) fn check_resolution(state: &PlasmaState, order: u32) -> Result<(), DiagnosticsError> {
    let max = (state.grid().points_per_axis() / 3) as u32;
    if order > max {
        return Err(DiagnosticsError::Resolution { order, max });
    }
    Ok(())
}

pub fn energy_report(state: &PlasmaState, order: u32) -> Result<EnergyReport, DiagnosticsError> {
    check_resolution(state, order)?;
    let levels = group_level_norms_sqr(state, order);
    let [n, u, th, e, b] = &levels;
    let n_ord = order as usize;
    let level_norms: Vec<f64> = (0..=n_ord)
        .map(|l| (n[l] + u[l] + th[l] + e[l] + b[l]).sqrt())
        .collect();
    let energy = (0..=n_ord).map(|l| n[l] + u[l] + th[l] + e[l] + b[l]).sum();
    let dissipation = (0..=n_ord).map(|l| n[l] + u[l] + th[l]).sum::<f64>()
        + (0..n_ord).map(|l| e[l]).sum::<f64>()
        + (1..n_ord).map(|l| b[l]).sum::<f64>();
    let (residual_e, residual_b) = constraint_residual(state);
    let (nr, tr) = to_real_pair(&state.n, &state.theta);
    Ok(EnergyReport {
        time: state.time,
        order,
        energy,
        dissipation,
        level_norms,
        residual_e,
        residual_b,
        min_density: 1.0 + nr.min(),
        min_temperature: 1.0 + tr.min(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, RealField};
    use std::f64::consts::PI;

    #[test]
    fn equilibrium_is_zero() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let r = energy_report(&PlasmaState::equilibrium(&g), 4).unwrap();
        assert_eq!((r.energy, r.dissipation), (0.0, 0.0));
        assert_eq!((r.min_density, r.min_temperature), (1.0, 1.0));
    }

    #[test]
    fn single_density_mode() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let delta = 1e-3;
        let mut s = PlasmaState::equilibrium(&g);
        s.n = RealField::from_fn(&g, |x| delta * x[0].sin()).to_spectral();
        let r = energy_report(&s, 3).unwrap();
        let expected = 4.0 * delta * delta * (2.0 * PI).powi(3) / 2.0;
        assert!((r.energy - expected).abs() < 1e-12 * expected);
        assert!((r.dissipation - expected).abs() < 1e-12 * expected);
        let sum: f64 = r.level_norms.iter().map(|v| v * v).sum();
        assert!((sum - r.energy).abs() < 1e-12 * r.energy);
    }

    #[test]
    fn magnetic_mode_shows_regularity_loss() {
        // B = (0, 0, cos(2 x1)): level l contributes 4^l ||B||^2 to E_N; D_N keeps l = 1..N-1
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.b[2] = RealField::from_fn(&g, |x| (2.0 * x[0]).cos()).to_spectral();
        let base = s.b[2].l2_norm_sqr();
        let r = energy_report(&s, 3).unwrap();
        let e: f64 = (0..=3).map(|l| 4f64.powi(l)).sum::<f64>() * base;
        let d: f64 = (1..3).map(|l| 4f64.powi(l)).sum::<f64>() * base;
        assert!((r.energy - e).abs() < 1e-12 * e);
        assert!((r.dissipation - d).abs() < 1e-12 * d);
        assert!(r.dissipation < r.energy);
    }

    #[test]
    fn resolution_guard() {
        let g = Grid::new(12, 2.0 * PI).unwrap();
        assert!(matches!(
            energy_report(&PlasmaState::equilibrium(&g), 5),
            Err(DiagnosticsError::Resolution { .. })
        ));
    }
}
