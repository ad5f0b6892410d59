use serde::{Deserialize, Serialize};

use super::energy::{check_resolution, group_level_norms_sqr};
use super::DiagnosticsError;
use crate::model::PlasmaState;
use crate::spectral::{apply_symbol, curl, gradient, l2_pairing, MultiplierSymbol, SpectralField};

pub const DEFAULT_EPSILON: f64 = 0.05;
pub const DEFAULT_ETA: f64 = 0.1;

/// Energy and dissipation restricted to derivative levels `k..=k+2`, the
/// interactive cross terms and the instant energy built from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowFunctionals {
    pub time: f64,
    pub k: u32,
    /// `sum_{l=k}^{k+2} ||grad^l (n, u, theta, E, B)||^2`.
    pub energy: f64,
    /// `sum_{l=k}^{k+2} ||grad^l (n,u,theta)||^2 + sum_{l=k}^{k+1} ||grad^l E||^2 + ||grad^{k+1} B||^2`.
    pub dissipation: f64,
    /// `sum_{l=k}^{k+1} int grad^l u . grad grad^l n`.
    pub cross_n: f64,
    /// `sum_{l=k}^{k+1} int grad^l u . grad^l E`.
    pub cross_e: f64,
    /// `int grad^k E . grad^k curl B`.
    pub cross_b: f64,
    pub epsilon: f64,
    pub eta: f64,
    /// `energy + epsilon (cross_n + cross_e - eta cross_b)`.
    pub instant_energy: f64,
}

fn lambda(f: &SpectralField, level: u32) -> SpectralField {
    if level == 0 {
        return f.clone();
    }
    apply_symbol(f, MultiplierSymbol::power(level as f64)).expect("positive order never fails")
}

/// `sum_i int Lambda^l a_i Lambda^l b_i`, which equals `int grad^l a . grad^l b`.
fn level_pairing(a: &[SpectralField], b: &[SpectralField], level: u32) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| l2_pairing(&lambda(x, level), &lambda(y, level)).expect("same grid"))
        .sum()
}

pub fn window_functionals(
    state: &PlasmaState,
    k: u32,
    epsilon: f64,
    eta: f64,
) -> Result<WindowFunctionals, DiagnosticsError> {
    check_resolution(state, k + 2)?;
    if !(epsilon >= 0.0 && eta >= 0.0) {
        return Err(DiagnosticsError::Parameter(format!(
            "epsilon and eta must be nonnegative, got {epsilon}, {eta}"
        )));
    }
    let levels = group_level_norms_sqr(state, k + 2);
    let [n, u, th, e, b] = &levels;
    let (lo, hi) = (k as usize, k as usize + 2);
    let energy = (lo..=hi).map(|l| n[l] + u[l] + th[l] + e[l] + b[l]).sum();
    let dissipation = (lo..=hi).map(|l| n[l] + u[l] + th[l]).sum::<f64>()
        + (lo..hi).map(|l| e[l]).sum::<f64>()
        + b[lo + 1];

    let grad_n = gradient(&state.n);
    let cross_n = (k..=k + 1).map(|l| level_pairing(&state.u, &grad_n, l)).sum();
    let cross_e = (k..=k + 1).map(|l| level_pairing(&state.u, &state.e, l)).sum();
    let cross_b = level_pairing(&state.e, &curl(&state.b), k);
    Ok(WindowFunctionals {
        time: state.time,
        k,
        energy,
        dissipation,
        cross_n,
        cross_e,
        cross_b,
        epsilon,
        eta,
        instant_energy: energy + epsilon * (cross_n + cross_e - eta * cross_b),
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
        let w = window_functionals(&PlasmaState::equilibrium(&g), 1, DEFAULT_EPSILON, DEFAULT_ETA).unwrap();
        assert_eq!(
            (w.energy, w.dissipation, w.cross_n, w.cross_e, w.cross_b, w.instant_energy),
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn gradient_velocity_pairs_positively_with_density() {
        // u = grad g, n = g: cross_n = sum_{l=k}^{k+1} ||grad^{l+1} g||^2
        let grid = Grid::new(16, 2.0 * PI).unwrap();
        let g = RealField::from_fn(&grid, |x| (2.0 * x[0] - x[1]).cos()).to_spectral();
        let mut s = PlasmaState::equilibrium(&grid);
        s.u = gradient(&g);
        s.n = g.clone();
        let r2: f64 = 5.0;
        let base = g.l2_norm_sqr();
        for k in 0..3u32 {
            let w = window_functionals(&s, k, DEFAULT_EPSILON, DEFAULT_ETA).unwrap();
            let expected = base * (r2.powi(k as i32 + 1) + r2.powi(k as i32 + 2));
            assert!(w.cross_n > 0.0);
            assert!((w.cross_n - expected).abs() < 1e-12 * expected);
        }
    }
}
