use super::{Group, PlasmaState};
use crate::spectral::SpectralField;

/// Inhomogeneous Sobolev norm with integer levels summed:
/// `||f||_{H^s}^2 = sum_{l <= floor(s)} ||Lambda^l f||^2 (+ ||Lambda^s f||^2 if s is fractional)`.
pub fn sobolev_norm(components: &[&SpectralField], order: f64) -> f64 {
    let grid = components[0].grid();
    let top = order.floor() as u32;
    let fractional = order.fract() != 0.0;
    let weight = |r: f64| {
        let mut w: f64 = (0..=top).map(|l| r.powi(2 * l as i32)).sum();
        if fractional {
            w += r.powf(2.0 * order);
        }
        w
    };
    components
        .iter()
        .map(|f| f.weighted_norm_sqr(|i| weight(grid.wavenumber_magnitude(i))))
        .sum::<f64>()
        .sqrt()
}

/// `||(n, u, theta)||` in `H^s`, as the sum of the three group norms.
fn fluid_norm(state: &PlasmaState, order: f64) -> f64 {
    [Group::Density, Group::Velocity, Group::Temperature]
        .iter()
        .map(|g| sobolev_norm(&state.group(*g), order))
        .sum()
}

fn grad_b(state: &PlasmaState) -> f64 {
    state.level_norm_sqr(&[Group::Magnetic], 1.0).sqrt()
}

/// Nonlinear bound factors of the windowed energy estimates at level `k`:
///
/// ```text
/// F = ||(n,u,theta)||_{H^{k/2+2} ∩ H^3} + ||(n,u,theta)||_{H^3}^2 + ||grad B||
/// G = ||(n,u,theta)||_{H^{k/2+1} ∩ H^3}^2 + ||grad B||^2
/// ```
///
/// The intersection norm is the larger of the two norms.
pub fn bound_factors(state: &PlasmaState, k: u32) -> (f64, f64) {
    let h3 = fluid_norm(state, 3.0);
    let upper = fluid_norm(state, k as f64 / 2.0 + 2.0).max(h3);
    let lower = fluid_norm(state, k as f64 / 2.0 + 1.0).max(h3);
    let gb = grad_b(state);
    (upper + h3 * h3 + gb, lower * lower + gb * gb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, RealField};
    use std::f64::consts::PI;

    #[test]
    fn equilibrium_factors_vanish() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        assert_eq!(bound_factors(&PlasmaState::equilibrium(&g), 3), (0.0, 0.0));
    }

    #[test]
    fn single_density_mode_closed_form() {
        // |xi| = 1: ||n||_{H^m}^2 = (m + 1) ||n||^2, so for k = 0
        // F = 2 ||n|| + 4 ||n||^2 and G = 4 ||n||^2.
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let delta = 1e-2;
        let mut s = PlasmaState::equilibrium(&g);
        s.n = RealField::from_fn(&g, |x| delta * x[0].sin()).to_spectral();
        let l2 = delta * (4.0 * PI.powi(3)).sqrt();
        let (f, gg) = bound_factors(&s, 0);
        assert!((f - (2.0 * l2 + 4.0 * l2 * l2)).abs() < 1e-12 * f);
        assert!((gg - 4.0 * l2 * l2).abs() < 1e-12 * gg);
    }

    #[test]
    fn half_integer_order() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x| (2.0 * x[1]).cos()).to_spectral();
        let l2sq = f.l2_norm_sqr();
        // 1 + 4 + 16 + 4^2.5
        let expected = (l2sq * (1.0 + 4.0 + 16.0 + 32.0)).sqrt();
        assert!((sobolev_norm(&[&f], 2.5) - expected).abs() < 1e-12 * expected);
    }
}
