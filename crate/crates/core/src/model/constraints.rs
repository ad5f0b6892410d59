use num_complex::Complex64;

use super::PlasmaState;
use crate::spectral::{divergence, SpectralField};

/// `(||div E + n||_{L2}, ||div B||_{L2})`.
pub fn constraint_residual(state: &PlasmaState) -> (f64, f64) {
    let mut gauss = divergence(&state.e);
    gauss.axpy(1.0, &state.n);
    let r_e = gauss.l2_norm_sqr().sqrt();
    let r_b = divergence(&state.b).l2_norm_sqr().sqrt();
    (r_e, r_b)
}

/// Replaces the longitudinal part of `E` by the unique gradient field with
/// `div E = -n` and removes the longitudinal part of `B`. The transverse
/// parts of `E` and `B`, the means, and `n, u, theta` are left untouched.
pub fn project_constraints(state: &PlasmaState) -> PlasmaState {
    let grid = state.grid().clone();
    let mut out = state.clone();
    let iu = Complex64::new(0.0, 1.0);
    let n = state.n.coefficients();
    let (e_in, b_in) = (coeff3(&state.e), coeff3(&state.b));
    let mut e_out = [vec![Complex64::default(); grid.len()], vec![Complex64::default(); grid.len()], vec![Complex64::default(); grid.len()]];
    let mut b_out = e_out.clone();
    for i in 0..grid.len() {
        let xi = grid.derivative_wavevector(i);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            for a in 0..3 {
                e_out[a][i] = e_in[a][i];
                b_out[a][i] = b_in[a][i];
            }
            continue;
        }
        let e_par = (xi[0] * e_in[0][i] + xi[1] * e_in[1][i] + xi[2] * e_in[2][i]) / k2;
        let b_par = (xi[0] * b_in[0][i] + xi[1] * b_in[1][i] + xi[2] * b_in[2][i]) / k2;
        // div(i xi n / |xi|^2) = -n
        let grad_part = iu * n[i] / k2;
        for a in 0..3 {
            e_out[a][i] = e_in[a][i] - xi[a] * e_par + xi[a] * grad_part;
            b_out[a][i] = b_in[a][i] - xi[a] * b_par;
        }
    }
    for (a, (e, b)) in e_out.into_iter().zip(b_out).enumerate() {
        out.e[a] = SpectralField::from_coefficients(&grid, e).expect("grid-sized");
        out.b[a] = SpectralField::from_coefficients(&grid, b).expect("grid-sized");
    }
    out
}

fn coeff3(v: &[SpectralField; 3]) -> [&[Complex64]; 3] {
    [v[0].coefficients(), v[1].coefficients(), v[2].coefficients()]
}

/// Electric field `E = -grad Delta^{-1} n`, the curl-free solution of
/// `div E = -n`.
pub fn electric_field_from_density(n: &SpectralField) -> [SpectralField; 3] {
    let grid = n.grid().clone();
    let iu = Complex64::new(0.0, 1.0);
    [0, 1, 2].map(|a| {
        n.map_modes(|i| {
            let xi = grid.derivative_wavevector(i);
            let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            if k2 == 0.0 {
                Complex64::default()
            } else {
                iu * xi[a] / k2
            }
        })
    })
}

/// Leray projection onto divergence-free fields.
pub fn leray_project(v: &[SpectralField; 3]) -> [SpectralField; 3] {
    let grid = v[0].grid().clone();
    let c = coeff3(v);
    let mut out = [v[0].clone(), v[1].clone(), v[2].clone()];
    for i in 0..grid.len() {
        let xi = grid.derivative_wavevector(i);
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        if k2 == 0.0 {
            continue;
        }
        let par = (xi[0] * c[0][i] + xi[1] * c[1][i] + xi[2] * c[2][i]) / k2;
        for (a, f) in out.iter_mut().enumerate() {
            f.coefficients_mut()[i] = c[a][i] - xi[a] * par;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{gradient, Grid, RealField};
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(16, 2.0 * PI).unwrap()
    }

    fn smooth(g: &Grid, a: f64, b: f64) -> SpectralField {
        RealField::from_fn(g, |x| (a * x[0] + x[1]).sin() * (b * x[2]).cos() + (x[1] - 2.0 * x[2]).cos() * 0.4)
            .to_spectral()
    }

    #[test]
    fn equilibrium_has_no_residual() {
        assert_eq!(constraint_residual(&PlasmaState::equilibrium(&grid())), (0.0, 0.0));
    }

    #[test]
    fn projection_is_idempotent_and_exact() {
        let g = grid();
        let mut s = PlasmaState::equilibrium(&g);
        s.n = smooth(&g, 1.0, 2.0);
        s.e = [smooth(&g, 2.0, 1.0), smooth(&g, 3.0, 1.0), smooth(&g, 1.0, 3.0)];
        s.b = [smooth(&g, 1.0, 1.0), smooth(&g, 2.0, 2.0), smooth(&g, 3.0, 2.0)];
        let p = project_constraints(&s);
        let (re, rb) = constraint_residual(&p);
        assert!(re < 1e-13 && rb < 1e-13, "{re} {rb}");
        let pp = project_constraints(&p);
        for (a, b) in pp.fields().iter().zip(p.fields()) {
            assert!(a.sub(b).rms() <= 1e-14 * (1.0 + b.rms()));
        }
        // n, u, theta untouched
        assert_eq!(p.n, s.n);
    }

    #[test]
    fn gradient_pollution_is_removed() {
        let g = grid();
        let mut s = PlasmaState::equilibrium(&g);
        s.n = smooth(&g, 1.0, 1.0);
        s.n.remove_mean();
        s.e = electric_field_from_density(&s.n);
        let (re0, _) = constraint_residual(&s);
        assert!(re0 < 1e-12);
        let pollution = gradient(&smooth(&g, 2.0, 3.0));
        for a in 0..3 {
            s.e[a].axpy(1.0, &pollution[a]);
        }
        assert!(constraint_residual(&s).0 > 1.0);
        let p = project_constraints(&s);
        assert!(constraint_residual(&p).0 < 1e-13);
    }
}
