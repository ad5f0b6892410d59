use nalgebra::{SMatrix, SVector, Schur};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::model::{ModelParams, PlasmaState, FIELD_COUNT};
use crate::spectral::SpectralField;

pub type Matrix11 = SMatrix<Complex64, FIELD_COUNT, FIELD_COUNT>;
pub type Vector11 = SVector<Complex64, FIELD_COUNT>;

/// Row/column of each unknown in a [`ModeMatrix`].
pub const N: usize = 0;
pub const U: [usize; 3] = [1, 2, 3];
pub const THETA: usize = 4;
pub const E: [usize; 3] = [5, 6, 7];
pub const B: [usize; 3] = [8, 9, 10];

/// Linearized system acting on the coefficient vector
/// `(n, u1, u2, u3, theta, E1, E2, E3, B1, B2, B3)` of one Fourier mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeMatrix {
    pub wavenumber: [f64; 3],
    pub matrix: Matrix11,
}

impl ModeMatrix {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let (_, t) = Schur::new(self.matrix).unpack();
        t.diagonal().iter().copied().collect()
    }

    pub fn exp(&self, t: f64) -> Matrix11 {
        (self.matrix * Complex64::from(t)).exp()
    }
}

/// ```text
/// n_t     = -i xi . u
/// u_t     = -u - E - i xi theta - i xi n - u x B_inf
/// theta_t = -theta - (2/3) i xi . u
/// E_t     = i xi x B + u
/// B_t     = -i xi x E
/// ```
pub fn assemble_mode_matrix(xi: [f64; 3], params: &ModelParams) -> ModeMatrix {
    let i = Complex64::i();
    let one = Complex64::from(1.0);
    let binf = params.b_infinity;
    let mut m = Matrix11::zeros();
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        m[(N, U[a])] = -i * xi[a];
        m[(THETA, U[a])] = -i * (2.0 / 3.0) * xi[a];

        m[(U[a], U[a])] = -one;
        m[(U[a], E[a])] = -one;
        m[(U[a], THETA)] = -i * xi[a];
        m[(U[a], N)] = -i * xi[a];
        // -(u x B_inf)_a = -(u_b B_c - u_c B_b)
        m[(U[a], U[b])] -= binf[c];
        m[(U[a], U[c])] += binf[b];

        // (i xi x B)_a = i (xi_b B_c - xi_c B_b)
        m[(E[a], B[c])] = i * xi[b];
        m[(E[a], B[b])] = -i * xi[c];
        m[(E[a], U[a])] = one;

        m[(B[a], E[c])] = -i * xi[b];
        m[(B[a], E[b])] = i * xi[c];
    }
    m[(THETA, THETA)] = -one;
    ModeMatrix { wavenumber: xi, matrix: m }
}

/// Exact solution of the linearized system: each mode is multiplied by
/// `exp(t M(xi))`, using the same discrete wavevectors as the spectral
/// derivatives.
pub fn linear_oracle_evolve(state: &PlasmaState, t: f64, params: &ModelParams) -> PlasmaState {
    assert!(t >= 0.0, "oracle time must be nonnegative, got {t}");
    let grid = state.grid().clone();
    let fields = state.fields();
    let columns: Vec<Vector11> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let v = Vector11::from_fn(|r, _| fields[r].coefficients()[idx]);
            if t == 0.0 || v.iter().all(|c| *c == Complex64::default()) {
                return v;
            }
            assemble_mode_matrix(grid.derivative_wavevector(idx), params).exp(t) * v
        })
        .collect();
    let mut out = state.clone();
    out.time = state.time + t;
    for (r, field) in out.fields_mut().into_iter().enumerate() {
        let coeffs = columns.iter().map(|v| v[r]).collect();
        *field = SpectralField::from_coefficients(&grid, coeffs).expect("grid-sized");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{constraint_residual, make_initial_data, ComponentMask, InitialDataSpec, Profile};
    use crate::spectral::{Grid, RealField};
    use std::f64::consts::PI;

    /// Matches each expected eigenvalue to a distinct computed one.
    fn assert_same_spectrum(mut got: Vec<Complex64>, expected: &[Complex64], tol: f64) {
        assert_eq!(got.len(), expected.len());
        for e in expected {
            let (pos, d) = got
                .iter()
                .map(|g| (g - e).norm())
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < tol, "{e} missing from {got:?}");
            got.swap_remove(pos);
        }
    }

    #[test]
    fn zero_wavenumber_spectrum() {
        let ev = assemble_mode_matrix([0.0; 3], &ModelParams::default()).eigenvalues();
        let r3 = 3f64.sqrt() / 2.0;
        let mut expected = vec![Complex64::new(-1.0, 0.0)];
        expected.extend([Complex64::new(-0.5, -r3); 3]);
        expected.extend([Complex64::new(-0.5, r3); 3]);
        expected.extend([Complex64::default(); 4]);
        assert_same_spectrum(ev, &expected, 1e-12);
    }

    #[test]
    fn reality_symmetry() {
        let params = ModelParams { b_infinity: [0.3, -0.2, 1.0], dealias: true };
        let xi = [0.5, -1.25, 2.0];
        let m = assemble_mode_matrix(xi, &params).matrix;
        let mm = assemble_mode_matrix(xi.map(|x| -x), &params).matrix;
        assert_eq!(mm, m.map(|c| c.conj()));
    }

    #[test]
    fn nonzero_modes_damp_except_constraints() {
        let g = Grid::new(8, 16.0 * PI).unwrap();
        let params = ModelParams::default();
        for idx in 1..g.len() {
            let xi = g.derivative_wavevector(idx);
            if xi == [0.0; 3] {
                continue;
            }
            let ev = assemble_mode_matrix(xi, &params).eigenvalues();
            let zeros = ev.iter().filter(|l| l.norm() < 1e-10).count();
            assert_eq!(zeros, 2, "xi = {xi:?}: {ev:?}");
            assert!(ev.iter().filter(|l| l.norm() >= 1e-10).all(|l| l.re < 0.0), "xi = {xi:?}");
        }
    }

    #[test]
    fn identity_at_time_zero() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.n = RealField::from_fn(&g, |x| x[0].sin()).to_spectral();
        assert_eq!(linear_oracle_evolve(&s, 0.0, &ModelParams::default()), s);
    }

    #[test]
    fn theta_mean_relaxes_exponentially() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.theta.set_coefficient([0, 0, 0], Complex64::new(0.2, 0.0));
        let out = linear_oracle_evolve(&s, 1.5, &ModelParams::default());
        assert!((out.theta.mean().re - 0.2 * (-1.5f64).exp()).abs() < 1e-14);
        assert!(out.n.l2_norm_sqr() == 0.0);
    }

    #[test]
    fn constraints_preserved() {
        let g = Grid::new(16, 4.0 * PI).unwrap();
        let spec = InitialDataSpec {
            amplitude: 1.0,
            profile: Profile::BandLimitedRandom { max_mode: 4, seed: 11 },
            mask: ComponentMask::ALL,
            normalization: None,
        };
        let s = make_initial_data(&spec, &g).unwrap();
        let params = ModelParams { b_infinity: [0.0, 0.0, 0.5], dealias: true };
        let out = linear_oracle_evolve(&s, 2.0, &params);
        let (re, rb) = constraint_residual(&out);
        let scale = s.l2_norm();
        assert!(re < 1e-12 * scale && rb < 1e-12 * scale, "{re} {rb}");
        assert!(out.l2_norm() < scale);
    }
}
