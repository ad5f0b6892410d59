use num_complex::Complex64;
use rayon::prelude::*;

use super::{ModelError, ModelParams, PlasmaState, Tendency};
use crate::spectral::{curl, dealias, divergence, gradient, real_pair_to_spectral, to_real_pair, RealField, SpectralField};

/// Linear part of the perturbation system:
///
/// ```text
/// n_t     = -div u
/// u_t     = -u - E - grad theta - grad n - u x B_inf
/// theta_t = -theta - (2/3) div u
/// E_t     = curl B + u
/// B_t     = -curl E
/// ```
pub fn linear_rhs(state: &PlasmaState, params: &ModelParams) -> Tendency {
    let grid = state.grid().clone();
    let div_u = divergence(&state.u);
    let grad_n = gradient(&state.n);
    let grad_theta = gradient(&state.theta);
    let curl_b = curl(&state.b);
    let curl_e = curl(&state.e);
    let binf = params.b_infinity;

    let mut t = PlasmaState::equilibrium(&grid);
    t.time = state.time;
    t.n = div_u.scaled(-1.0);
    // u x B_inf
    let u = &state.u;
    let cross = [
        u[1].scaled(binf[2]).sub(&u[2].scaled(binf[1])),
        u[2].scaled(binf[0]).sub(&u[0].scaled(binf[2])),
        u[0].scaled(binf[1]).sub(&u[1].scaled(binf[0])),
    ];
    for a in 0..3 {
        let mut ua = u[a].scaled(-1.0);
        ua.axpy(-1.0, &state.e[a]);
        ua.axpy(-1.0, &grad_theta[a]);
        ua.axpy(-1.0, &grad_n[a]);
        ua.axpy(-1.0, &cross[a]);
        t.u[a] = ua;

        let mut ea = curl_b[a].clone();
        ea.axpy(1.0, &u[a]);
        t.e[a] = ea;

        t.b[a] = curl_e[a].scaled(-1.0);
    }
    let mut th = state.theta.scaled(-1.0);
    th.axpy(-2.0 / 3.0, &div_u);
    t.theta = th;
    t
}

/// Full right-hand side of the perturbation system. Products are formed
/// pointwise on the collocation grid, derivatives spectrally; the
/// transformed nonlinear terms are two-thirds truncated when
/// `params.dealias` is set.
///
/// Fails with [`ModelError::Vacuum`] if `min(1 + n) <= 0` on the grid.
pub fn rhs(state: &PlasmaState, params: &ModelParams) -> Result<Tendency, ModelError> {
    let grid = state.grid().clone();

    // Real-space values, two fields per transform.
    let (n, theta) = to_real_pair(&state.n, &state.theta);
    let min_density = 1.0 + n.min();
    if !(min_density > 0.0) {
        return Err(ModelError::Vacuum {
            time: state.time,
            min_density,
        });
    }
    let (u0, u1) = to_real_pair(&state.u[0], &state.u[1]);
    let (u2, b0) = to_real_pair(&state.u[2], &state.b[0]);
    let (b1, b2) = to_real_pair(&state.b[1], &state.b[2]);
    let u = [u0, u1, u2];
    let b = [b0, b1, b2];

    let grad_n = gradient(&state.n);
    let grad_t = gradient(&state.theta);
    let grad_u: Vec<[SpectralField; 3]> = state.u.iter().map(gradient).collect();
    // grad fields in a flat list: dn(3), dtheta(3), du_i/dx_j (9)
    let mut spectral: Vec<&SpectralField> = Vec::with_capacity(15);
    spectral.extend(grad_n.iter());
    spectral.extend(grad_t.iter());
    for g in &grad_u {
        spectral.extend(g.iter());
    }
    spectral.push(&state.n); // padding partner for the odd count
    let reals: Vec<RealField> = spectral
        .chunks(2)
        .flat_map(|pair| {
            let (a, b) = to_real_pair(pair[0], pair[1]);
            [a, b]
        })
        .collect();
    let dn = &reals[0..3];
    let dt = &reals[3..6];
    let du = |i: usize, j: usize| &reals[6 + 3 * i + j];

    let len = grid.len();
    let mut nl: Vec<Vec<f64>> = vec![vec![0.0; len]; 7];
    {
        let (nl_u, rest) = nl.split_at_mut(3);
        let (nl_t, nl_e) = rest.split_at_mut(1);
        let nv = n.values();
        let tv = theta.values();
        let uv = [u[0].values(), u[1].values(), u[2].values()];
        let bv = [b[0].values(), b[1].values(), b[2].values()];
        let dnv = [dn[0].values(), dn[1].values(), dn[2].values()];
        let dtv = [dt[0].values(), dt[1].values(), dt[2].values()];
        let duv: Vec<&[f64]> = (0..9).map(|k| du(k / 3, k % 3).values()).collect();

        let [o_u0, o_u1, o_u2] = nl_u else { unreachable!() };
        let out_t = &mut nl_t[0];
        let [o_e0, o_e1, o_e2] = nl_e else { unreachable!() };

        o_u0.par_iter_mut()
            .zip(o_u1.par_iter_mut())
            .zip(o_u2.par_iter_mut())
            .zip(out_t.par_iter_mut())
            .zip(o_e0.par_iter_mut())
            .zip(o_e1.par_iter_mut())
            .zip(o_e2.par_iter_mut())
            .enumerate()
            .for_each(|(p, ((((((ou0, ou1), ou2), ot), oe0), oe1), oe2))| {
                let nn = nv[p];
                let th = tv[p];
                let uu = [uv[0][p], uv[1][p], uv[2][p]];
                let bb = [bv[0][p], bv[1][p], bv[2][p]];
                let gn = [dnv[0][p], dnv[1][p], dnv[2][p]];
                let gt = [dtv[0][p], dtv[1][p], dtv[2][p]];
                let d = |i: usize, j: usize| duv[3 * i + j][p];
                let div_u = d(0, 0) + d(1, 1) + d(2, 2);
                let u_dot = |g: [f64; 3]| uu[0] * g[0] + uu[1] * g[1] + uu[2] * g[2];

                // ((1 + theta) / (1 + n) - 1) = (theta - n) / (1 + n)
                let coef = (th - nn) / (1.0 + nn);
                let cross = [
                    uu[1] * bb[2] - uu[2] * bb[1],
                    uu[2] * bb[0] - uu[0] * bb[2],
                    uu[0] * bb[1] - uu[1] * bb[0],
                ];
                let adv = |i: usize| uu[0] * d(i, 0) + uu[1] * d(i, 1) + uu[2] * d(i, 2);
                *ou0 = -adv(0) - coef * gn[0] - cross[0];
                *ou1 = -adv(1) - coef * gn[1] - cross[1];
                *ou2 = -adv(2) - coef * gn[2] - cross[2];

                let u2 = uu[0] * uu[0] + uu[1] * uu[1] + uu[2] * uu[2];
                *ot = -u_dot(gt) - (2.0 / 3.0) * th * div_u + u2 / 3.0;

                *oe0 = nn * uu[0];
                *oe1 = nn * uu[1];
                *oe2 = nn * uu[2];
            });
    }

    let to_field = |v: Vec<f64>| RealField::new(&grid, v).expect("grid-sized buffer");
    let mut it = nl.into_iter().map(to_field);
    let mut next_pair = || {
        let a = it.next().expect("seven buffers");
        let b = it.next().expect("seven buffers");
        real_pair_to_spectral(&a, &b)
    };
    let (mut s_u0, mut s_u1) = next_pair();
    let (mut s_u2, mut s_t) = next_pair();
    let (mut s_e0, mut s_e1) = next_pair();
    let mut s_e2 = it.next().expect("seven buffers").to_spectral();
    let mut nonlinear = [&mut s_u0, &mut s_u1, &mut s_u2, &mut s_t, &mut s_e0, &mut s_e1, &mut s_e2];
    if params.dealias {
        for f in nonlinear.iter_mut() {
            dealias(f);
        }
    }
    // Conservative form -div(n u) from the same product as the current, so
    // that d/dt (div E + n) vanishes to roundoff.
    let flux = [s_e0, s_e1, s_e2];
    let s_n = divergence(&flux);
    let [s_e0, s_e1, s_e2] = flux;

    let mut t = linear_rhs(state, params);
    t.n.axpy(-1.0, &s_n);
    t.u[0].axpy(1.0, &s_u0);
    t.u[1].axpy(1.0, &s_u1);
    t.u[2].axpy(1.0, &s_u2);
    t.theta.axpy(1.0, &s_t);
    t.e[0].axpy(1.0, &s_e0);
    t.e[1].axpy(1.0, &s_e1);
    t.e[2].axpy(1.0, &s_e2);
    // n_t = -div((1 + n) u) and B_t = -curl E carry no mean
    t.n.coefficients_mut()[0] = Complex64::new(0.0, 0.0);
    for f in t.b.iter_mut() {
        f.coefficients_mut()[0] = Complex64::new(0.0, 0.0);
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;
    use std::f64::consts::PI;

    #[test]
    fn equilibrium_is_fixed_point() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let s = PlasmaState::equilibrium(&g);
        let params = ModelParams {
            b_infinity: [0.3, -0.2, 1.0],
            dealias: true,
        };
        let t = rhs(&s, &params).unwrap();
        assert!(t.is_equilibrium());
    }

    #[test]
    fn vacuum_is_detected() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut s = PlasmaState::equilibrium(&g);
        s.n = RealField::from_fn(&g, |x| 1.5 * x[0].sin()).to_spectral();
        assert!(matches!(
            rhs(&s, &ModelParams::default()),
            Err(ModelError::Vacuum { .. })
        ));
    }

    #[test]
    fn shear_flow_tendency_by_hand() {
        // u = A sin(x1) e2: div u = 0, u . grad u = 0, so
        // n_t = 0, u_t = -u, theta_t = A^2 sin^2(x1) / 3, E_t = u, B_t = 0
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let amp = 0.1;
        let mut s = PlasmaState::equilibrium(&g);
        s.u[1] = RealField::from_fn(&g, |x| amp * x[0].sin()).to_spectral();
        let t = rhs(&s, &ModelParams::default()).unwrap();
        let tol = 1e-15;
        assert!(t.n.rms() < tol);
        assert!(t.u[0].rms() < tol && t.u[2].rms() < tol);
        assert!(t.u[1].add(&s.u[1]).rms() < tol);
        let expected = RealField::from_fn(&g, |x| amp * amp * x[0].sin().powi(2) / 3.0).to_spectral();
        assert!(t.theta.sub(&expected).rms() < tol);
        assert!(t.e[1].sub(&s.u[1]).rms() < tol);
        assert!(t.e[0].rms() < tol && t.e[2].rms() < tol);
        assert!(t.b.iter().all(|f| f.rms() < tol));
    }
}
