use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SpectralError, SpectralField};

/// How a negative-order multiplier treats the zero mode, where `|xi|^s`
/// is singular.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroModeRule {
    /// Reject fields whose mean is not negligible.
    RequireZero,
    /// Set the zero-mode coefficient of the result to zero.
    Annihilate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplierSymbol {
    /// `Lambda^s`, the multiplier `|xi|^s`.
    FractionalPower { order: f64, zero_mode: ZeroModeRule },
    /// `d/dx_axis` (axis in `0..3`), the multiplier `i xi_axis`.
    PartialDerivative { axis: usize },
    /// Littlewood-Paley ring projection `phi_j(xi)`.
    RingProjection { ring: i32 },
    /// Two-thirds rule: zero every mode with some `|m_i| > n/3`.
    DealiasMask,
}

impl MultiplierSymbol {
    pub fn power(order: f64) -> Self {
        MultiplierSymbol::FractionalPower {
            order,
            zero_mode: ZeroModeRule::RequireZero,
        }
    }
}

/// Smooth cutoff `phi(r)`: 1 for `r <= 1`, 0 for `r >= 2`, and
/// `h(2 - r) / (h(2 - r) + h(r - 1))` with `h(x) = exp(-1/x)` in between.
pub fn bump(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = (-1.0 / (2.0 - r)).exp();
        let b = (-1.0 / (r - 1.0)).exp();
        a / (a + b)
    }
}

/// Ring weight `phi_j(r) = phi(2^-j r) - phi(2^(1-j) r)`, supported in
/// `2^(j-1) < r < 2^(j+1)`. The weights sum to one for every `r > 0`.
pub fn ring_weight(ring: i32, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let scale = 2f64.powi(-ring);
    bump(scale * r) - bump(2.0 * scale * r)
}

/// The (at most two) rings whose weight is nonzero at radius `r > 0`.
pub fn rings_at(r: f64) -> impl Iterator<Item = (i32, f64)> {
    let base = r.log2().floor() as i32;
    (base - 1..=base + 1).filter_map(move |j| {
        let w = ring_weight(j, r);
        (w != 0.0).then_some((j, w))
    })
}

/// Applies a Fourier multiplier mode by mode.
pub fn apply_symbol(f: &SpectralField, symbol: MultiplierSymbol) -> Result<SpectralField, SpectralError> {
    let grid = f.grid().clone();
    match symbol {
        MultiplierSymbol::FractionalPower { order, zero_mode } => {
            if order < 0.0 && zero_mode == ZeroModeRule::RequireZero && !f.is_mean_zero() {
                return Err(SpectralError::NonzeroMean {
                    mean: f.mean().norm(),
                });
            }
            Ok(f.map_modes(|i| {
                if i == 0 {
                    // |0|^s: identity for s = 0, zero otherwise
                    if order == 0.0 && zero_mode == ZeroModeRule::RequireZero {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                } else {
                    Complex64::new(grid.wavenumber_magnitude(i).powf(order), 0.0)
                }
            }))
        }
        MultiplierSymbol::PartialDerivative { axis } => {
            if axis > 2 {
                return Err(SpectralError::Parameter(format!("axis {axis} out of range 0..3")));
            }
            Ok(f.map_modes(|i| Complex64::new(0.0, grid.derivative_wavevector(i)[axis])))
        }
        MultiplierSymbol::RingProjection { ring } => {
            Ok(f.map_modes(|i| Complex64::new(ring_weight(ring, grid.wavenumber_magnitude(i)), 0.0)))
        }
        MultiplierSymbol::DealiasMask => Ok(f.map_modes(|i| {
            if grid.is_dealiased(i) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })),
    }
}

/// In-place two-thirds truncation.
pub fn dealias(f: &mut SpectralField) {
    let grid = f.grid().clone();
    for (i, c) in f.coefficients_mut().iter_mut().enumerate() {
        if !grid.is_dealiased(i) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Spectral gradient.
pub fn gradient(f: &SpectralField) -> [SpectralField; 3] {
    let grid = f.grid().clone();
    [0, 1, 2].map(|a| f.map_modes(|i| Complex64::new(0.0, grid.derivative_wavevector(i)[a])))
}

/// Spectral divergence of a vector field.
pub fn divergence(v: &[SpectralField; 3]) -> SpectralField {
    let grid = v[0].grid().clone();
    let mut out = SpectralField::zeros(&grid);
    let (a, b, c) = (v[0].coefficients(), v[1].coefficients(), v[2].coefficients());
    for (i, o) in out.coefficients_mut().iter_mut().enumerate() {
        let xi = grid.derivative_wavevector(i);
        *o = Complex64::new(0.0, 1.0) * (xi[0] * a[i] + xi[1] * b[i] + xi[2] * c[i]);
    }
    out
}

/// Spectral curl of a vector field.
pub fn curl(v: &[SpectralField; 3]) -> [SpectralField; 3] {
    let grid = v[0].grid().clone();
    let mut out = [
        SpectralField::zeros(&grid),
        SpectralField::zeros(&grid),
        SpectralField::zeros(&grid),
    ];
    let (a, b, c) = (v[0].coefficients(), v[1].coefficients(), v[2].coefficients());
    let iu = Complex64::new(0.0, 1.0);
    let [o0, o1, o2] = &mut out;
    let (o0, o1, o2) = (o0.coefficients_mut(), o1.coefficients_mut(), o2.coefficients_mut());
    for i in 0..grid.len() {
        let xi = grid.derivative_wavevector(i);
        o0[i] = iu * (xi[1] * c[i] - xi[2] * b[i]);
        o1[i] = iu * (xi[2] * a[i] - xi[0] * c[i]);
        o2[i] = iu * (xi[0] * b[i] - xi[1] * a[i]);
    }
    out
}
