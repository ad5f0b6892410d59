use num_complex::Complex64;
use rayon::prelude::*;

use super::{Grid, SpectralError};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A real scalar field sampled on the collocation points of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::Shape {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: &Grid, f: impl Fn([f64; 3]) -> f64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|i| f(grid.point(i)))
            .collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Forward transform. See [`real_to_spectral`].
    pub fn to_spectral(&self) -> SpectralField {
        let mut data: Vec<Complex64> = self
            .values
            .par_iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.grid.fft().forward(&mut data);
        SpectralField {
            grid: self.grid.clone(),
            coeffs: data,
        }
    }
}

/// Fourier coefficients of a real field. Coefficient `c_m` multiplies
/// `exp(i xi_m . x)`, so the zero mode is the mean value and
/// `||f||^2 = L^3 sum |c_m|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

/// Transforms a real field into its Fourier coefficients.
pub fn real_to_spectral(field: &RealField) -> SpectralField {
    field.to_spectral()
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coefficients(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::Shape {
                expected: grid.len(),
                found: coeffs.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Builds a field mode by mode from its wavevector and flat index.
    pub fn from_mode_fn(grid: &Grid, f: impl Fn(usize, [f64; 3]) -> Complex64 + Sync) -> Self {
        let coeffs = (0..grid.len())
            .into_par_iter()
            .map(|i| f(i, grid.wavevector(i)))
            .collect();
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn coefficient(&self, mode: [i64; 3]) -> Complex64 {
        let g = &self.grid;
        self.coeffs[g.flatten(g.mode_index(mode[0]), g.mode_index(mode[1]), g.mode_index(mode[2]))]
    }

    pub fn set_coefficient(&mut self, mode: [i64; 3], value: Complex64) {
        let g = &self.grid;
        let idx = g.flatten(g.mode_index(mode[0]), g.mode_index(mode[1]), g.mode_index(mode[2]));
        self.coeffs[idx] = value;
    }

    /// Inverse transform; the imaginary residue is discarded.
    pub fn to_real(&self) -> RealField {
        let mut data = self.coeffs.clone();
        self.grid.fft().inverse(&mut data);
        RealField {
            grid: self.grid.clone(),
            values: data.into_par_iter().map(|c| c.re).collect(),
        }
    }

    /// Largest imaginary part produced by the inverse transform, relative
    /// to the largest real part. Zero for exactly Hermitian coefficients.
    pub fn imaginary_leakage(&self) -> f64 {
        let mut data = self.coeffs.clone();
        self.grid.fft().inverse(&mut data);
        let re = data.iter().fold(0.0f64, |m, c| m.max(c.re.abs()));
        let im = data.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
        if re == 0.0 {
            im
        } else {
            im / re
        }
    }

    /// Mean value (zero-mode coefficient).
    pub fn mean(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Root-mean-square value, `||f||_{L2} / L^{3/2}`.
    pub fn rms(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// True when the zero mode is negligible: `|c_0| <= 1e-12 * rms`.
    pub fn is_mean_zero(&self) -> bool {
        self.coeffs[0].norm() <= 1e-12 * self.rms()
    }

    pub fn remove_mean(&mut self) {
        self.coeffs[0] = ZERO;
    }

    /// Largest violation of `c(-m) = conj(c(m))`, relative to the largest
    /// coefficient magnitude.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let g = &self.grid;
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[g.conjugate_index(i)] - self.coeffs[i].conj()).norm())
            .fold(0.0f64, f64::max)
            / scale
    }

    /// Replaces the coefficients by their Hermitian part
    /// `(c(m) + conj(c(-m))) / 2`.
    pub fn symmetrize(&mut self) {
        let g = self.grid.clone();
        let old = self.coeffs.clone();
        self.coeffs
            .par_iter_mut()
            .enumerate()
            .for_each(|(i, c)| *c = 0.5 * (old[i] + old[g.conjugate_index(i)].conj()));
    }

    pub fn scale(&mut self, factor: f64) {
        self.coeffs.par_iter_mut().for_each(|c| *c *= factor);
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &SpectralField) {
        debug_assert!(self.grid.same_shape(&other.grid));
        self.coeffs
            .par_iter_mut()
            .zip(other.coeffs.par_iter())
            .for_each(|(a, b)| *a += factor * b);
    }

    pub fn add(&self, other: &SpectralField) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &SpectralField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Applies a mode-wise complex multiplier `symbol(flat_index)`.
    pub fn map_modes(&self, symbol: impl Fn(usize) -> Complex64 + Sync) -> Self {
        let coeffs = self
            .coeffs
            .par_iter()
            .enumerate()
            .map(|(i, c)| symbol(i) * c)
            .collect();
        Self {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// Squared L2 norm by Parseval.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.grid.volume() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Mode-weighted squared norm `L^3 sum w(m) |c_m|^2`.
    pub fn weighted_norm_sqr(&self, weight: impl Fn(usize) -> f64) -> f64 {
        self.grid.volume()
            * self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| weight(i) * c.norm_sqr())
                .sum::<f64>()
    }

    /// Copies the coefficients onto another grid with the same box length,
    /// zero-padding or truncating modes that do not fit.
    pub fn resample(&self, target: &Grid) -> Result<Self, SpectralError> {
        if target.box_length() != self.grid.box_length() {
            return Err(SpectralError::GridMismatch);
        }
        let mut out = SpectralField::zeros(target);
        let src = &self.grid;
        let half = (src.points_per_axis().min(target.points_per_axis()) / 2) as i64;
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = src.mode(i);
            if m.iter().all(|a| a.abs() < half) {
                out.set_coefficient(m, *c);
            }
        }
        Ok(out)
    }
}

/// Inverse-transforms two fields with one complex FFT by synthesizing
/// `f + i g`. Both inputs must be Hermitian.
pub fn to_real_pair(f: &SpectralField, g: &SpectralField) -> (RealField, RealField) {
    let iu = Complex64::new(0.0, 1.0);
    let mut data: Vec<Complex64> = f
        .coeffs
        .par_iter()
        .zip(g.coeffs.par_iter())
        .map(|(a, b)| a + iu * b)
        .collect();
    f.grid.fft().inverse(&mut data);
    let re = data.par_iter().map(|c| c.re).collect();
    let im = data.par_iter().map(|c| c.im).collect();
    (
        RealField { grid: f.grid.clone(), values: re },
        RealField { grid: f.grid.clone(), values: im },
    )
}

/// Forward-transforms two real fields with one complex FFT and separates
/// the results using Hermitian symmetry.
pub fn real_pair_to_spectral(a: &RealField, b: &RealField) -> (SpectralField, SpectralField) {
    let grid = a.grid.clone();
    let mut data: Vec<Complex64> = a
        .values
        .par_iter()
        .zip(b.values.par_iter())
        .map(|(x, y)| Complex64::new(*x, *y))
        .collect();
    grid.fft().forward(&mut data);
    let half = Complex64::new(0.5, 0.0);
    let neg_half_i = Complex64::new(0.0, -0.5);
    let (fa, fb): (Vec<Complex64>, Vec<Complex64>) = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let z = data[i];
            let zc = data[grid.conjugate_index(i)].conj();
            (half * (z + zc), neg_half_i * (z - zc))
        })
        .unzip();
    (
        SpectralField { grid: grid.clone(), coeffs: fa },
        SpectralField { grid, coeffs: fb },
    )
}

/// `int f g dx` computed spectrally.
pub fn l2_pairing(f: &SpectralField, g: &SpectralField) -> Result<f64, SpectralError> {
    if !f.grid.same_shape(&g.grid) {
        return Err(SpectralError::GridMismatch);
    }
    let sum: f64 = f
        .coeffs
        .iter()
        .zip(g.coeffs.iter())
        .map(|(a, b)| (a * b.conj()).re)
        .sum();
    Ok(f.grid.volume() * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid16() -> Grid {
        Grid::new(16, 2.0 * PI).unwrap()
    }

    #[test]
    fn zero_field_has_zero_coefficients() {
        let g = grid16();
        let f = RealField::zeros(&g).to_spectral();
        assert!(f.coefficients().iter().all(|c| *c == ZERO));
    }

    #[test]
    fn single_sine_has_two_modes() {
        let g = grid16();
        let f = RealField::from_fn(&g, |x| x[0].sin()).to_spectral();
        let plus = f.coefficient([1, 0, 0]);
        let minus = f.coefficient([-1, 0, 0]);
        assert!((plus - Complex64::new(0.0, -0.5)).norm() < 1e-14);
        assert!((minus - Complex64::new(0.0, 0.5)).norm() < 1e-14);
        let others = f
            .coefficients()
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let m = g.mode(*i);
                m != [1, 0, 0] && m != [-1, 0, 0]
            })
            .fold(0.0f64, |m, (_, c)| m.max(c.norm()));
        assert!(others < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let g = grid16();
        assert!(matches!(
            RealField::new(&g, vec![0.0; 10]),
            Err(SpectralError::Shape { .. })
        ));
    }

    #[test]
    fn pairing_of_sine_and_cosine_vanishes() {
        let g = grid16();
        let s = RealField::from_fn(&g, |x| x[0].sin()).to_spectral();
        let c = RealField::from_fn(&g, |x| x[0].cos()).to_spectral();
        assert!(l2_pairing(&s, &c).unwrap().abs() < 1e-12);
        let ss = l2_pairing(&s, &s).unwrap();
        assert!((ss - (2.0 * PI).powi(3) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn pairing_rejects_mismatched_grids() {
        let a = SpectralField::zeros(&grid16());
        let b = SpectralField::zeros(&Grid::new(8, 2.0 * PI).unwrap());
        assert_eq!(l2_pairing(&a, &b), Err(SpectralError::GridMismatch));
    }

    #[test]
    fn paired_transforms_match_single_ones() {
        let g = grid16();
        let a = RealField::from_fn(&g, |x| (x[0] + 2.0 * x[1]).sin() + 0.3);
        let b = RealField::from_fn(&g, |x| (3.0 * x[2]).cos() * x[0].sin());
        let (fa, fb) = real_pair_to_spectral(&a, &b);
        assert!(fa.sub(&a.to_spectral()).rms() < 1e-15);
        assert!(fb.sub(&b.to_spectral()).rms() < 1e-15);
        let (ra, rb) = to_real_pair(&fa, &fb);
        for (x, y) in ra.values().iter().zip(a.values()) {
            assert!((x - y).abs() < 1e-14);
        }
        for (x, y) in rb.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn resample_preserves_trigonometric_polynomial() {
        let g = grid16();
        let fine = Grid::new(32, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x| (2.0 * x[1]).cos() + x[0].sin() * x[2].cos());
        let up = f.to_spectral().resample(&fine).unwrap().to_real();
        let exact = RealField::from_fn(&fine, |x| (2.0 * x[1]).cos() + x[0].sin() * x[2].cos());
        for (a, b) in up.values().iter().zip(exact.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
