use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::fft::Fft3;
use super::SpectralError;

/// A uniform periodic grid on the box `[0, L)^3`.
///
/// The flat index of point `(i, j, k)` is `(i * n + j) * n + k`; the same
/// layout is used for Fourier modes, where index `i` stands for the signed
/// integer mode `i` if `i < n/2` and `i - n` otherwise. The Nyquist index
/// `n/2` is therefore stored as mode `-n/2`.
#[derive(Clone)]
pub struct Grid {
    points: usize,
    length: f64,
    fft: Arc<Fft3>,
}

impl Grid {
    pub fn new(points_per_axis: usize, box_length: f64) -> Result<Self, SpectralError> {
        if points_per_axis < 8 || points_per_axis % 2 != 0 {
            return Err(SpectralError::InvalidGrid(format!(
                "points_per_axis must be an even integer >= 8, got {points_per_axis}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(SpectralError::InvalidGrid(format!(
                "box_length must be positive and finite, got {box_length}"
            )));
        }
        Ok(Self {
            points: points_per_axis,
            length: box_length,
            fft: Arc::new(Fft3::new(points_per_axis)),
        })
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn box_length(&self) -> f64 {
        self.length
    }

    /// Total number of grid points (and of Fourier modes).
    pub fn len(&self) -> usize {
        self.points * self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(3)
    }

    /// Fundamental wavenumber `2 pi / L`.
    pub fn base_wavenumber(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest mode index kept by the two-thirds rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.points / 3) as i64
    }

    pub(crate) fn fft(&self) -> &Fft3 {
        &self.fft
    }

    /// Signed mode number of a storage index along one axis.
    #[inline]
    pub fn signed_mode(&self, index: usize) -> i64 {
        if index < self.points / 2 {
            index as i64
        } else {
            index as i64 - self.points as i64
        }
    }

    /// Storage index of a signed mode number along one axis.
    #[inline]
    pub fn mode_index(&self, mode: i64) -> usize {
        mode.rem_euclid(self.points as i64) as usize
    }

    #[inline]
    pub fn is_nyquist(&self, index: usize) -> bool {
        index == self.points / 2
    }

    /// Flat index of the mode `-m` given the flat index of `m`.
    #[inline]
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let n = self.points;
        let (i, j, k) = self.unflatten(flat);
        let neg = |a: usize| (n - a) % n;
        (neg(i) * n + neg(j)) * n + neg(k)
    }

    #[inline]
    pub fn unflatten(&self, flat: usize) -> (usize, usize, usize) {
        let n = self.points;
        (flat / (n * n), (flat / n) % n, flat % n)
    }

    #[inline]
    pub fn flatten(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.points + j) * self.points + k
    }

    /// Signed integer multi-index of a flat mode index.
    #[inline]
    pub fn mode(&self, flat: usize) -> [i64; 3] {
        let (i, j, k) = self.unflatten(flat);
        [self.signed_mode(i), self.signed_mode(j), self.signed_mode(k)]
    }

    /// Wavevector `2 pi m / L` of a flat mode index.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let kappa = self.base_wavenumber();
        let m = self.mode(flat);
        [m[0] as f64 * kappa, m[1] as f64 * kappa, m[2] as f64 * kappa]
    }

    /// Wavevector used for first derivatives: identical to
    /// [`Grid::wavevector`] except that Nyquist components are zeroed, so
    /// odd derivatives of real fields stay real.
    #[inline]
    pub fn derivative_wavevector(&self, flat: usize) -> [f64; 3] {
        let (i, j, k) = self.unflatten(flat);
        let mut xi = self.wavevector(flat);
        for (c, idx) in [i, j, k].into_iter().enumerate() {
            if self.is_nyquist(idx) {
                xi[c] = 0.0;
            }
        }
        xi
    }

    #[inline]
    pub fn wavenumber_magnitude(&self, flat: usize) -> f64 {
        let xi = self.wavevector(flat);
        (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt()
    }

    /// True when every component of the mode lies inside the two-thirds band.
    #[inline]
    pub fn is_dealiased(&self, flat: usize) -> bool {
        let cut = self.dealias_cutoff();
        self.mode(flat).iter().all(|m| m.abs() <= cut)
    }

    /// Coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let h = self.spacing();
        let (i, j, k) = self.unflatten(flat);
        [i as f64 * h, j as f64 * h, k as f64 * h]
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.points == other.points && self.length == other.length
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("points_per_axis", &self.points)
            .field("box_length", &self.length)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_or_small_grids() {
        assert!(Grid::new(9, 1.0).is_err());
        assert!(Grid::new(6, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, f64::NAN).is_err());
        assert!(Grid::new(8, 1.0).is_ok());
    }

    #[test]
    fn wavenumbers_follow_box_length() {
        let g = Grid::new(16, 4.0).unwrap();
        let flat = g.flatten(1, 15, 8);
        assert_eq!(g.mode(flat), [1, -1, -8]);
        let xi = g.wavevector(flat);
        let kappa = 2.0 * PI / 4.0;
        assert_eq!(xi, [kappa, -kappa, -8.0 * kappa]);
        assert_eq!(g.derivative_wavevector(flat)[2], 0.0);
    }

    #[test]
    fn zero_mode_is_unique() {
        let g = Grid::new(8, 1.0).unwrap();
        let zeros = (0..g.len()).filter(|&f| g.mode(f) == [0, 0, 0]).count();
        assert_eq!(zeros, 1);
        assert_eq!(g.conjugate_index(0), 0);
    }

    #[test]
    fn conjugate_index_negates_mode() {
        let g = Grid::new(10, 1.0).unwrap();
        for flat in [1, 17, 333, 999] {
            let m = g.mode(flat);
            let c = g.mode(g.conjugate_index(flat));
            for a in 0..3 {
                // Nyquist maps to itself
                assert!(c[a] == -m[a] || (m[a] == -5 && c[a] == -5));
            }
        }
    }
}
