use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Cubic 3-D FFT built from 1-D passes along the contiguous axis and
/// cyclic axis rotations `(a, b, c) -> (c, a, b)`. Three pass/rotate rounds
/// transform every axis and restore the original layout.
pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Forward transform, normalized so that `f(x) = sum_m c_m exp(i xi_m . x)`.
    pub(crate) fn forward(&self, data: &mut Vec<Complex64>) {
        self.transform(data, &self.forward);
        let scale = 1.0 / (self.n * self.n * self.n) as f64;
        data.par_iter_mut().for_each(|c| *c *= scale);
    }

    /// Unnormalized inverse transform (synthesis from coefficients).
    pub(crate) fn inverse(&self, data: &mut Vec<Complex64>) {
        self.transform(data, &self.inverse);
    }

    fn transform(&self, data: &mut Vec<Complex64>, plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n);
        let mut rotated = vec![Complex64::new(0.0, 0.0); data.len()];
        for _ in 0..3 {
            data.par_chunks_mut(n * n).for_each(|plane| {
                let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
                plan.process_with_scratch(plane, &mut scratch);
            });
            rotate(data, &mut rotated, n);
            std::mem::swap(data, &mut rotated);
        }
    }
}

/// `out[c][a][b] = input[a][b][c]`.
fn rotate(input: &[Complex64], out: &mut [Complex64], n: usize) {
    out.par_chunks_mut(n * n).enumerate().for_each(|(c, plane)| {
        for a in 0..n {
            for b in 0..n {
                plane[a * n + b] = input[(a * n + b) * n + c];
            }
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn naive_dft(input: &[Complex64], n: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); input.len()];
        for (p, o) in out.iter_mut().enumerate() {
            let (k1, k2, k3) = (p / (n * n), (p / n) % n, p % n);
            for (q, v) in input.iter().enumerate() {
                let (x1, x2, x3) = (q / (n * n), (q / n) % n, q % n);
                let phase = -2.0 * PI * ((k1 * x1 + k2 * x2 + k3 * x3) as f64) / n as f64;
                *o += v * Complex64::from_polar(1.0, phase);
            }
        }
        out
    }

    #[test]
    fn matches_direct_dft() {
        let n = 8;
        let input: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let expected = naive_dft(&input, n);
        let mut data = input.clone();
        Fft3::new(n).forward(&mut data);
        let scale = (n * n * n) as f64;
        for (a, b) in data.iter().zip(expected.iter()) {
            assert!((a * scale - b).norm() < 1e-10);
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let n = 10;
        let input: Vec<Complex64> = (0..n * n * n)
            .map(|i| Complex64::new((i as f64).sqrt().sin(), 0.0))
            .collect();
        let fft = Fft3::new(n);
        let mut data = input.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(input.iter()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
