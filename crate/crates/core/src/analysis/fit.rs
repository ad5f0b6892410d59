use serde::{Deserialize, Serialize};

use super::AnalysisError;

pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub window: (f64, f64),
    /// Slope of `log v` against `log(1 + t)`.
    pub exponent: f64,
    pub standard_error: f64,
    pub r_squared: f64,
    pub samples: usize,
    /// Slope of `log v` against `t`, for comparison with an exponential law.
    pub exponential_rate: f64,
    pub exponential_r_squared: f64,
}

impl DecayFit {
    /// The exponential law explains the data better than the power law.
    pub fn prefers_exponential(&self) -> bool {
        self.exponential_r_squared > self.r_squared
    }
}

struct LineFit {
    slope: f64,
    stderr: f64,
    r2: f64,
}

fn least_squares(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    let stderr = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    LineFit { slope, stderr, r2 }
}

/// Ordinary least squares of `log v` against `log(1 + t)` on the samples
/// with `t` in `window` (inclusive).
pub fn fit_decay_exponent(series: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit, AnalysisError> {
    let (t0, t1) = window;
    if !(t0 >= 0.0 && t1 > t0) {
        return Err(AnalysisError::Parameter(format!("invalid fit window [{t0}, {t1}]")));
    }
    let tol = 1e-9 * t1.max(1.0);
    let picked: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|(t, _)| *t >= t0 - tol && *t <= t1 + tol)
        .collect();
    if picked.len() < MIN_FIT_SAMPLES {
        return Err(AnalysisError::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: picked.len(),
        });
    }
    if let Some((t, v)) = picked.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(AnalysisError::LogDomain { time: *t, value: *v });
    }
    let t: Vec<f64> = picked.iter().map(|p| p.0).collect();
    let log_t: Vec<f64> = t.iter().map(|t| t.ln_1p()).collect();
    let log_v: Vec<f64> = picked.iter().map(|p| p.1.ln()).collect();
    let power = least_squares(&log_t, &log_v);
    let expo = least_squares(&t, &log_v);
    Ok(DecayFit {
        window,
        exponent: power.slope,
        standard_error: power.stderr,
        r_squared: power.r2,
        samples: picked.len(),
        exponential_rate: expo.slope,
        exponential_r_squared: expo.r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(f: impl Fn(f64) -> f64, t1: f64, n: usize) -> Vec<(f64, f64)> {
        (0..=n).map(|i| {
            let t = t1 * i as f64 / n as f64;
            (t, f(t))
        }).collect()
    }

    #[test]
    fn exact_power_law() {
        let s = series(|t| 7.0 * (1.0 + t).powi(-2), 10.0, 100);
        let f = fit_decay_exponent(&s, (0.0, 10.0)).unwrap();
        assert!((f.exponent + 2.0).abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(f.standard_error < 1e-9);
        assert_eq!(f.samples, 101);
        assert!(!f.prefers_exponential());
    }

    #[test]
    fn exponential_is_flagged() {
        let s = series(|t| (-t).exp(), 10.0, 100);
        let f = fit_decay_exponent(&s, (5.0, 10.0)).unwrap();
        assert!(f.exponent < -5.0);
        assert!(f.prefers_exponential());
        assert!((f.exponential_rate + 1.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let s = series(|t| 1.0 - t, 2.0, 100);
        assert!(matches!(fit_decay_exponent(&s, (0.0, 2.0)), Err(AnalysisError::LogDomain { .. })));
        let s = series(|t| (1.0 + t).recip(), 1.0, 5);
        assert!(matches!(
            fit_decay_exponent(&s, (0.0, 1.0)),
            Err(AnalysisError::InsufficientData { needed: 10, got: 6 })
        ));
    }
}
