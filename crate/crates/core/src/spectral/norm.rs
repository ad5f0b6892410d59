use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::symbol::rings_at;
use super::{RealField, SpectralError, SpectralField, ZeroModeRule};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormKind {
    L2,
    Linf,
    /// Rectangle-rule `L^p`, `p >= 1`.
    Lp(f64),
    /// `||Lambda^l f||_{L2}`, `l >= 0`.
    Sobolev(f64),
    /// `||Lambda^-s f||_{L2}`, `s > 0`.
    NegSobolev(f64),
    /// `sup_j 2^(-s j) ||Delta_j f||_{L2}`, `s > 0`.
    NegBesov(f64),
}

impl SpectralField {
    pub fn norm(&self, kind: NormKind) -> Result<f64, SpectralError> {
        norm_of_components(&[self], kind, ZeroModeRule::RequireZero)
    }
}

impl RealField {
    pub fn norm(&self, kind: NormKind) -> Result<f64, SpectralError> {
        match kind {
            NormKind::Linf => Ok(self.max_abs()),
            NormKind::Lp(p) => lp_norm(self, p),
            _ => self.to_spectral().norm(kind),
        }
    }
}

/// Rectangle-rule quadrature of `(int |f|^p)^(1/p)`; `p = inf` gives the
/// grid maximum.
pub fn lp_norm(f: &RealField, p: f64) -> Result<f64, SpectralError> {
    if p.is_nan() || p < 1.0 {
        return Err(SpectralError::Parameter(format!("L^p needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let cell = f.grid().spacing().powi(3);
    let sum: f64 = f.values().iter().map(|v| v.abs().powf(p)).sum();
    Ok((cell * sum).powf(1.0 / p))
}

/// Pointwise Euclidean magnitude of a vector field.
pub fn magnitude(components: &[RealField]) -> RealField {
    let grid = components[0].grid().clone();
    let mut values = vec![0.0; grid.len()];
    for c in components {
        for (v, x) in values.iter_mut().zip(c.values()) {
            *v += x * x;
        }
    }
    values.iter_mut().for_each(|v| *v = v.sqrt());
    RealField::new(&grid, values).expect("same grid")
}

/// Squared L2 norm of each Littlewood-Paley ring, keyed by ring index.
/// Only rings that carry a nonzero weight at some grid mode are present.
pub fn ring_energies(f: &SpectralField) -> BTreeMap<i32, f64> {
    let grid = f.grid();
    let mut rings = BTreeMap::new();
    for (i, c) in f.coefficients().iter().enumerate().skip(1) {
        let r = grid.wavenumber_magnitude(i);
        let e = c.norm_sqr();
        for (j, w) in rings_at(r) {
            *rings.entry(j).or_insert(0.0) += w * w * e;
        }
    }
    let volume = grid.volume();
    rings.values_mut().for_each(|v| *v *= volume);
    rings
}

fn check_components(components: &[&SpectralField], kind: NormKind, rule: ZeroModeRule) -> Result<(), SpectralError> {
    let grid = components[0].grid();
    if components.iter().any(|c| !c.grid().same_shape(grid)) {
        return Err(SpectralError::GridMismatch);
    }
    let negative = matches!(kind, NormKind::NegSobolev(_) | NormKind::NegBesov(_));
    if negative && rule == ZeroModeRule::RequireZero {
        if let Some(c) = components.iter().find(|c| !c.is_mean_zero()) {
            return Err(SpectralError::NonzeroMean { mean: c.mean().norm() });
        }
    }
    match kind {
        NormKind::Lp(p) if p.is_nan() || p < 1.0 => {
            Err(SpectralError::Parameter(format!("L^p needs p >= 1, got {p}")))
        }
        NormKind::Sobolev(l) if !(l >= 0.0) => {
            Err(SpectralError::Parameter(format!("Sobolev order must be >= 0, got {l}")))
        }
        NormKind::NegSobolev(s) | NormKind::NegBesov(s) if !(s > 0.0) => {
            Err(SpectralError::Parameter(format!("negative-order index must be > 0, got {s}")))
        }
        _ => Ok(()),
    }
}

/// Norm of a (vector) field given by its components: the L2-type kinds
/// use the Euclidean combination `sqrt(sum_c ||f_c||^2)`, which for the
/// Besov kind is taken ring by ring before the supremum. `L^p` and `L^inf`
/// are taken of the pointwise magnitude.
pub fn norm_of_components(
    components: &[&SpectralField],
    kind: NormKind,
    rule: ZeroModeRule,
) -> Result<f64, SpectralError> {
    check_components(components, kind, rule)?;
    let grid = components[0].grid();
    match kind {
        NormKind::L2 => Ok(components.iter().map(|c| c.l2_norm_sqr()).sum::<f64>().sqrt()),
        NormKind::Sobolev(l) => Ok(components
            .iter()
            .map(|c| c.weighted_norm_sqr(|i| sobolev_weight(grid.wavenumber_magnitude(i), l)))
            .sum::<f64>()
            .sqrt()),
        NormKind::NegSobolev(s) => Ok(components
            .iter()
            .map(|c| {
                c.weighted_norm_sqr(|i| {
                    if i == 0 {
                        0.0
                    } else {
                        grid.wavenumber_magnitude(i).powf(-2.0 * s)
                    }
                })
            })
            .sum::<f64>()
            .sqrt()),
        NormKind::NegBesov(s) => {
            let mut total: BTreeMap<i32, f64> = BTreeMap::new();
            for c in components {
                for (j, e) in ring_energies(c) {
                    *total.entry(j).or_insert(0.0) += e;
                }
            }
            Ok(total
                .into_iter()
                .map(|(j, e)| 2f64.powf(-s * j as f64) * e.sqrt())
                .fold(0.0, f64::max))
        }
        NormKind::Linf | NormKind::Lp(_) => {
            let real: Vec<RealField> = components.iter().map(|c| c.to_real()).collect();
            lp_norm(&magnitude(&real), if kind == NormKind::Linf { f64::INFINITY } else { lp_exponent(kind) })
        }
    }
}

fn lp_exponent(kind: NormKind) -> f64 {
    match kind {
        NormKind::Lp(p) => p,
        _ => f64::INFINITY,
    }
}

#[inline]
fn sobolev_weight(r: f64, l: f64) -> f64 {
    if l == 0.0 {
        1.0
    } else {
        r.powf(2.0 * l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{apply_symbol, Grid, MultiplierSymbol};
    use std::f64::consts::PI;

    #[test]
    fn sine_norms() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x| x[0].sin());
        let s = f.to_spectral();
        let vol = (2.0 * PI).powi(3);
        assert!((s.norm(NormKind::L2).unwrap().powi(2) - vol / 2.0).abs() < 1e-10);
        assert!((f.norm(NormKind::L2).unwrap().powi(2) - vol / 2.0).abs() < 1e-10);
        assert!((s.norm(NormKind::Linf).unwrap() - 1.0).abs() < 1e-14);
        assert!((f.norm(NormKind::Lp(2.0)).unwrap().powi(2) - vol / 2.0).abs() < 1e-10);
    }

    #[test]
    fn negative_sobolev_of_mode_two() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x| (2.0 * x[1]).cos()).to_spectral();
        let l2 = f.norm(NormKind::L2).unwrap();
        for s in [0.25, 0.5, 1.0, 1.4] {
            let v = f.norm(NormKind::NegSobolev(s)).unwrap();
            assert!((v - 2f64.powf(-s) * l2).abs() < 1e-13 * l2);
        }
    }

    #[test]
    fn parameter_errors() {
        let g = Grid::new(8, 1.0).unwrap();
        let f = SpectralField::zeros(&g);
        assert!(matches!(f.norm(NormKind::Lp(0.5)), Err(SpectralError::Parameter(_))));
        assert!(matches!(f.norm(NormKind::NegSobolev(-1.0)), Err(SpectralError::Parameter(_))));
        let mut c = SpectralField::zeros(&g);
        c.set_coefficient([0, 0, 0], 1.0.into());
        assert!(matches!(c.norm(NormKind::NegBesov(0.5)), Err(SpectralError::NonzeroMean { .. })));
    }

    #[test]
    fn sobolev_matches_lambda_then_l2() {
        let g = Grid::new(12, 3.0).unwrap();
        let f = RealField::from_fn(&g, |x| (x[0] * 2.0 * PI / 3.0).sin() * (x[1] * 4.0 * PI / 3.0).cos()).to_spectral();
        let direct = f.norm(NormKind::Sobolev(1.5)).unwrap();
        let via = apply_symbol(&f, MultiplierSymbol::power(1.5)).unwrap().norm(NormKind::L2).unwrap();
        assert!((direct - via).abs() < 1e-12 * via);
    }
}
