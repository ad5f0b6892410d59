use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::rng::{sample_seed, INEQUALITY_SAMPLING};
use crate::spectral::{
    apply_symbol, lp_norm, magnitude, Grid, MultiplierSymbol, NormKind, RealField, SpectralField,
};
use num_complex::Complex64;

/// Lemma families sampled by [`verify_inequality`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaId {
    /// `||grad^alpha f||_{L^p} <= C ||grad^m f||^{1-theta} ||grad^l f||^theta`
    Gn,
    /// `||[grad^k, g] h|| <= C (||grad g||_inf ||grad^{k-1} h|| + ||grad^k g|| ||h||_inf)`
    Commutator,
    /// `||grad^k (n / (1 + n))|| <= C ||grad^k n||`
    Composition,
    /// `||f||_{H^-s} <= C ||f||_{L^p}`, `1/2 + s/3 = 1/p`
    Riesz,
    /// `||f||_{B^-s_{2,inf}} <= C ||f||_{L^p}`, `1/2 + s/3 = 1/p`
    LpBesov,
    /// `||grad^l f|| <= ||grad^{l+1} f||^{1-theta} ||f||_{H^-s}^theta`, `theta = 1/(l+1+s)`
    InterpHs,
    /// As [`LemmaId::InterpHs`] with the Besov norm.
    InterpBesov,
}

impl LemmaId {
    pub const ALL: [LemmaId; 7] = [
        LemmaId::Gn,
        LemmaId::Commutator,
        LemmaId::Composition,
        LemmaId::Riesz,
        LemmaId::LpBesov,
        LemmaId::InterpHs,
        LemmaId::InterpBesov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LemmaId::Gn => "gn",
            LemmaId::Commutator => "commutator",
            LemmaId::Composition => "composition",
            LemmaId::Riesz => "riesz",
            LemmaId::LpBesov => "lp_besov",
            LemmaId::InterpHs => "interp_hs",
            LemmaId::InterpBesov => "interp_besov",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == name)
    }

    /// Bound constant asserted exactly (the two Parseval-type interpolations).
    pub fn sharp_constant(self) -> Option<f64> {
        matches!(self, LemmaId::InterpHs | LemmaId::InterpBesov).then_some(1.0)
    }

    pub fn default_params(self) -> LemmaParams {
        match self {
            LemmaId::Gn => LemmaParams::Gn { p: 4.0, alpha: 1, m: 2, ell: 0 },
            LemmaId::Commutator => LemmaParams::Commutator { k: 2 },
            LemmaId::Composition => LemmaParams::Composition { k: 2 },
            LemmaId::Riesz => LemmaParams::Riesz { s: 0.5 },
            LemmaId::LpBesov => LemmaParams::LpBesov { s: 1.5 },
            LemmaId::InterpHs => LemmaParams::InterpHs { ell: 1, s: 0.5 },
            LemmaId::InterpBesov => LemmaParams::InterpBesov { ell: 1, s: 0.5 },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "snake_case")]
pub enum LemmaParams {
    Gn { p: f64, alpha: u32, m: u32, ell: u32 },
    Commutator { k: u32 },
    Composition { k: u32 },
    Riesz { s: f64 },
    LpBesov { s: f64 },
    InterpHs { ell: u32, s: f64 },
    InterpBesov { ell: u32, s: f64 },
}

/// `p` with `1/2 + s/3 = 1/p`.
fn embedding_exponent(s: f64) -> f64 {
    1.0 / (0.5 + s / 3.0)
}

impl LemmaParams {
    pub fn lemma(&self) -> LemmaId {
        match self {
            LemmaParams::Gn { .. } => LemmaId::Gn,
            LemmaParams::Commutator { .. } => LemmaId::Commutator,
            LemmaParams::Composition { .. } => LemmaId::Composition,
            LemmaParams::Riesz { .. } => LemmaId::Riesz,
            LemmaParams::LpBesov { .. } => LemmaId::LpBesov,
            LemmaParams::InterpHs { .. } => LemmaId::InterpHs,
            LemmaParams::InterpBesov { .. } => LemmaId::InterpBesov,
        }
    }

    /// Interpolation exponent, where the lemma has one.
    pub fn theta(&self) -> Option<f64> {
        match *self {
            LemmaParams::Gn { p, alpha, m, ell } => {
                Some((m as f64 - alpha as f64 - 3.0 * (0.5 - 1.0 / p)) / (m as f64 - ell as f64))
            }
            LemmaParams::InterpHs { ell, s } | LemmaParams::InterpBesov { ell, s } => {
                Some(1.0 / (ell as f64 + 1.0 + s))
            }
            _ => None,
        }
    }

    /// Lebesgue exponent, where the lemma has one.
    pub fn p(&self) -> Option<f64> {
        match *self {
            LemmaParams::Gn { p, .. } => Some(p),
            LemmaParams::Riesz { s } | LemmaParams::LpBesov { s } => Some(embedding_exponent(s)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        let bad = |msg: String| Err(AnalysisError::Parameter(msg));
        match *self {
            LemmaParams::Gn { p, m, ell, .. } => {
                if !(p >= 2.0) {
                    return bad(format!("gn needs 2 <= p <= inf, got {p}"));
                }
                if m == ell {
                    return bad("gn needs m != l".into());
                }
                let theta = self.theta().unwrap();
                let ok = if p.is_infinite() { theta > 0.0 && theta < 1.0 } else { (0.0..=1.0).contains(&theta) };
                if !ok {
                    return bad(format!("gn interpolation exponent theta = {theta} out of range"));
                }
            }
            LemmaParams::Commutator { k } if k < 1 => return bad("commutator needs k >= 1".into()),
            LemmaParams::Riesz { s } if !(0.0..1.5).contains(&s) => {
                return bad(format!("riesz needs 0 <= s < 3/2, got {s}"))
            }
            LemmaParams::LpBesov { s } if !(s > 0.0 && s <= 1.5) => {
                return bad(format!("lp_besov needs 0 < s <= 3/2, got {s}"))
            }
            LemmaParams::InterpHs { s, .. } if !(s >= 0.0 && s.is_finite()) => {
                return bad(format!("interp_hs needs s >= 0, got {s}"))
            }
            LemmaParams::InterpBesov { s, .. } if !(s > 0.0 && s.is_finite()) => {
                return bad(format!("interp_besov needs s > 0, got {s}"))
            }
            _ => {}
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub count: usize,
    pub points_per_axis: usize,
    pub box_length: f64,
    pub seed: u64,
    /// Spectral envelope exponents `a` in `|xi|^-a`, cycled over samples.
    pub envelopes: Vec<f64>,
    /// Gain applied to the leading multiplier of each ratio. Anything other
    /// than 1 corrupts the measurement; used to exercise failure paths.
    pub symbol_gain: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            count: 1000,
            points_per_axis: 16,
            box_length: 2.0 * std::f64::consts::PI,
            seed: 1,
            envelopes: vec![0.0, 1.0, 2.0],
            symbol_gain: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    /// Seed that regenerates this sample through [`replay_sample`].
    pub replay_seed: u64,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub lemma: LemmaId,
    pub params: LemmaParams,
    pub theta: Option<f64>,
    pub p: Option<f64>,
    pub samples: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub worst: SampleRecord,
    /// The exact bound constant, for lemmas that have one.
    pub sharp_constant: Option<f64>,
}

impl InequalityReport {
    /// `max_ratio <= constant + tol`; `None` for lemmas without an exact constant.
    pub fn sharp_bound_holds(&self, tol: f64) -> Option<bool> {
        self.sharp_constant.map(|c| self.max_ratio <= c + tol)
    }
}

/// Complex Gaussian coefficients with envelope `|xi|^-a` on the modes with
/// `0 < max_i |m_i| <= N/3`, made Hermitian; real and mean-zero.
pub fn random_field(grid: &Grid, rng: &mut ChaCha8Rng, envelope: f64) -> SpectralField {
    let cutoff = grid.dealias_cutoff();
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for (idx, c) in coeffs.iter_mut().enumerate() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        let m = grid.mode(idx);
        let band = m.iter().map(|x| x.abs()).max().unwrap();
        if band == 0 || band > cutoff {
            continue;
        }
        *c = Complex64::new(re, im) * grid.wavenumber_magnitude(idx).powf(-envelope);
    }
    let mut f = SpectralField::from_coefficients(grid, coeffs).expect("grid-sized");
    f.symmetrize();
    f
}

/// `cos(xi . x)` for the integer mode `m`.
pub fn single_mode_field(grid: &Grid, mode: [i64; 3]) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    f.set_coefficient(mode, Complex64::new(0.5, 0.0));
    f.set_coefficient(mode.map(|m| -m), Complex64::new(0.5, 0.0));
    f
}

fn lambda_norm(f: &SpectralField, order: f64) -> f64 {
    if order == 0.0 {
        return f.l2_norm_sqr().sqrt();
    }
    f.norm(NormKind::Sobolev(order)).expect("positive order")
}

fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    apply_symbol(f, MultiplierSymbol::PartialDerivative { axis }).expect("derivatives never fail")
}

/// All ordered `k`-th partial derivatives `d_{i1} ... d_{ik} f`.
fn derivative_tensor(f: &SpectralField, k: u32) -> Vec<SpectralField> {
    let mut out = vec![f.clone()];
    for _ in 0..k {
        out = out.iter().flat_map(|g| (0..3).map(move |a| derivative(g, a))).collect();
    }
    out
}

fn real_product(a: &RealField, b: &RealField) -> RealField {
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    RealField::new(a.grid(), values).expect("same grid")
}

fn real_l2(f: &RealField) -> f64 {
    lp_norm(f, 2.0).expect("p = 2")
}

/// Raw `(lhs, rhs)` of one lemma for the given field(s); `rhs` omits the
/// lemma constant. `fine` is the doubled grid used for products and `L^p`
/// quadrature.
fn evaluate(params: &LemmaParams, f: &SpectralField, g: &SpectralField, fine: &Grid) -> (f64, f64) {
    match *params {
        LemmaParams::Gn { p, alpha, m, ell } => {
            let theta = params.theta().unwrap();
            let fp = f.resample(fine).expect("same box");
            let parts: Vec<RealField> = derivative_tensor(&fp, alpha).iter().map(|d| d.to_real()).collect();
            let lhs = lp_norm(&magnitude(&parts), p).expect("p >= 2");
            let rhs = lambda_norm(f, m as f64).powf(1.0 - theta) * lambda_norm(f, ell as f64).powf(theta);
            (lhs, rhs)
        }
        LemmaParams::Commutator { k } => {
            // [grad^k, g] h with g = f-sample and h = second sample
            let gp = g.resample(fine).expect("same box");
            let hp = f.resample(fine).expect("same box");
            let (gr, hr) = (gp.to_real(), hp.to_real());
            let gh = real_product(&gr, &hr).to_spectral();
            let d_gh = derivative_tensor(&gh, k);
            let d_h = derivative_tensor(&hp, k);
            let lhs = d_gh
                .iter()
                .zip(&d_h)
                .map(|(a, b)| {
                    let ar = a.to_real();
                    let br = real_product(&gr, &b.to_real());
                    let diff: Vec<f64> = ar.values().iter().zip(br.values()).map(|(x, y)| x - y).collect();
                    real_l2(&RealField::new(fine, diff).expect("fine grid")).powi(2)
                })
                .sum::<f64>()
                .sqrt();
            let grad_g: Vec<RealField> = (0..3).map(|a| derivative(&gp, a).to_real()).collect();
            let grad_g_inf = magnitude(&grad_g).max_abs();
            let rhs = grad_g_inf * lambda_norm(f, k as f64 - 1.0) + lambda_norm(g, k as f64) * hr.max_abs();
            // roundoff of g grad^k h - grad^k (g h) when g is constant
            let scale = gr.max_abs() * lambda_norm(f, k as f64);
            let lhs = if lhs <= 1e-12 * scale { 0.0 } else { lhs };
            (lhs, rhs)
        }
        LemmaParams::Composition { k } => {
            let np = f.resample(fine).expect("same box").to_real();
            let peak = np.max_abs();
            let scale = if peak > 0.0 { 0.5 / peak } else { 0.0 };
            let comp: Vec<f64> = np
                .values()
                .iter()
                .map(|v| {
                    let n = v * scale;
                    n / (1.0 + n)
                })
                .collect();
            let comp = RealField::new(fine, comp).expect("fine grid").to_spectral();
            (lambda_norm(&comp, k as f64), scale * lambda_norm(f, k as f64))
        }
        LemmaParams::Riesz { s } => {
            let lhs = if s == 0.0 { f.l2_norm_sqr().sqrt() } else { f.norm(NormKind::NegSobolev(s)).expect("mean-zero") };
            let rhs = lp_norm(&f.resample(fine).expect("same box").to_real(), embedding_exponent(s)).expect("p >= 1");
            (lhs, rhs)
        }
        LemmaParams::LpBesov { s } => {
            let lhs = f.norm(NormKind::NegBesov(s)).expect("mean-zero");
            let rhs = lp_norm(&f.resample(fine).expect("same box").to_real(), embedding_exponent(s)).expect("p >= 1");
            (lhs, rhs)
        }
        LemmaParams::InterpHs { ell, s } | LemmaParams::InterpBesov { ell, s } => {
            let theta = params.theta().unwrap();
            let neg = match (params.lemma(), s) {
                (LemmaId::InterpHs, s) if s == 0.0 => f.l2_norm_sqr().sqrt(),
                (LemmaId::InterpHs, s) => f.norm(NormKind::NegSobolev(s)).expect("mean-zero"),
                _ => f.norm(NormKind::NegBesov(s)).expect("mean-zero"),
            };
            let lhs = lambda_norm(f, ell as f64);
            let rhs = lambda_norm(f, ell as f64 + 1.0).powf(1.0 - theta) * neg.powf(theta);
            (lhs, rhs)
        }
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Ratio `LHS / RHS` of one lemma for explicit fields (`g` is used by the
/// commutator only).
pub fn lemma_ratio(params: &LemmaParams, f: &SpectralField, g: &SpectralField) -> Result<f64, AnalysisError> {
    params.validate()?;
    let grid = f.grid();
    let fine = Grid::new(2 * grid.points_per_axis(), grid.box_length())?;
    let (lhs, rhs) = evaluate(params, f, g, &fine);
    Ok(ratio(lhs, rhs))
}

fn sample_ratio(params: &LemmaParams, grid: &Grid, fine: &Grid, replay_seed: u64, envelope: f64, gain: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(replay_seed);
    let f = random_field(grid, &mut rng, envelope);
    let g = random_field(grid, &mut rng, envelope);
    let (lhs, rhs) = evaluate(params, &f, &g, fine);
    ratio(gain * lhs, rhs)
}

/// Regenerates one sample of [`verify_inequality`] from its replay seed.
pub fn replay_sample(
    params: &LemmaParams,
    config: &SamplingConfig,
    replay_seed: u64,
    envelope: f64,
) -> Result<f64, AnalysisError> {
    params.validate()?;
    let grid = Grid::new(config.points_per_axis, config.box_length)?;
    let fine = Grid::new(2 * config.points_per_axis, config.box_length)?;
    Ok(sample_ratio(params, &grid, &fine, replay_seed, envelope, config.symbol_gain))
}

/// Samples `config.count` random band-limited mean-zero fields and records
/// `LHS / RHS` (constant stripped) of the lemma.
pub fn verify_inequality(params: &LemmaParams, config: &SamplingConfig) -> Result<InequalityReport, AnalysisError> {
    params.validate()?;
    if config.count == 0 {
        return Err(AnalysisError::Parameter("sample count must be positive".into()));
    }
    if config.envelopes.is_empty() {
        return Err(AnalysisError::Parameter("at least one envelope exponent is needed".into()));
    }
    let grid = Grid::new(config.points_per_axis, config.box_length)?;
    let fine = Grid::new(2 * config.points_per_axis, config.box_length)?;
    let records: Vec<SampleRecord> = (0..config.count)
        .into_par_iter()
        .map(|index| {
            let replay_seed = sample_seed(config.seed, INEQUALITY_SAMPLING, index as u64);
            let envelope = config.envelopes[index % config.envelopes.len()];
            let ratio = sample_ratio(params, &grid, &fine, replay_seed, envelope, config.symbol_gain);
            SampleRecord { index, replay_seed, envelope, ratio }
        })
        .collect();
    let worst = *records
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .expect("count > 0");
    let mean_ratio = records.iter().map(|r| r.ratio).sum::<f64>() / records.len() as f64;
    let min_ratio = records.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(InequalityReport {
        lemma: params.lemma(),
        params: *params,
        theta: params.theta(),
        p: params.p(),
        samples: records.len(),
        max_ratio: worst.ratio,
        mean_ratio,
        min_ratio,
        worst,
        sharp_constant: params.lemma().sharp_constant(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(16, 2.0 * PI).unwrap()
    }

    #[test]
    fn random_fields_are_real_band_limited_mean_zero() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for a in [0.0, 1.0, 2.0] {
            let f = random_field(&g, &mut rng, a);
            assert!(f.hermitian_defect() == 0.0);
            assert_eq!(f.mean(), Complex64::default());
            for (i, c) in f.coefficients().iter().enumerate() {
                if *c != Complex64::default() {
                    assert!(g.mode(i).iter().all(|m| m.abs() <= 5));
                }
            }
        }
    }

    #[test]
    fn interp_hs_single_mode_equality() {
        let g = grid();
        for mode in [[1, 0, 0], [1, 2, 0], [3, -1, 2], [0, 0, 5]] {
            let f = single_mode_field(&g, mode);
            for (ell, s) in [(0, 0.0), (1, 0.5), (2, 1.25), (3, 3.0)] {
                let r = lemma_ratio(&LemmaParams::InterpHs { ell, s }, &f, &f).unwrap();
                assert!((r - 1.0).abs() < 1e-12, "{mode:?} {ell} {s}: {r}");
            }
        }
    }

    #[test]
    fn interp_besov_dyadic_single_mode_equality() {
        let g = grid();
        for mode in [[1, 0, 0], [0, 2, 0], [0, 0, 4]] {
            let f = single_mode_field(&g, mode);
            for (ell, s) in [(0, 0.5), (1, 1.0), (2, 1.5)] {
                let r = lemma_ratio(&LemmaParams::InterpBesov { ell, s }, &f, &f).unwrap();
                assert!((r - 1.0).abs() < 1e-12, "{mode:?}: {r}");
            }
        }
    }

    #[test]
    fn interp_besov_between_rings_exceeds_one() {
        // |xi| = sqrt(2): the two overlapping ring weights are both below 1
        let f = single_mode_field(&grid(), [1, 1, 0]);
        let r = lemma_ratio(&LemmaParams::InterpBesov { ell: 0, s: 0.5 }, &f, &f).unwrap();
        assert!(r > 1.0, "{r}");
    }

    #[test]
    fn commutator_with_constant_vanishes() {
        let g = grid();
        let mut c = SpectralField::zeros(&g);
        c.set_coefficient([0, 0, 0], Complex64::new(0.7, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_field(&g, &mut rng, 1.0);
        assert_eq!(lemma_ratio(&LemmaParams::Commutator { k: 2 }, &h, &c).unwrap(), 0.0);
    }

    #[test]
    fn gn_exponent_and_ranges() {
        let p = LemmaParams::Gn { p: 4.0, alpha: 1, m: 2, ell: 0 };
        assert_eq!(p.theta(), Some(0.125));
        assert!(p.validate().is_ok());
        assert!(LemmaParams::Gn { p: 1.5, alpha: 0, m: 1, ell: 0 }.validate().is_err());
        assert!(LemmaParams::Riesz { s: 1.5 }.validate().is_err());
        assert!(LemmaParams::LpBesov { s: 1.5 }.validate().is_ok());
        assert!(LemmaParams::LpBesov { s: 0.0 }.validate().is_err());
        assert!(LemmaParams::Commutator { k: 0 }.validate().is_err());
        assert_eq!(LemmaParams::LpBesov { s: 1.5 }.p(), Some(1.0));
    }

    #[test]
    fn reports_are_reproducible_and_replayable() {
        let cfg = SamplingConfig { count: 24, ..Default::default() };
        for lemma in LemmaId::ALL {
            let params = lemma.default_params();
            let a = verify_inequality(&params, &cfg).unwrap();
            let b = verify_inequality(&params, &cfg).unwrap();
            assert_eq!(a, b);
            assert!(a.max_ratio.is_finite() && a.min_ratio >= 0.0, "{lemma:?}");
            let replay = replay_sample(&params, &cfg, a.worst.replay_seed, a.worst.envelope).unwrap();
            assert_eq!(replay, a.max_ratio);
        }
    }

    #[test]
    fn symbol_gain_breaks_sharp_bound() {
        let cfg = SamplingConfig { count: 12, symbol_gain: 1.5, ..Default::default() };
        let r = verify_inequality(&LemmaId::InterpHs.default_params(), &cfg).unwrap();
        assert_eq!(r.sharp_bound_holds(1e-10), Some(false));
    }
}
