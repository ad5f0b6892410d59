use super::{LemmaId, LemmaParams, SamplingConfig};

/// Allowed relative drift of a measured maximum ratio from its calibration value.
pub const CALIBRATION_TOLERANCE: f64 = 0.05;

/// Frozen maximum ratios of the lemmas without explicit constants, measured
/// as the mean over seeds 1..=5 of [`SamplingConfig::default`] with each
/// lemma's default parameters.
const TABLE: [(LemmaId, f64); 5] = [
    (LemmaId::Gn, 0.09580),
    (LemmaId::Commutator, 0.3187),
    (LemmaId::Composition, 1.2616),
    (LemmaId::Riesz, 0.4047),
    (LemmaId::LpBesov, 0.06879),
];

/// Calibration value for `params` sampled under `config`, if the pair
/// matches the calibrated setting (any seed).
pub fn calibrated_constant(params: &LemmaParams, config: &SamplingConfig) -> Option<f64> {
    let reference = SamplingConfig {
        seed: config.seed,
        ..SamplingConfig::default()
    };
    if *config != reference || *params != params.lemma().default_params() {
        return None;
    }
    TABLE.iter().find(|(l, _)| *l == params.lemma()).map(|(_, c)| *c)
}

/// Relative deviation `max_ratio / calibration - 1`.
pub fn calibration_drift(max_ratio: f64, calibration: f64) -> f64 {
    max_ratio / calibration - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_requires_calibrated_setting() {
        let cfg = SamplingConfig { seed: 99, ..Default::default() };
        assert_eq!(calibrated_constant(&LemmaId::Riesz.default_params(), &cfg), Some(0.4047));
        assert_eq!(calibrated_constant(&LemmaId::InterpHs.default_params(), &cfg), None);
        assert_eq!(calibrated_constant(&LemmaParams::Riesz { s: 0.25 }, &cfg), None);
        let small = SamplingConfig { count: 10, ..Default::default() };
        assert_eq!(calibrated_constant(&LemmaId::Riesz.default_params(), &small), None);
    }
}
