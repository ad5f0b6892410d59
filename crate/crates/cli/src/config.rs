//! Experiment configuration for `simulate` and `decay-study`.

use std::f64::consts::PI;

use anyhow::{anyhow, bail, Result};
use emaxwell::analysis::{DecayClaim, RegularitySource, Tier};
use emaxwell::diagnostics::NegativeSpace;
use emaxwell::integrator::{DiagnosticsRequest, GridSpec, RunConfig, StepControl};
use emaxwell::model::{ComponentMask, InitialDataSpec, ModelParams, NormalizedQuantity, Normalization, Profile};
use serde::Serialize;

use crate::flat::{fmt_f64, parse_f64, split_list, FlatMap, FlatWriter};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// `diagnostics.decay_series` is left empty here and filled from the claims by [`Self::run_config`].
    pub run: RunConfig,
    pub snapshot_times: Vec<f64>,
    pub claims: Vec<DecayClaim>,
    pub fit_window: (f64, f64),
    /// Replace the simulation by the series `(1 + t)^exponent` (self-test).
    pub synthetic_exponent: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            run: RunConfig {
                grid: GridSpec {
                    points_per_axis: 32,
                    box_length: 16.0 * PI,
                },
                model: ModelParams::default(),
                initial: InitialDataSpec {
                    amplitude: 1e-3,
                    profile: Profile::BandLimitedRandom { max_mode: 4, seed: 1 },
                    mask: ComponentMask::ALL,
                    normalization: None,
                },
                control: StepControl::default(),
                diagnostics: DiagnosticsRequest::default(),
            },
            snapshot_times: Vec::new(),
            claims: Vec::new(),
            fit_window: (1.0, 8.0),
            synthetic_exponent: None,
        }
    }
}

const MASK_NAMES: [&str; 5] = ["n", "u", "theta", "e", "b"];

fn mask_to_string(m: &ComponentMask) -> String {
    let flags = [m.n, m.u, m.theta, m.e, m.b];
    let on: Vec<&str> = MASK_NAMES.iter().zip(flags).filter(|(_, f)| *f).map(|(n, _)| *n).collect();
    if on.is_empty() {
        "none".into()
    } else {
        on.join(", ")
    }
}

fn parse_mask(v: &str) -> Result<ComponentMask> {
    let mut m = ComponentMask::NONE;
    if v.trim() == "none" {
        return Ok(m);
    }
    for item in split_list(v) {
        match item {
            "n" => m.n = true,
            "u" => m.u = true,
            "theta" => m.theta = true,
            "e" => m.e = true,
            "b" => m.b = true,
            other => bail!("initial.mask: unknown component `{other}` (expected n, u, theta, e, b)"),
        }
    }
    Ok(m)
}

pub fn space_name(space: NegativeSpace) -> &'static str {
    match space {
        NegativeSpace::NegSobolev => "neg_sobolev",
        NegativeSpace::NegBesov => "neg_besov",
    }
}

fn parse_space(key: &str, v: &str) -> Result<NegativeSpace> {
    match v {
        "neg_sobolev" => Ok(NegativeSpace::NegSobolev),
        "neg_besov" => Ok(NegativeSpace::NegBesov),
        other => bail!("{key}: unknown space `{other}` (expected neg_sobolev or neg_besov)"),
    }
}

fn normalization_to_string(n: &Option<Normalization>) -> String {
    match n {
        None => "none".into(),
        Some(n) => match n.quantity {
            NormalizedQuantity::NegSobolev(s) => format!("neg_sobolev:{}", fmt_f64(s)),
            NormalizedQuantity::NegBesov(s) => format!("neg_besov:{}", fmt_f64(s)),
            NormalizedQuantity::Energy(order) => format!("energy:{order}"),
        },
    }
}

fn parse_quantity(v: &str) -> Result<Option<NormalizedQuantity>> {
    const KEY: &str = "initial.normalization";
    if v == "none" {
        return Ok(None);
    }
    let (kind, arg) = v
        .split_once(':')
        .ok_or_else(|| anyhow!("{KEY}: expected none, neg_sobolev:s, neg_besov:s or energy:N, got `{v}`"))?;
    Ok(Some(match kind {
        "neg_sobolev" => NormalizedQuantity::NegSobolev(parse_f64(KEY, arg)?),
        "neg_besov" => NormalizedQuantity::NegBesov(parse_f64(KEY, arg)?),
        "energy" => NormalizedQuantity::Energy(arg.parse().map_err(|_| anyhow!("{KEY}: bad order `{arg}`"))?),
        other => bail!("{KEY}: unknown quantity `{other}`"),
    }))
}

fn tier_name(t: Tier) -> &'static str {
    match t {
        Tier::Basic => "basic",
        Tier::Further1 => "further1",
        Tier::Further11 => "further11",
        Tier::Further2 => "further2",
    }
}

pub fn claim_to_string(c: &DecayClaim) -> String {
    let (kind, v) = match c.source {
        RegularitySource::Hs(s) => ("hs", s),
        RegularitySource::Besov(s) => ("besov", s),
        RegularitySource::Lp(p) => ("lp", p),
    };
    format!("{}:{}:{}:{}", tier_name(c.tier), c.k, kind, fmt_f64(v))
}

fn parse_claim(v: &str) -> Result<DecayClaim> {
    const KEY: &str = "decay.claims";
    let parts: Vec<&str> = v.split(':').map(str::trim).collect();
    let [tier, k, kind, value] = parts[..] else {
        bail!("{KEY}: expected tier:k:source:value, got `{v}`");
    };
    let tier = Tier::ALL
        .into_iter()
        .find(|t| tier_name(*t) == tier)
        .ok_or_else(|| anyhow!("{KEY}: unknown tier `{tier}`"))?;
    let k = k.parse().map_err(|_| anyhow!("{KEY}: bad k `{k}`"))?;
    let value = parse_f64(KEY, value)?;
    let source = match kind {
        "hs" => RegularitySource::Hs(value),
        "besov" => RegularitySource::Besov(value),
        "lp" => RegularitySource::Lp(value),
        other => bail!("{KEY}: unknown source `{other}` (expected hs, besov or lp)"),
    };
    Ok(DecayClaim { tier, k, source })
}

fn parse_pair(key: &str, v: &str) -> Result<(f64, f64)> {
    let items: Vec<&str> = split_list(v).collect();
    let [a, b] = items[..] else {
        bail!("{key}: expected two numbers, got `{v}`");
    };
    Ok((parse_f64(key, a)?, parse_f64(key, b)?))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let d = Self::default();
        let mut m = FlatMap::parse(text)?;
        let grid = GridSpec {
            points_per_axis: m.get("grid.points_per_axis", d.run.grid.points_per_axis)?,
            box_length: m.get("grid.box_length", d.run.grid.box_length)?,
        };
        let binf = m.get_list("model.b_infinity", d.run.model.b_infinity.to_vec())?;
        let b_infinity: [f64; 3] = binf
            .try_into()
            .map_err(|_| anyhow!("model.b_infinity: expected three components"))?;
        let model = ModelParams {
            b_infinity,
            dealias: m.get("model.dealias", d.run.model.dealias)?,
        };

        let profile = match m.take("initial.profile").as_deref().unwrap_or("random") {
            "random" => Profile::BandLimitedRandom {
                max_mode: m.get("initial.max_mode", 4)?,
                seed: m.get("initial.seed", 1)?,
            },
            "bump" => Profile::GaussianBump {
                width: m.get("initial.width", 2.0)?,
            },
            other => bail!("initial.profile: unknown profile `{other}` (expected random or bump)"),
        };
        let mask = match m.take("initial.mask") {
            Some(v) => parse_mask(&v)?,
            None => ComponentMask::ALL,
        };
        let quantity = match m.take("initial.normalization") {
            Some(v) => parse_quantity(&v)?,
            None => None,
        };
        let target = m.take("initial.normalization_target");
        let normalization = match (quantity, target) {
            (None, None) => None,
            (None, Some(_)) => bail!("initial.normalization_target: set without initial.normalization"),
            (Some(_), None) => bail!("initial.normalization_target: required with initial.normalization"),
            (Some(quantity), Some(t)) => Some(Normalization {
                quantity,
                target: parse_f64("initial.normalization_target", &t)?,
            }),
        };
        let initial = InitialDataSpec {
            amplitude: m.get("initial.amplitude", d.run.initial.amplitude)?,
            profile,
            mask,
            normalization,
        };

        let dc = d.run.control;
        let control = StepControl {
            cfl_number: m.get("control.cfl_number", dc.cfl_number)?,
            max_dt: m.get("control.max_dt", dc.max_dt)?,
            reproject_every: m.get("control.reproject_every", dc.reproject_every)?,
            t_end: m.get("control.t_end", dc.t_end)?,
            sample_every: m.get("control.sample_every", dc.sample_every)?,
        };

        let dd = &d.run.diagnostics;
        let negative_norms = match m.take("diagnostics.negative_norms") {
            None => dd.negative_norms.clone(),
            Some(v) => split_list(&v)
                .map(|item| {
                    const KEY: &str = "diagnostics.negative_norms";
                    let (space, s) = item
                        .split_once(':')
                        .ok_or_else(|| anyhow!("{KEY}: expected space:s, got `{item}`"))?;
                    Ok((parse_f64(KEY, s)?, parse_space(KEY, space)?))
                })
                .collect::<Result<_>>()?,
        };
        let diagnostics = DiagnosticsRequest {
            energy_order: m.get("diagnostics.energy_order", dd.energy_order)?,
            window_levels: m.get_list("diagnostics.window_levels", dd.window_levels.clone())?,
            epsilon: m.get("diagnostics.epsilon", dd.epsilon)?,
            eta: m.get("diagnostics.eta", dd.eta)?,
            negative_norms,
            decay_series: Vec::new(),
        };

        let snapshot_times = m.get_list("output.snapshot_times", Vec::new())?;
        let claims = match m.take("decay.claims") {
            None => Vec::new(),
            Some(v) => split_list(&v).map(parse_claim).collect::<Result<_>>()?,
        };
        let fit_window = match m.take("decay.window") {
            None => d.fit_window,
            Some(v) => parse_pair("decay.window", &v)?,
        };
        let synthetic_exponent = match m.take("decay.synthetic_exponent").as_deref() {
            None | Some("none") => None,
            Some(v) => Some(parse_f64("decay.synthetic_exponent", v)?),
        };
        m.finish()?;

        let cfg = Self {
            run: RunConfig {
                grid,
                model,
                initial,
                control,
                diagnostics,
            },
            snapshot_times,
            claims,
            fit_window,
            synthetic_exponent,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.run_config().validate().map_err(|e| anyhow!("{e}"))?;
        let t_end = self.run.control.t_end;
        if let Some(t) = self.snapshot_times.iter().find(|t| !(**t >= 0.0 && **t <= t_end)) {
            bail!("output.snapshot_times: {t} outside [0, control.t_end = {t_end}]");
        }
        for c in &self.claims {
            c.source.validate().map_err(|e| anyhow!("decay.claims: {e}"))?;
        }
        let (t0, t1) = self.fit_window;
        if !(t0 >= 0.0 && t1 > t0) {
            bail!("decay.window: need 0 <= t0 < t1, got [{t0}, {t1}]");
        }
        let horizon = self.run.grid.box_length / 2.0;
        if t1 > horizon {
            bail!("decay.window: t1 = {t1} exceeds the recurrence horizon L/2 = {horizon}");
        }
        Ok(())
    }

    /// The run configuration with one decay series per claim.
    pub fn run_config(&self) -> RunConfig {
        let mut run = self.run.clone();
        run.diagnostics.decay_series = self.claims.iter().map(|c| (c.target(), c.k)).collect();
        run
    }

    pub fn set_seed(&mut self, new_seed: u64) {
        if let Profile::BandLimitedRandom { seed, .. } = &mut self.run.initial.profile {
            *seed = new_seed;
        }
    }

    pub fn serialize(&self) -> String {
        let mut w = FlatWriter::default();
        let r = &self.run;
        w.put("grid.points_per_axis", r.grid.points_per_axis);
        w.put_f64("grid.box_length", r.grid.box_length);
        w.put_list("model.b_infinity", &r.model.b_infinity, |v| fmt_f64(*v));
        w.put("model.dealias", r.model.dealias);
        w.put_f64("initial.amplitude", r.initial.amplitude);
        match r.initial.profile {
            Profile::BandLimitedRandom { max_mode, seed } => {
                w.put("initial.profile", "random");
                w.put("initial.max_mode", max_mode);
                w.put("initial.seed", seed);
            }
            Profile::GaussianBump { width } => {
                w.put("initial.profile", "bump");
                w.put_f64("initial.width", width);
            }
        }
        w.put("initial.mask", mask_to_string(&r.initial.mask));
        w.put("initial.normalization", normalization_to_string(&r.initial.normalization));
        if let Some(n) = r.initial.normalization {
            w.put_f64("initial.normalization_target", n.target);
        }
        w.put_f64("control.cfl_number", r.control.cfl_number);
        w.put_f64("control.max_dt", r.control.max_dt);
        w.put("control.reproject_every", r.control.reproject_every);
        w.put_f64("control.t_end", r.control.t_end);
        w.put_f64("control.sample_every", r.control.sample_every);
        let dg = &r.diagnostics;
        w.put("diagnostics.energy_order", dg.energy_order);
        w.put_list("diagnostics.window_levels", &dg.window_levels, |k| k.to_string());
        w.put_f64("diagnostics.epsilon", dg.epsilon);
        w.put_f64("diagnostics.eta", dg.eta);
        w.put_list("diagnostics.negative_norms", &dg.negative_norms, |(s, space)| {
            format!("{}:{}", space_name(*space), fmt_f64(*s))
        });
        w.put_list("output.snapshot_times", &self.snapshot_times, |t| fmt_f64(*t));
        w.put_list("decay.claims", &self.claims, claim_to_string);
        w.put("decay.window", format!("{}, {}", fmt_f64(self.fit_window.0), fmt_f64(self.fit_window.1)));
        w.put(
            "decay.synthetic_exponent",
            self.synthetic_exponent.map_or("none".into(), fmt_f64),
        );
        w.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::parse(&c.serialize()).unwrap(), c);
        assert_eq!(ExperimentConfig::parse("").unwrap(), c);
    }

    #[test]
    fn full_round_trip() {
        let text = "\
grid.points_per_axis = 16
grid.box_length = 25.132741228718345
model.b_infinity = 0, 0.5, 1
model.dealias = false
initial.amplitude = 1e-8
initial.profile = bump
initial.width = 3.5
initial.mask = n, theta, b
initial.normalization = neg_besov:1.5
initial.normalization_target = 0.001
control.t_end = 2
control.sample_every = 0.05
diagnostics.energy_order = 4
diagnostics.window_levels = 0, 1, 2
diagnostics.negative_norms = neg_sobolev:0.5, neg_besov:1.5
output.snapshot_times = 0, 1.5
decay.claims = basic:0:hs:0.5, further2:1:lp:1, further11:0:besov:1.5
decay.window = 0.5, 2
decay.synthetic_exponent = -1.25
";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.run.initial.profile, Profile::GaussianBump { width: 3.5 });
        assert_eq!(c.claims.len(), 3);
        assert_eq!(c.run_config().diagnostics.decay_series.len(), 3);
        let again = ExperimentConfig::parse(&c.serialize()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.serialize(), c.serialize());
    }

    #[test]
    fn validation_names_fields() {
        let err = ExperimentConfig::parse("grid.points_per_axis = 33").unwrap_err().to_string();
        assert!(err.contains("points_per_axis"), "{err}");
        let err = ExperimentConfig::parse("decay.window = 1, 100").unwrap_err().to_string();
        assert!(err.contains("decay.window"), "{err}");
        let err = ExperimentConfig::parse("initial.mask = n, q").unwrap_err().to_string();
        assert!(err.contains("initial.mask"), "{err}");
        let err = ExperimentConfig::parse("control.t_end = 1\noutput.snapshot_times = 2").unwrap_err().to_string();
        assert!(err.contains("snapshot_times"), "{err}");
        let err = ExperimentConfig::parse("decay.claims = basic:0:hs:1.5").unwrap_err().to_string();
        assert!(err.contains("decay.claims"), "{err}");
        assert!(ExperimentConfig::parse("bogus = 1").is_err());
    }
}
