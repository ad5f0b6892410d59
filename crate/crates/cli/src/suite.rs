//! Verification suite spec for `verify`.

use anyhow::{anyhow, bail, Result};
use emaxwell::analysis::{ConstraintCheck, ConvergenceCheck, LemmaId, LemmaParams, OracleCheck, SamplingConfig};
use emaxwell::integrator::StepControl;
use serde::Serialize;

use crate::flat::{fmt_f64, split_list, FlatMap, FlatWriter};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Lemma(LemmaParams),
    Oracle,
    Convergence,
    Constraints,
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::Lemma(p) => p.lemma().name(),
            Check::Oracle => "oracle",
            Check::Convergence => "convergence",
            Check::Constraints => "constraints",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSpec {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub sampling: SamplingConfig,
    pub oracle: OracleCheck,
    pub convergence: ConvergenceCheck,
    pub constraints: ConstraintCheck,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            checks: LemmaId::ALL.iter().map(|l| Check::Lemma(l.default_params())).collect(),
            sampling: SamplingConfig::default(),
            oracle: OracleCheck::default(),
            convergence: ConvergenceCheck::default(),
            constraints: ConstraintCheck::default(),
        }
    }
}

fn lemma_params(m: &mut FlatMap, lemma: LemmaId) -> Result<LemmaParams> {
    let d = lemma.default_params();
    let key = |name: &str| format!("{}.{name}", lemma.name());
    Ok(match d {
        LemmaParams::Gn { p, alpha, m: order, ell } => LemmaParams::Gn {
            p: m.get(&key("p"), p)?,
            alpha: m.get(&key("alpha"), alpha)?,
            m: m.get(&key("m"), order)?,
            ell: m.get(&key("ell"), ell)?,
        },
        LemmaParams::Commutator { k } => LemmaParams::Commutator { k: m.get(&key("k"), k)? },
        LemmaParams::Composition { k } => LemmaParams::Composition { k: m.get(&key("k"), k)? },
        LemmaParams::Riesz { s } => LemmaParams::Riesz { s: m.get(&key("s"), s)? },
        LemmaParams::LpBesov { s } => LemmaParams::LpBesov { s: m.get(&key("s"), s)? },
        LemmaParams::InterpHs { ell, s } => LemmaParams::InterpHs {
            ell: m.get(&key("ell"), ell)?,
            s: m.get(&key("s"), s)?,
        },
        LemmaParams::InterpBesov { ell, s } => LemmaParams::InterpBesov {
            ell: m.get(&key("ell"), ell)?,
            s: m.get(&key("s"), s)?,
        },
    })
}

impl SuiteSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let d = Self::default();
        let mut m = FlatMap::parse(text)?;
        let seed = m.get("suite.seed", d.seed)?;
        let names: Vec<String> = match m.take("suite.checks") {
            Some(v) => split_list(&v).map(str::to_string).collect(),
            None => d.checks.iter().map(|c| c.name().to_string()).collect(),
        };
        if names.is_empty() {
            bail!("suite.checks: at least one check is needed");
        }
        let mut checks = Vec::new();
        for name in &names {
            let check = match name.as_str() {
                "oracle" => Check::Oracle,
                "convergence" => Check::Convergence,
                "constraints" => Check::Constraints,
                other => {
                    let lemma = LemmaId::from_name(other).ok_or_else(|| anyhow!("suite.checks: unknown check `{other}`"))?;
                    let params = lemma_params(&mut m, lemma)?;
                    params.validate().map_err(|e| anyhow!("{}: {e}", lemma.name()))?;
                    Check::Lemma(params)
                }
            };
            if checks.iter().any(|c: &Check| c.name() == check.name()) {
                bail!("suite.checks: `{name}` listed twice");
            }
            checks.push(check);
        }

        let ds = &d.sampling;
        let sampling = SamplingConfig {
            count: m.get("sampling.count", ds.count)?,
            points_per_axis: m.get("sampling.points_per_axis", ds.points_per_axis)?,
            box_length: m.get("sampling.box_length", ds.box_length)?,
            seed,
            envelopes: m.get_list("sampling.envelopes", ds.envelopes.clone())?,
            symbol_gain: m.get("sampling.symbol_gain", ds.symbol_gain)?,
        };
        if sampling.count == 0 {
            bail!("sampling.count: must be positive");
        }
        if sampling.envelopes.is_empty() {
            bail!("sampling.envelopes: at least one exponent is needed");
        }
        let o = d.oracle;
        let oracle = OracleCheck {
            points_per_axis: m.get("oracle.points_per_axis", o.points_per_axis)?,
            box_length: m.get("oracle.box_length", o.box_length)?,
            amplitude: m.get("oracle.amplitude", o.amplitude)?,
            max_mode: m.get("oracle.max_mode", o.max_mode)?,
            t: m.get("oracle.t", o.t)?,
            dt: m.get("oracle.dt", o.dt)?,
            seed,
        };
        let c = d.convergence;
        let convergence = ConvergenceCheck {
            points_per_axis: m.get("convergence.points_per_axis", c.points_per_axis)?,
            box_length: m.get("convergence.box_length", c.box_length)?,
            amplitude: m.get("convergence.amplitude", c.amplitude)?,
            max_mode: m.get("convergence.max_mode", c.max_mode)?,
            t: m.get("convergence.t", c.t)?,
            dt: m.get("convergence.dt", c.dt)?,
            seed,
        };
        let k = d.constraints;
        let constraints = ConstraintCheck {
            points_per_axis: m.get("constraints.points_per_axis", k.points_per_axis)?,
            box_length: m.get("constraints.box_length", k.box_length)?,
            amplitude: m.get("constraints.amplitude", k.amplitude)?,
            max_mode: m.get("constraints.max_mode", k.max_mode)?,
            steps: m.get("constraints.steps", k.steps)?,
            control: StepControl {
                max_dt: m.get("constraints.max_dt", k.control.max_dt)?,
                reproject_every: m.get("constraints.reproject_every", k.control.reproject_every)?,
                ..k.control
            },
            seed,
        };
        m.finish()?;
        Ok(Self {
            seed,
            checks,
            sampling,
            oracle,
            convergence,
            constraints,
        })
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.sampling.seed = seed;
        self.oracle.seed = seed;
        self.convergence.seed = seed;
        self.constraints.seed = seed;
    }

    pub fn serialize(&self) -> String {
        let mut w = FlatWriter::default();
        w.put("suite.seed", self.seed);
        w.put_list("suite.checks", &self.checks, |c| c.name().to_string());
        for c in &self.checks {
            if let Check::Lemma(p) = c {
                let name = p.lemma().name();
                match *p {
                    LemmaParams::Gn { p, alpha, m, ell } => {
                        w.put_f64(&format!("{name}.p"), p);
                        w.put(&format!("{name}.alpha"), alpha);
                        w.put(&format!("{name}.m"), m);
                        w.put(&format!("{name}.ell"), ell);
                    }
                    LemmaParams::Commutator { k } | LemmaParams::Composition { k } => w.put(&format!("{name}.k"), k),
                    LemmaParams::Riesz { s } | LemmaParams::LpBesov { s } => w.put_f64(&format!("{name}.s"), s),
                    LemmaParams::InterpHs { ell, s } | LemmaParams::InterpBesov { ell, s } => {
                        w.put(&format!("{name}.ell"), ell);
                        w.put_f64(&format!("{name}.s"), s);
                    }
                }
            }
        }
        let s = &self.sampling;
        w.put("sampling.count", s.count);
        w.put("sampling.points_per_axis", s.points_per_axis);
        w.put_f64("sampling.box_length", s.box_length);
        w.put_list("sampling.envelopes", &s.envelopes, |a| fmt_f64(*a));
        w.put_f64("sampling.symbol_gain", s.symbol_gain);
        let o = &self.oracle;
        w.put("oracle.points_per_axis", o.points_per_axis);
        w.put_f64("oracle.box_length", o.box_length);
        w.put_f64("oracle.amplitude", o.amplitude);
        w.put("oracle.max_mode", o.max_mode);
        w.put_f64("oracle.t", o.t);
        w.put_f64("oracle.dt", o.dt);
        let c = &self.convergence;
        w.put("convergence.points_per_axis", c.points_per_axis);
        w.put_f64("convergence.box_length", c.box_length);
        w.put_f64("convergence.amplitude", c.amplitude);
        w.put("convergence.max_mode", c.max_mode);
        w.put_f64("convergence.t", c.t);
        w.put_f64("convergence.dt", c.dt);
        let k = &self.constraints;
        w.put("constraints.points_per_axis", k.points_per_axis);
        w.put_f64("constraints.box_length", k.box_length);
        w.put_f64("constraints.amplitude", k.amplitude);
        w.put("constraints.max_mode", k.max_mode);
        w.put("constraints.steps", k.steps);
        w.put_f64("constraints.max_dt", k.control.max_dt);
        w.put("constraints.reproject_every", k.control.reproject_every);
        w.finish()
    }
}
