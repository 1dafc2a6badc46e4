//! Monte Carlo success estimates over instance classes.

use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{build_algorithm, AlgorithmSpec, Model};
use crate::engine::{run_cbqp, run_direct};
use crate::error::{Error, Result};
use crate::problems::{generate_instance, InstanceParams, ProblemKind};

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959963984540054;

/// Largest probe budget [`super::minimal_budget`] tries before giving up.
pub const DEFAULT_P_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// A family of inputs trials are drawn from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceClass {
    pub label: String,
    #[serde(default)]
    pub params: InstanceParams,
}

impl InstanceClass {
    pub fn new(label: impl Into<String>, params: InstanceParams) -> Self {
        InstanceClass {
            label: label.into(),
            params,
        }
    }
}

/// The two input families closest to the decision boundary, one per answer.
pub fn hard_classes(kind: ProblemKind, n: usize) -> Vec<InstanceClass> {
    let p = InstanceParams::default;
    match kind {
        ProblemKind::Search => vec![
            InstanceClass::new("unmarked", InstanceParams { marked: Some(0), ..p() }),
            InstanceClass::new("one-marked", InstanceParams { marked: Some(1), ..p() }),
        ],
        ProblemKind::Majority => vec![
            InstanceClass::new(format!("weight-{}", n / 2), InstanceParams { weight: Some(n / 2), ..p() }),
            InstanceClass::new(
                format!("weight-{}", n / 2 - 1),
                InstanceParams {
                    weight: Some(n / 2 - 1),
                    ..p()
                },
            ),
        ],
        ProblemKind::Parity => vec![
            InstanceClass::new(format!("weight-{}", n / 2), InstanceParams { weight: Some(n / 2), ..p() }),
            InstanceClass::new(
                format!("weight-{}", n / 2 + 1),
                InstanceParams {
                    weight: Some(n / 2 + 1),
                    ..p()
                },
            ),
        ],
        ProblemKind::Collision => vec![
            InstanceClass::new("one-to-one", InstanceParams { k: Some(1), ..p() }),
            InstanceClass::new("two-to-one", InstanceParams { k: Some(2), ..p() }),
        ],
        ProblemKind::ElementDistinctness => vec![
            InstanceClass::new("distinct", InstanceParams { distinct: Some(true), ..p() }),
            InstanceClass::new("one-collision", InstanceParams { distinct: Some(false), ..p() }),
        ],
    }
}

/// What to run. A JSON config file deserializes into this directly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub problem: ProblemKind,
    pub model: Model,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    /// Query budget override.
    pub q: Option<usize>,
    /// Sample or copy budget override.
    pub p: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub target: f64,
    pub out: OutputFormat,
    /// Input families; trial `t` uses class `t mod len`. Defaults to [`hard_classes`].
    pub classes: Option<Vec<InstanceClass>>,
    pub p_cap: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            problem: ProblemKind::Search,
            model: Model::Pdqp,
            n: vec![16],
            q: None,
            p: None,
            trials: 1000,
            seed: 0,
            target: 2.0 / 3.0,
            out: OutputFormat::Csv,
            classes: None,
            p_cap: DEFAULT_P_CAP,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameters("trials must be at least 1".into()));
        }
        if self.n.is_empty() {
            return Err(Error::InvalidParameters("no N given".into()));
        }
        if !(0.0..=1.0).contains(&self.target) {
            return Err(Error::InvalidParameters(format!("target {} outside [0, 1]", self.target)));
        }
        if self.classes.as_ref().is_some_and(|c| c.is_empty()) {
            return Err(Error::InvalidParameters("empty class list".into()));
        }
        Ok(())
    }

    pub fn classes_for(&self, n: usize) -> Vec<InstanceClass> {
        self.classes.clone().unwrap_or_else(|| hard_classes(self.problem, n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassResult {
    pub label: String,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
}

/// One `(N, Q, P)` point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub problem: ProblemKind,
    pub model: Model,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "P")]
    pub p: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    pub classes: Vec<ClassResult>,
    /// Smallest per-class rate.
    pub worst_rate: f64,
    /// Wall-clock time; left out of serialized output so it stays reproducible.
    #[serde(skip)]
    pub runtime: Duration,
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// The RNG for trial `trial` of an experiment seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Runs `trials` fresh instances through `algo`. Trial `t` draws its instance
/// from `classes[t mod len]` and uses its own RNG stream, so the result does
/// not depend on the number of worker threads.
pub fn estimate_algorithm(
    algo: &AlgorithmSpec,
    classes: &[InstanceClass],
    trials: usize,
    seed: u64,
) -> Result<ResultRow> {
    if trials == 0 || classes.is_empty() {
        return Err(Error::InvalidParameters("need at least one trial and one class".into()));
    }
    let start = std::time::Instant::now();
    let outcomes: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let class = &classes[t % classes.len()];
            let inst = generate_instance(algo.problem, algo.n, &class.params, &mut rng)?;
            let transcript = match algo.model {
                Model::Cbqp => run_cbqp(&algo.circuit, &inst, &mut rng)?,
                Model::Pdqp | Model::PdqpNaq => run_direct(&algo.circuit, &inst, &mut rng)?,
            };
            Ok(algo.decide(&transcript, &inst).answer == inst.answer)
        })
        .collect::<Result<_>>()?;
    let per_class: Vec<ClassResult> = classes
        .iter()
        .enumerate()
        .map(|(c, class)| {
            let hits: Vec<bool> = outcomes.iter().skip(c).step_by(classes.len()).copied().collect();
            let successes = hits.iter().filter(|&&s| s).count();
            ClassResult {
                label: class.label.clone(),
                trials: hits.len(),
                successes,
                rate: if hits.is_empty() { 1.0 } else { successes as f64 / hits.len() as f64 },
            }
        })
        .collect();
    let successes = outcomes.iter().filter(|&&s| s).count();
    let (ci_lo, ci_hi) = wilson_interval(successes, trials, WILSON_Z);
    Ok(ResultRow {
        problem: algo.problem,
        model: algo.model,
        n: algo.n,
        q: algo.q,
        p: algo.p,
        trials,
        successes,
        rate: successes as f64 / trials as f64,
        ci_lo,
        ci_hi,
        seed,
        worst_rate: per_class
            .iter()
            .filter(|c| c.trials > 0)
            .map(|c| c.rate)
            .fold(1.0, f64::min),
        classes: per_class,
        runtime: start.elapsed(),
    })
}

/// One row per `N` of the spec, using the implemented algorithm with the
/// spec's budget overrides.
pub fn estimate_success(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    spec.n
        .iter()
        .map(|&n| {
            let algo = build_algorithm(spec.problem, spec.model, n, spec.q, spec.p)?;
            estimate_algorithm(&algo, &spec.classes_for(n), spec.trials, spec.seed)
        })
        .collect()
}
