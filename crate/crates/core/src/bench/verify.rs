//! Every property suite behind one call, with a machine-readable report.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    build_relation, sample_polynomial_triples, state_at_query, verify_hybrid_bound, verify_lifted_weights,
    verify_polynomial_inequality, verify_weight_identity, QueryRegisters, TupleSelection, WeightScheme,
};
use crate::algorithms::grover_iterations_circuit;
use crate::engine::{
    check_fidelity_monotone, empirical, evolve_pure, replicate, run_direct, total_variation, MStarSpec, MonotoneCase,
    PurifiedOptions, PurifiedSampler, ReweightMode, Step, StepCircuit,
};
use crate::error::Result;
use crate::oracle::{OracleCall, OracleWire};
use crate::problems::{ProblemInstance, ProblemKind};
use crate::state::{random, Gate, GateOp, QuantumState, Register, Target};

/// Circuits in the equivalence family.
pub const EQUIVALENCE_CIRCUITS: usize = 60;
/// Samples per executor per circuit.
pub const EQUIVALENCE_SAMPLES: usize = 100_000;
/// Largest allowed total-variation distance between the two executors.
pub const EQUIVALENCE_TOLERANCE: f64 = 0.02;
pub const REWEIGHT_TOLERANCE: f64 = 1e-9;
pub const MONOTONE_CASES: usize = 1000;
pub const MONOTONE_SLACK: f64 = 1e-9;
pub const POLYNOMIAL_SAMPLES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Direct against purified execution on random small circuits.
    Equivalence,
    /// Reweighted collapse distributions against single-copy Born weights.
    Reweight,
    /// Fidelity never drops under the reweighted joint measurement.
    Monotonicity,
    /// The polynomial inequality behind the sample-count bound.
    Polynomial,
    /// Hybrid bound on Grover states.
    Hybrid,
    /// Amplitude weight identity on search states.
    WeightIdentity,
    /// Averaged-weight inequality for lifted inputs.
    Lifted,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Equivalence,
        Suite::Reweight,
        Suite::Monotonicity,
        Suite::Polynomial,
        Suite::Hybrid,
        Suite::WeightIdentity,
        Suite::Lifted,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub suites: Vec<Suite>,
    /// Forces unit reweighting in the purified executor.
    pub mutate_reweight: bool,
}

impl VerifyOptions {
    pub fn all(seed: u64) -> Self {
        VerifyOptions {
            seed,
            suites: Suite::ALL.to_vec(),
            mutate_reweight: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub checks: usize,
    pub violations: usize,
    /// The suite's headline number: worst distance, slack or ratio.
    pub metric: f64,
    pub detail: String,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub mutate_reweight: bool,
    pub suites: Vec<SuiteResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }

    pub fn checks(&self) -> usize {
        self.suites.iter().map(|s| s.checks).sum()
    }

    pub fn get(&self, suite: Suite) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.suite == suite)
    }
}

/// Runs the selected suites in a fixed order; duplicates are ignored.
pub fn verify_all(options: &VerifyOptions) -> Result<SuiteReport> {
    let mut selected = options.suites.clone();
    selected.sort();
    selected.dedup();
    let mut suites = Vec::new();
    let wants = |s| selected.contains(&s);
    if wants(Suite::Equivalence) || wants(Suite::Reweight) {
        let (eq, rw) = equivalence_and_reweight(options.seed, options.mutate_reweight)?;
        if wants(Suite::Equivalence) {
            suites.push(eq);
        }
        if wants(Suite::Reweight) {
            suites.push(rw);
        }
    }
    for suite in selected {
        let result = match suite {
            Suite::Equivalence | Suite::Reweight => continue,
            Suite::Monotonicity => monotonicity(options.seed)?,
            Suite::Polynomial => polynomial(options.seed),
            Suite::Hybrid => hybrid()?,
            Suite::WeightIdentity => weight_identity()?,
            Suite::Lifted => lifted()?,
        };
        suites.push(result);
    }
    Ok(SuiteReport {
        seed: options.seed,
        mutate_reweight: options.mutate_reweight,
        suites,
    })
}

fn stream(seed: u64, suite: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ suite.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index);
    rng
}

/// Most transcript bits a generated circuit may produce: each sample records
/// every qubit and each collapse one more bit.
pub const EQUIVALENCE_TRANSCRIPT_BITS: usize = 6;

/// A random circuit on one-qubit registers `a`, `b` and sometimes `c`, with
/// at most three steps, Haar unitaries, collapses and oracle calls on `a → b`.
///
/// Transcripts are capped at [`EQUIVALENCE_TRANSCRIPT_BITS`] bits, which keeps
/// the support small enough for a 10⁵-sample comparison.
pub fn random_equivalence_circuit<R: Rng + ?Sized>(rng: &mut R, force_collapse: bool) -> Result<StepCircuit> {
    let labels: Vec<&str> = if rng.random_bool(1.0 / 3.0) {
        vec!["a", "b", "c"]
    } else {
        vec!["a", "b"]
    };
    let registers: Vec<Register> = labels.iter().map(|l| Register::new(*l, 1)).collect();
    let len = rng.random_range(1..=3);
    let mut steps = Vec::new();
    let mut bits = 0;
    for k in 0..len {
        let collapse = ((force_collapse && k == 0) || rng.random_bool(0.4)) && bits < EQUIVALENCE_TRANSCRIPT_BITS;
        if collapse {
            bits += 1;
        }
        let sample = bits + labels.len() <= EQUIVALENCE_TRANSCRIPT_BITS && !rng.random_bool(0.3);
        let mut step = if sample {
            bits += labels.len();
            Step::sample()
        } else {
            let wire = OracleWire::new("a", "b");
            Step::query(if rng.random_bool(0.5) {
                OracleCall::Phase(wire)
            } else {
                OracleCall::XorValue(wire)
            })
        };
        if rng.random_bool(0.85) {
            let u = random::haar_unitary(1 << labels.len(), rng);
            let targets = labels.iter().map(|l| Target::reg(*l)).collect();
            step = step.with_unitary(vec![GateOp::new(Gate::unitary(u)?, targets)]);
        }
        if collapse {
            step = step.with_collapse(labels[rng.random_range(0..labels.len())]);
        }
        steps.push(step);
    }
    Ok(StepCircuit::new(registers, steps))
}

struct CircuitCheck {
    tv: f64,
    reweight_checks: usize,
    reweight_error: f64,
}

fn check_circuit(seed: u64, index: usize, mutate: bool) -> Result<CircuitCheck> {
    let mut rng = stream(seed, 1, index as u64);
    // Three quarters of the family start with a collapse, where reweighting matters most.
    let circuit = random_equivalence_circuit(&mut rng, index % 4 != 0)?;
    let table = vec![rng.random_range(0..2), rng.random_range(0..2)];
    let inst = ProblemInstance::from_table(ProblemKind::Search, table)?;
    let direct = (0..EQUIVALENCE_SAMPLES)
        .map(|_| run_direct(&circuit, &inst, &mut rng).map(|t| t.key()))
        .collect::<Result<Vec<_>>>()?;
    let options = PurifiedOptions {
        reweight: if mutate { ReweightMode::Unit } else { ReweightMode::Exact },
        ..Default::default()
    };
    let mut sampler = PurifiedSampler::new(&circuit, &inst, options)?;
    let mut prng = stream(seed, 2, index as u64);
    let purified = (0..EQUIVALENCE_SAMPLES)
        .map(|_| sampler.sample(&mut prng).map(|t| t.key()))
        .collect::<Result<Vec<_>>>()?;
    let tv = total_variation(&empirical(direct), &empirical(purified));
    let mut reweight_error: f64 = 0.0;
    for rec in sampler.records() {
        reweight_error = reweight_error.max((rec.total - 1.0).abs());
        for (p, a) in rec.reweighted.iter().zip(&rec.single_copy) {
            reweight_error = reweight_error.max((p - a).abs());
        }
    }
    Ok(CircuitCheck {
        tv,
        reweight_checks: sampler.records().len(),
        reweight_error,
    })
}

fn equivalence_and_reweight(seed: u64, mutate: bool) -> Result<(SuiteResult, SuiteResult)> {
    let checks: Vec<CircuitCheck> = (0..EQUIVALENCE_CIRCUITS)
        .into_par_iter()
        .map(|i| check_circuit(seed, i, mutate))
        .collect::<Result<_>>()?;
    let max_tv = checks.iter().map(|c| c.tv).fold(0.0, f64::max);
    let tv_violations = checks.iter().filter(|c| c.tv > EQUIVALENCE_TOLERANCE).count();
    let rw_checks: usize = checks.iter().map(|c| c.reweight_checks).sum();
    let rw_error = checks.iter().map(|c| c.reweight_error).fold(0.0, f64::max);
    let rw_violations = checks.iter().filter(|c| c.reweight_error > REWEIGHT_TOLERANCE).count();
    let eq = SuiteResult {
        suite: Suite::Equivalence,
        checks: checks.len(),
        violations: tv_violations,
        metric: max_tv,
        detail: format!(
            "{} circuits, {EQUIVALENCE_SAMPLES} samples each, max TV {max_tv:.5} (tolerance {EQUIVALENCE_TOLERANCE})",
            checks.len()
        ),
    };
    let rw = SuiteResult {
        suite: Suite::Reweight,
        checks: rw_checks,
        violations: rw_violations,
        metric: rw_error,
        detail: format!("{rw_checks} reweighted measurements, max deviation {rw_error:.3e}"),
    };
    Ok((eq, rw))
}

/// Random state pairs on a measured register `m` and a spectator `e`, the
/// second a perturbation of the first or independent. Mixed cases trace out
/// `e`. Each case is replicated onto `r ∈ {1, 2, 3}` copies.
pub fn random_monotone_case<R: Rng + ?Sized>(rng: &mut R) -> Result<MonotoneCase> {
    let regs = vec![Register::new("m", 1), Register::new("e", 1)];
    let first = random::random_state(regs.clone(), rng);
    let second = if rng.random_bool(0.2) {
        random::random_state(regs.clone(), rng)
    } else {
        let eps: f64 = rng.random_range(0.0..1.0);
        let noise = random::random_state(regs.clone(), rng);
        let amps = first
            .amplitudes()
            .iter()
            .zip(noise.amplitudes())
            .map(|(a, b)| a + b * eps)
            .collect();
        QuantumState::normalized(regs, amps)?
    };
    let mixed = rng.random_bool(0.5);
    let reduce = |s: &QuantumState| if mixed { s.reduced_density(&["m"]) } else { Ok(s.to_density()) };
    let r = rng.random_range(1..=3);
    Ok(MonotoneCase {
        first: replicate(&reduce(&first)?, r)?,
        second: replicate(&reduce(&second)?, r)?,
        spec: MStarSpec::on_copies("m", r),
    })
}

fn monotonicity(seed: u64) -> Result<SuiteResult> {
    let mut rng = stream(seed, 3, 0);
    let cases: Vec<MonotoneCase> = (0..MONOTONE_CASES)
        .map(|_| random_monotone_case(&mut rng))
        .collect::<Result<_>>()?;
    let results = check_fidelity_monotone(&cases)?;
    let worst = results.iter().map(|(b, a)| a - b).fold(f64::INFINITY, f64::min);
    let violations = results.iter().filter(|(b, a)| *a < b - MONOTONE_SLACK).count();
    Ok(SuiteResult {
        suite: Suite::Monotonicity,
        checks: results.len(),
        violations,
        metric: worst,
        detail: format!("min F_after − F_before = {worst:.3e}"),
    })
}

fn polynomial(seed: u64) -> SuiteResult {
    let mut rng = stream(seed, 4, 0);
    let report = verify_polynomial_inequality(&sample_polynomial_triples(POLYNOMIAL_SAMPLES, &mut rng));
    SuiteResult {
        suite: Suite::Polynomial,
        checks: report.checked,
        violations: report.violations,
        metric: report.max_excess,
        detail: format!("max excess {:.3e}", report.max_excess),
    }
}

fn hybrid() -> Result<SuiteResult> {
    let mut checks = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for n in [16, 32] {
        let q = ((std::f64::consts::FRAC_PI_4) * (n as f64).sqrt()).round() as usize;
        let rep = verify_hybrid_bound(n, q)?;
        for (t, lhs) in rep.lhs.iter().enumerate() {
            checks += 1;
            let bound = 4.0 * (t * t) as f64;
            if *lhs > bound * (1.0 + 1e-12) {
                violations += 1;
            }
            if t > 0 {
                worst = worst.max(lhs / bound);
            }
        }
        let last = rep.lhs.last().copied().unwrap_or(0.0);
        let rel = if last <= rep.rhs { "≤" } else { ">" };
        detail.push(format!("N={n} Q={q} final {last:.4} {rel} {:.1}", rep.rhs));
    }
    Ok(SuiteResult {
        suite: Suite::Hybrid,
        checks,
        violations,
        metric: worst,
        detail: format!("{}; max LHS / 4t² = {worst:.4}", detail.join(", ")),
    })
}

/// Weight-identity states at `t`: the prepared state for `t = 0`, otherwise
/// the state right after the `t`-th oracle call.
pub fn weight_identity_state(circuit: &StepCircuit, inst: &ProblemInstance, t: usize) -> Result<QuantumState> {
    if t == 0 {
        state_at_query(circuit, inst, 0)
    } else {
        evolve_pure(circuit, inst, t)
    }
}

fn weight_identity() -> Result<SuiteResult> {
    let n = 8;
    let relation = build_relation(ProblemKind::Search, n)?;
    let scheme = WeightScheme::uniform(&relation);
    let circuit = grover_iterations_circuit(n, 2)?;
    let regs = QueryRegisters {
        index: "index".into(),
        bit: Some("bit".into()),
    };
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let mut detail = Vec::new();
    for t in 0..=2 {
        let states = |tables: &[Vec<usize>]| -> Result<Vec<QuantumState>> {
            tables
                .iter()
                .map(|tb| weight_identity_state(&circuit, &ProblemInstance::from_table(ProblemKind::Search, tb.clone())?, t))
                .collect()
        };
        let rep = verify_weight_identity(&relation, &scheme, &states(&relation.x)?, &states(&relation.y)?, &regs)?;
        if !rep.holds() {
            violations += 1;
        }
        worst = worst.min(rep.slack());
        detail.push(format!("t={t}: {:.4} {} {:.4}", rep.lhs, if rep.holds() { "≤" } else { ">" }, rep.rhs));
    }
    Ok(SuiteResult {
        suite: Suite::WeightIdentity,
        checks: 3,
        violations,
        metric: worst,
        detail: format!("search N={n}, {}", detail.join(", ")),
    })
}

fn lifted() -> Result<SuiteResult> {
    let mut checks = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let mut detail = Vec::new();
    for kind in [ProblemKind::Search, ProblemKind::Majority, ProblemKind::Parity] {
        let relation = build_relation(kind, 8)?;
        let rep = verify_lifted_weights(&relation, &WeightScheme::uniform(&relation), 2, TupleSelection::All)?;
        checks += rep.checked;
        violations += rep.violations + rep.product_violations;
        worst = worst.min(rep.min_ratio);
        detail.push(format!("{kind} min ratio {:.4}", rep.min_ratio));
    }
    Ok(SuiteResult {
        suite: Suite::Lifted,
        checks,
        violations,
        metric: worst,
        detail: format!("N=8 k=2 exhaustive: {}", detail.join(", ")),
    })
}
