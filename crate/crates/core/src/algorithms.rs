//! Query algorithms as step circuits plus classical decision rules.

use serde::{Deserialize, Serialize};

use crate::engine::{RunTranscript, Step, StepCircuit};
use crate::error::{Error, Result};
use crate::oracle::{OracleCall, OracleWire};
use crate::problems::{bits_for, ProblemInstance, ProblemKind};
use crate::state::{Gate, GateOp, Register, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    /// Queries and non-collapsing measurements.
    Pdqp,
    /// A single up-front round of parallel queries, then non-collapsing measurements.
    #[value(name = "pdqp-naq")]
    #[serde(rename = "pdqp-naq", alias = "pdqp_naq")]
    PdqpNaq,
    /// Queries and unentangled copies.
    Cbqp,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Pdqp, Model::PdqpNaq, Model::Cbqp];

    pub fn name(self) -> &'static str {
        match self {
            Model::Pdqp => "pdqp",
            Model::PdqpNaq => "pdqp-naq",
            Model::Cbqp => "cbqp",
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DecisionRule {
    /// "2-to-1" iff the observations hold at least two distinct index values
    /// at the listed positions.
    DistinctIndices { positions: Vec<usize> },
    /// "yes" iff some observed index at the listed positions is marked.
    VerifiedMarked { positions: Vec<usize> },
    /// Reads `(index, value, offset)` of every block off each sample and
    /// decides from the collected values.
    CollectBlocks { kind: ProblemKind, blocks: Vec<(usize, usize, usize)> },
    /// Recovers every input value from the running XOR held in the value
    /// register of a classical scan.
    ScanValues { kind: ProblemKind },
}

/// Outcome of a decision rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub answer: bool,
    /// False when the answer was extrapolated from incomplete data.
    pub confident: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub problem: ProblemKind,
    pub model: Model,
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    pub p: usize,
    pub circuit: StepCircuit,
    pub rule: DecisionRule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complexity {
    pub q: usize,
    pub p: usize,
    pub q_plus_p: usize,
    pub q_times_p: usize,
}

pub fn account_complexity(spec: &AlgorithmSpec) -> Complexity {
    Complexity {
        q: spec.q,
        p: spec.p,
        q_plus_p: spec.q + spec.p,
        q_times_p: spec.q * spec.p,
    }
}

/// `⌈x⌉`, forgiving floating-point noise just above an integer.
fn ceil(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

fn prep(register: &str, size: usize) -> GateOp {
    if size.is_power_of_two() {
        GateOp::on(Gate::H, register)
    } else {
        GateOp::on(Gate::UniformPrep { size }, register)
    }
}

/// Uniform superposition, one value query, collapse of the value register,
/// then `p` non-collapsing samples of the residual index state.
pub fn collision_algorithm(n: usize, p: usize) -> Result<AlgorithmSpec> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameters(format!("collision needs N ≥ 2 a power of two, got {n}")));
    }
    if p < 2 {
        return Err(Error::InvalidParameters(format!("collision needs P ≥ 2, got {p}")));
    }
    let bits = bits_for(n);
    let registers = vec![Register::new("index", bits), Register::new("value", bits)];
    let mut steps = vec![Step::query(OracleCall::XorValue(OracleWire::new("index", "value"))).with_unitary(vec![prep("index", n)])];
    steps.push(Step::sample().with_collapse("value"));
    steps.extend((1..p).map(|_| Step::sample()));
    Ok(AlgorithmSpec {
        problem: ProblemKind::Collision,
        model: Model::Pdqp,
        n,
        q: 1,
        p,
        circuit: StepCircuit::new(registers, steps),
        rule: DecisionRule::DistinctIndices { positions: vec![0] },
    })
}

/// `t` Grover iterations over `N` items with a phase oracle, then `p` samples.
///
/// The bit register is set to `|1⟩`, so every oracle call flips marked
/// indices. Works for any `N ≥ 2` via uniform preparation and diffusion over
/// the first `N` index values.
pub fn pdqp_search_with_budget(n: usize, t: usize, p: usize) -> Result<AlgorithmSpec> {
    if n < 2 {
        return Err(Error::InvalidParameters("search needs N ≥ 2".into()));
    }
    let registers = vec![Register::new("index", bits_for(n)), Register::new("bit", 1)];
    let oracle = || OracleCall::Phase(OracleWire::new("index", "bit"));
    let diffusion = || GateOp::on(Gate::Diffusion { size: n }, "index");
    let mut steps = Vec::new();
    for k in 0..t {
        let u = if k == 0 {
            vec![GateOp::on(Gate::UniformPrep { size: n }, "index"), GateOp::on(Gate::X, "bit")]
        } else {
            vec![diffusion()]
        };
        steps.push(Step::query(oracle()).with_unitary(u));
    }
    for k in 0..p {
        let u = match (k, t) {
            (0, 0) => vec![GateOp::on(Gate::UniformPrep { size: n }, "index")],
            (0, _) => vec![diffusion()],
            _ => Vec::new(),
        };
        steps.push(Step::sample().with_unitary(u));
    }
    Ok(AlgorithmSpec {
        problem: ProblemKind::Search,
        model: Model::Pdqp,
        n,
        q: t,
        p,
        circuit: StepCircuit::new(registers, steps),
        rule: DecisionRule::VerifiedMarked { positions: vec![0] },
    })
}

/// Grover with `T = ⌈c N^{1/3}⌉` queries followed by `P = ⌈c N^{1/3} ln N⌉` samples.
pub fn pdqp_search_algorithm(n: usize, c: f64) -> Result<AlgorithmSpec> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameters(format!("c must be positive, got {c}")));
    }
    let cube = (n as f64).cbrt();
    pdqp_search_with_budget(n, ceil(c * cube), ceil(c * cube * (n as f64).ln()))
}

/// Grover circuit with `t` phase-oracle queries and no measurements; step `k`
/// applies preparation (`k = 0`) or diffusion, then queries.
pub fn grover_iterations_circuit(n: usize, t: usize) -> Result<StepCircuit> {
    Ok(pdqp_search_with_budget(n, t, 0)?.circuit)
}

/// √N blocks of √N indices, all queried in one parallel round, then `p` samples.
pub fn nonadaptive_with_budget(kind: ProblemKind, n: usize, p: usize) -> Result<AlgorithmSpec> {
    let b = (n as f64).sqrt().round() as usize;
    if b * b != n || n < 4 {
        return Err(Error::NotPerfectSquare(n));
    }
    if kind == ProblemKind::Collision {
        return Err(Error::InvalidParameters("partition algorithm covers search, majority, parity and element distinctness".into()));
    }
    let value_bits = if kind.is_boolean() { 1 } else { bits_for(n) };
    let mut registers = Vec::new();
    let mut wires = Vec::new();
    let mut prep_ops = Vec::new();
    let mut blocks = Vec::new();
    for j in 0..b {
        let (idx, val) = (format!("i{j}"), format!("v{j}"));
        registers.push(Register::new(idx.clone(), bits_for(b)));
        registers.push(Register::new(val.clone(), value_bits));
        prep_ops.push(prep(&idx, b));
        wires.push(OracleWire::windowed(idx, val, j * b, b));
        blocks.push((2 * j, 2 * j + 1, j * b));
    }
    let mut steps = vec![Step::query(OracleCall::ParallelXorValue { wires }).with_unitary(prep_ops)];
    steps.extend((0..p).map(|_| Step::sample()));
    Ok(AlgorithmSpec {
        problem: kind,
        model: Model::PdqpNaq,
        n,
        q: b,
        p,
        circuit: StepCircuit::new(registers, steps),
        rule: DecisionRule::CollectBlocks { kind, blocks },
    })
}

/// The partition algorithm with `P = ⌈c √N ln N⌉`.
pub fn nonadaptive_partition_algorithm(kind: ProblemKind, n: usize, c: f64) -> Result<AlgorithmSpec> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameters(format!("c must be positive, got {c}")));
    }
    let p = ceil(c * (n as f64).sqrt() * (n as f64).ln());
    nonadaptive_with_budget(kind, n, p)
}

/// Collision under copy semantics: after the collapse the index register holds
/// an unentangled superposition of the preimages, so it is copied `copies`
/// times and everything is measured at the end.
pub fn cbqp_collision_algorithm(n: usize, copies: usize) -> Result<AlgorithmSpec> {
    if copies == 0 {
        return Err(Error::InvalidParameters("collision needs at least one copy".into()));
    }
    let mut spec = collision_algorithm(n, copies + 1)?;
    let mut steps = vec![spec.circuit.steps[0].clone(), Step::copy("index", "c1").with_collapse("value")];
    steps.extend((2..=copies).map(|k| Step::copy("index", format!("c{k}"))));
    spec.circuit = StepCircuit::new(spec.circuit.registers, steps).with_final_measure();
    spec.p = copies;
    spec.model = Model::Cbqp;
    spec.rule = DecisionRule::DistinctIndices {
        positions: std::iter::once(0).chain(2..copies + 2).collect(),
    };
    Ok(spec)
}

/// Grover with `t` queries, then `p` copies of the index register and a final
/// measurement, giving `p + 1` independent index samples.
pub fn cbqp_search_with_budget(n: usize, t: usize, p: usize) -> Result<AlgorithmSpec> {
    let mut spec = pdqp_search_with_budget(n, t, 0)?;
    let finish = if t == 0 {
        GateOp::on(Gate::UniformPrep { size: n }, "index")
    } else {
        GateOp::on(Gate::Diffusion { size: n }, "index")
    };
    let mut steps = spec.circuit.steps;
    steps.extend((0..p).map(|k| {
        let s = Step::copy("index", format!("c{k}"));
        if k == 0 {
            s.with_unitary(vec![finish.clone()])
        } else {
            s
        }
    }));
    let epilogue = if p == 0 { vec![finish] } else { Vec::new() };
    spec.circuit = StepCircuit::new(spec.circuit.registers, steps)
        .with_epilogue(epilogue)
        .with_final_measure();
    spec.p = p;
    spec.model = Model::Cbqp;
    spec.rule = DecisionRule::VerifiedMarked {
        positions: std::iter::once(0).chain(2..p + 2).collect(),
    };
    Ok(spec)
}

/// Reads the whole input with `N` value queries and collapsing measurements
/// and no samples or copies. The value register accumulates a running XOR.
pub fn classical_scan_algorithm(kind: ProblemKind, n: usize, model: Model) -> Result<AlgorithmSpec> {
    if n < 2 {
        return Err(Error::InvalidParameters("scan needs N ≥ 2".into()));
    }
    let bits = bits_for(n);
    let value_bits = if kind.is_boolean() { 1 } else { bits };
    let registers = vec![Register::new("index", bits), Register::new("value", value_bits)];
    let query = || OracleCall::XorValue(OracleWire::new("index", "value"));
    let steps = (0..n)
        .map(|k| {
            let flips: Vec<GateOp> = (0..bits)
                .filter(|b| ((k ^ k.saturating_sub(1)) >> b) & 1 == 1)
                .map(|b| GateOp::new(Gate::X, vec![Target::qubit("index", bits - 1 - b)]))
                .collect();
            let s = Step::query(query()).with_unitary(flips);
            if k == 0 {
                s
            } else {
                s.with_collapse("value")
            }
        })
        .collect();
    Ok(AlgorithmSpec {
        problem: kind,
        model,
        n,
        q: n,
        p: 0,
        circuit: StepCircuit::new(registers, steps).with_final_measure(),
        rule: DecisionRule::ScanValues { kind },
    })
}

/// Grover with `t = ⌈c N^{1/3}⌉` queries and `⌈c N^{1/3} ln N⌉` copies.
pub fn cbqp_search_algorithm(n: usize, c: f64) -> Result<AlgorithmSpec> {
    let base = pdqp_search_algorithm(n, c)?;
    cbqp_search_with_budget(n, base.q, base.p)
}

/// Default collision sample count.
pub const COLLISION_DEFAULT_P: usize = 10;
/// Default constant in `P = ⌈c √N ln N⌉` for the partition algorithm.
pub const PARTITION_DEFAULT_C: f64 = 3.0;

/// The implemented algorithm for a (problem, model) pair.
///
/// `q` overrides the query budget where it is free (adaptive search) and `p`
/// the sample or copy budget. Majority, parity and element distinctness have
/// no copy-based algorithm here beyond the classical scan.
pub fn build_algorithm(
    kind: ProblemKind,
    model: Model,
    n: usize,
    q: Option<usize>,
    p: Option<usize>,
) -> Result<AlgorithmSpec> {
    let mut spec = match (kind, model) {
        (ProblemKind::Collision, Model::Cbqp) => cbqp_collision_algorithm(n, p.unwrap_or(COLLISION_DEFAULT_P - 1))?,
        (ProblemKind::Collision, _) => collision_algorithm(n, p.unwrap_or(COLLISION_DEFAULT_P))?,
        (ProblemKind::Search, Model::Pdqp) => match (q, p) {
            (None, None) => pdqp_search_algorithm(n, 1.0)?,
            _ => {
                let base = pdqp_search_algorithm(n, 1.0)?;
                pdqp_search_with_budget(n, q.unwrap_or(base.q), p.unwrap_or(base.p))?
            }
        },
        (ProblemKind::Search, Model::Cbqp) => {
            let base = pdqp_search_algorithm(n, 1.0)?;
            cbqp_search_with_budget(n, q.unwrap_or(base.q), p.unwrap_or(base.p))?
        }
        (_, Model::Cbqp) => classical_scan_algorithm(kind, n, Model::Cbqp)?,
        (_, _) => match p {
            Some(p) => nonadaptive_with_budget(kind, n, p)?,
            None => nonadaptive_partition_algorithm(kind, n, PARTITION_DEFAULT_C)?,
        },
    };
    if let Some(q) = q {
        if q != spec.q {
            return Err(Error::InvalidParameters(format!(
                "{kind}/{model} at N = {n} uses Q = {}, not {q}",
                spec.q
            )));
        }
    }
    spec.model = model;
    Ok(spec)
}

/// Every classical record a run produces that holds register values:
/// non-collapsing samples, then the final measurement.
fn observations(t: &RunTranscript) -> impl Iterator<Item = &Vec<usize>> {
    t.samples.iter().chain(t.final_outcome.as_ref())
}

impl DecisionRule {
    pub fn decide(&self, transcript: &RunTranscript, instance: &ProblemInstance) -> Decision {
        match self {
            DecisionRule::DistinctIndices { positions } => {
                let mut seen = std::collections::BTreeSet::<usize>::new();
                for o in observations(transcript) {
                    seen.extend(positions.iter().filter_map(|&i| o.get(i)));
                }
                Decision {
                    answer: seen.len() > 1,
                    confident: true,
                }
            }
            DecisionRule::VerifiedMarked { positions } => Decision {
                answer: observations(transcript)
                    .flat_map(|o| positions.iter().filter_map(|&i| o.get(i)))
                    .any(|&x| x < instance.n && instance.table[x] == 1),
                confident: true,
            },
            DecisionRule::CollectBlocks { kind, blocks } => {
                let mut known: Vec<Option<usize>> = vec![None; instance.n];
                for s in &transcript.samples {
                    for &(i, v, offset) in blocks {
                        if let Some(slot) = known.get_mut(offset + s[i]) {
                            *slot = Some(s[v]);
                        }
                    }
                }
                decide_from_values(*kind, &known)
            }
            DecisionRule::ScanValues { kind } => {
                let mut running: Vec<usize> = transcript.collapses.iter().map(|c| c.value).collect();
                if let Some(f) = &transcript.final_outcome {
                    running.push(f[1]);
                }
                let mut prev = 0;
                let known: Vec<Option<usize>> = running
                    .into_iter()
                    .map(|c| {
                        let x = c ^ prev;
                        prev = c;
                        Some(x)
                    })
                    .collect();
                decide_from_values(*kind, &known)
            }
        }
    }
}

fn decide_from_values(kind: ProblemKind, known: &[Option<usize>]) -> Decision {
    let n = known.len();
    let seen: Vec<usize> = known.iter().flatten().copied().collect();
    let complete = seen.len() == n;
    let ones = seen.iter().filter(|&&v| v == 1).count();
    match kind {
        ProblemKind::Search => Decision {
            answer: ones > 0,
            confident: ones > 0 || complete,
        },
        ProblemKind::Majority => Decision {
            // With missing values, go with the observed fraction.
            answer: if seen.is_empty() { false } else { 2 * ones >= seen.len() },
            confident: complete,
        },
        ProblemKind::Parity => Decision {
            answer: ones % 2 == 1,
            confident: complete,
        },
        ProblemKind::ElementDistinctness | ProblemKind::Collision => {
            let mut sorted = seen.clone();
            sorted.sort_unstable();
            let repeated = sorted.windows(2).any(|w| w[0] == w[1]);
            Decision {
                answer: repeated,
                confident: repeated || complete,
            }
        }
    }
}

impl AlgorithmSpec {
    pub fn decide(&self, transcript: &RunTranscript, instance: &ProblemInstance) -> Decision {
        self.rule.decide(transcript, instance)
    }
}
