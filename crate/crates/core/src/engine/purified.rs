//! Purified execution.
//!
//! The run is replayed on `K` copies of the workspace, one per step (plus one
//! more when the circuit ends with a final measurement). At step `i` the copies
//! `i..` are active, `r_i` of them. The step's unitary and oracle act on every
//! active copy; a collapsing measurement of register `R` measures `R` on all
//! active copies jointly and keeps only agreeing outcomes `n`, reweighted by
//! `d_n = 1 / a_n^{r_i − 1}` where `a_n` is the single-copy Born probability.
//! For identical active copies the joint weight is `a_n^{r_i}`, so the
//! reweighted distribution is exactly `a`. Copy `i` is retired after step `i`;
//! measuring the whole tensor state at the end yields every sample at once.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{RunTranscript, Semantics, StepCircuit, StepKind};
use crate::error::{Error, Result};
use crate::oracle::{apply_wire, OracleSession};
use crate::problems::ProblemInstance;
use crate::state::{mask, sample_weights, GateOp, MeasurementOutcome, QuantumState, Register, Target, ZERO_PROBABILITY};

pub const DEFAULT_QUBIT_CAP: usize = 20;
/// Allowed deviation of the reweighted distribution's total from one.
pub const REWEIGHT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReweightMode {
    /// `d_n = 1 / a_n^{r − 1}`; a total away from one is an error.
    #[default]
    Exact,
    /// `d_n = 1` followed by renormalization. Only useful to show that the
    /// equivalence checks notice a wrong reweighting.
    Unit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PurifiedOptions {
    pub qubit_cap: usize,
    pub reweight: ReweightMode,
}

impl Default for PurifiedOptions {
    fn default() -> Self {
        PurifiedOptions {
            qubit_cap: DEFAULT_QUBIT_CAP,
            reweight: ReweightMode::Exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PurifiedLayout {
    /// Total number of workspace copies.
    pub copies: usize,
    pub workspace_qubits: usize,
    /// `r_i` for each step.
    pub active: Vec<usize>,
    /// Copy read by the final measurement, if any.
    pub final_copy: Option<usize>,
}

impl PurifiedLayout {
    pub fn for_circuit(circuit: &StepCircuit) -> Self {
        let k = circuit.steps.len();
        let copies = k + usize::from(circuit.final_measure);
        PurifiedLayout {
            copies,
            workspace_qubits: circuit.workspace_qubits(),
            active: (0..k).map(|i| copies - i).collect(),
            final_copy: circuit.final_measure.then_some(k),
        }
    }

    pub fn total_qubits(&self) -> usize {
        self.copies * self.workspace_qubits
    }

    pub fn label(register: &str, copy: usize) -> String {
        format!("{register}#{copy}")
    }

    fn registers(&self, workspace: &[Register]) -> Vec<Register> {
        (0..self.copies)
            .flat_map(|c| workspace.iter().map(move |r| Register::new(Self::label(&r.label, c), r.qubits)))
            .collect()
    }
}

/// One reweighted joint measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReweightRecord {
    pub step: usize,
    pub register: String,
    /// `r_i`.
    pub active: usize,
    /// Single-copy Born distribution `a`.
    pub single_copy: Vec<f64>,
    /// `q(n) = ‖(P_n)^{⊗r} ψ*‖²`.
    pub joint: Vec<f64>,
    /// `p(n) = d_n q(n)` (renormalized under [`ReweightMode::Unit`]).
    pub reweighted: Vec<f64>,
    /// `Σ_n d_n q(n)` before any renormalization.
    pub total: f64,
    pub outcome: Option<usize>,
}

enum Halt {
    Pending(ReweightRecord),
    Done(QuantumState),
}

struct Drive {
    halt: Halt,
    records: Vec<ReweightRecord>,
    collapses: Vec<MeasurementOutcome>,
    queries: usize,
}

struct Machine<'a> {
    circuit: &'a StepCircuit,
    instance: &'a ProblemInstance,
    options: PurifiedOptions,
    layout: PurifiedLayout,
}

impl<'a> Machine<'a> {
    fn new(circuit: &'a StepCircuit, instance: &'a ProblemInstance, options: PurifiedOptions) -> Result<Self> {
        circuit.validate(Semantics::Sampling)?;
        let layout = PurifiedLayout::for_circuit(circuit);
        if layout.total_qubits() > options.qubit_cap {
            return Err(Error::QubitBudgetExceeded {
                requested: layout.total_qubits(),
                cap: options.qubit_cap,
            });
        }
        Ok(Machine {
            circuit,
            instance,
            options,
            layout,
        })
    }

    fn apply_on_copies(&self, state: &mut QuantumState, op: &GateOp, copies: std::ops::Range<usize>) -> Result<()> {
        for c in copies {
            let targets: Vec<Target> = op
                .targets
                .iter()
                .map(|t| Target {
                    register: PurifiedLayout::label(&t.register, c),
                    qubit: t.qubit,
                })
                .collect();
            state.apply_in_place(&op.gate, &targets)?;
        }
        Ok(())
    }

    /// Runs until the end, or until `choose` declines to pick a collapse outcome.
    fn drive(&self, choose: &mut dyn FnMut(&[f64]) -> Option<usize>) -> Result<Drive> {
        let mut state = QuantumState::zero(self.layout.registers(&self.circuit.registers))?;
        let mut session = OracleSession::new(self.instance);
        let mut records = Vec::new();
        let mut collapses = Vec::new();
        let copies = self.layout.copies;
        for (i, step) in self.circuit.steps.iter().enumerate() {
            let active = i..copies;
            for op in &step.unitary {
                self.apply_on_copies(&mut state, op, active.clone())?;
            }
            if let Some(reg) = &step.collapse {
                let mut record = self.reweight(&state, i, reg)?;
                let Some(n) = choose(&record.reweighted) else {
                    return Ok(Drive {
                        halt: Halt::Pending(record),
                        records,
                        collapses,
                        queries: session.queries(),
                    });
                };
                record.outcome = Some(n);
                project_all(&mut state, reg, active.clone(), n)?;
                collapses.push(MeasurementOutcome {
                    register: reg.clone(),
                    value: n,
                    probability: record.single_copy[n],
                });
                records.push(record);
            }
            if let StepKind::Query(call) = &step.kind {
                session.charge(call)?;
                for c in active.clone() {
                    for wire in call.wires() {
                        let mut w = wire.clone();
                        w.index = PurifiedLayout::label(&wire.index, c);
                        w.data = PurifiedLayout::label(&wire.data, c);
                        apply_wire(&mut state, self.instance, &w, call.mode())?;
                    }
                }
            }
        }
        if let Some(f) = self.layout.final_copy {
            for op in &self.circuit.epilogue {
                self.apply_on_copies(&mut state, op, f..f + 1)?;
            }
        }
        Ok(Drive {
            halt: Halt::Done(state),
            records,
            collapses,
            queries: session.queries(),
        })
    }

    fn reweight(&self, state: &QuantumState, step: usize, register: &str) -> Result<ReweightRecord> {
        let copies = self.layout.copies;
        let r = copies - step;
        let single_copy = state.born_distribution(&PurifiedLayout::label(register, step))?;
        let spans: Vec<(usize, usize)> = (step..copies)
            .map(|c| state.register_span(&PurifiedLayout::label(register, c)))
            .collect::<Result<_>>()?;
        let width = spans[0].1;
        let mut joint = vec![0.0; 1 << width];
        for (k, a) in state.amplitudes().iter().enumerate() {
            let n = (k >> spans[0].0) & mask(width);
            if spans[1..].iter().all(|&(off, w)| (k >> off) & mask(w) == n) {
                joint[n] += a.norm_sqr();
            }
        }
        let mut reweighted: Vec<f64> = match self.options.reweight {
            ReweightMode::Exact => joint
                .iter()
                .zip(&single_copy)
                .map(|(&q, &a)| if a > ZERO_PROBABILITY { q / a.powi(r as i32 - 1) } else { 0.0 })
                .collect(),
            ReweightMode::Unit => joint.clone(),
        };
        let total: f64 = reweighted.iter().sum();
        match self.options.reweight {
            ReweightMode::Exact if (total - 1.0).abs() > REWEIGHT_TOLERANCE => {
                return Err(Error::ReweightNotStochastic { step, total })
            }
            ReweightMode::Unit => reweighted.iter_mut().for_each(|p| *p /= total),
            ReweightMode::Exact => {}
        }
        Ok(ReweightRecord {
            step,
            register: register.to_string(),
            active: r,
            single_copy,
            joint,
            reweighted,
            total,
            outcome: None,
        })
    }

    fn transcript(&self, state_index: usize, state: &QuantumState, drive_collapses: Vec<MeasurementOutcome>, queries: usize) -> RunTranscript {
        let copy_values = |c: usize| -> Vec<usize> {
            self.circuit
                .registers
                .iter()
                .map(|r| {
                    state
                        .register_value(state_index, &PurifiedLayout::label(&r.label, c))
                        .expect("layout registers exist")
                })
                .collect()
        };
        let samples: Vec<Vec<usize>> = self
            .circuit
            .steps
            .iter()
            .enumerate()
            .filter(|(_, s)| matches!(s.kind, StepKind::Sample))
            .map(|(i, _)| copy_values(i))
            .collect();
        RunTranscript {
            samples_used: samples.len(),
            samples,
            collapses: drive_collapses,
            final_outcome: self.layout.final_copy.map(copy_values),
            queries_used: queries,
            steps: self.circuit.steps.len(),
        }
    }
}

fn project_all(state: &mut QuantumState, register: &str, copies: std::ops::Range<usize>, n: usize) -> Result<()> {
    let spans: Vec<(usize, usize)> = copies
        .map(|c| state.register_span(&PurifiedLayout::label(register, c)))
        .collect::<Result<_>>()?;
    let amps = state.amplitudes_mut();
    let mut weight = 0.0;
    for (k, a) in amps.iter_mut().enumerate() {
        if spans.iter().all(|&(off, w)| (k >> off) & mask(w) == n) {
            weight += a.norm_sqr();
        } else {
            *a = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    if weight <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityBranch {
            register: register.to_string(),
            value: n,
            probability: weight,
        });
    }
    let scale = 1.0 / weight.sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
    Ok(())
}

/// Runs the purified circuit with default options.
pub fn run_purified<R: Rng + ?Sized>(
    circuit: &StepCircuit,
    instance: &ProblemInstance,
    rng: &mut R,
) -> Result<RunTranscript> {
    run_purified_traced(circuit, instance, rng, PurifiedOptions::default()).map(|(t, _)| t)
}

/// Runs the purified circuit and returns every reweighted measurement alongside the transcript.
pub fn run_purified_traced<R: Rng + ?Sized>(
    circuit: &StepCircuit,
    instance: &ProblemInstance,
    rng: &mut R,
    options: PurifiedOptions,
) -> Result<(RunTranscript, Vec<ReweightRecord>)> {
    let machine = Machine::new(circuit, instance, options)?;
    let drive = machine.drive(&mut |p| Some(sample_weights(p.iter().copied(), rng)))?;
    let Halt::Done(state) = drive.halt else {
        unreachable!("every collapse was given an outcome")
    };
    let k = state.sample_index(rng);
    Ok((machine.transcript(k, &state, drive.collapses, drive.queries), drive.records))
}

enum Node {
    Collapse { cdf: Vec<f64> },
    Final { cdf: Vec<f64>, state: QuantumState, collapses: Vec<MeasurementOutcome>, queries: usize },
}

/// Draws many purified transcripts from one circuit.
///
/// The tensor state reached after a given sequence of collapse outcomes is
/// deterministic, so each one is computed once and cached; individual draws
/// then only walk the cached distributions. The transcript distribution is
/// the same as repeated [`run_purified`] calls.
pub struct PurifiedSampler<'a> {
    machine: Machine<'a>,
    nodes: HashMap<Vec<usize>, Node>,
    records: Vec<ReweightRecord>,
}

impl<'a> PurifiedSampler<'a> {
    pub fn new(circuit: &'a StepCircuit, instance: &'a ProblemInstance, options: PurifiedOptions) -> Result<Self> {
        Ok(PurifiedSampler {
            machine: Machine::new(circuit, instance, options)?,
            nodes: HashMap::new(),
            records: Vec::new(),
        })
    }

    /// Every distinct reweighted measurement met so far.
    pub fn records(&self) -> &[ReweightRecord] {
        &self.records
    }

    fn ensure(&mut self, prefix: &[usize]) -> Result<()> {
        if !self.nodes.contains_key(prefix) {
            let mut forced = prefix.iter().copied();
            let drive = self.machine.drive(&mut |_| forced.next())?;
            let node = match drive.halt {
                Halt::Pending(record) => {
                    let cdf = cumulative(&record.reweighted);
                    self.records.push(record);
                    Node::Collapse { cdf }
                }
                Halt::Done(state) => Node::Final {
                    cdf: cumulative(&state.joint_distribution()),
                    state,
                    collapses: drive.collapses,
                    queries: drive.queries,
                },
            };
            self.nodes.insert(prefix.to_vec(), node);
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<RunTranscript> {
        let mut prefix = Vec::new();
        loop {
            let u: f64 = rng.random();
            self.ensure(&prefix)?;
            match &self.nodes[&prefix] {
                Node::Collapse { cdf } => prefix.push(pick(cdf, u)),
                Node::Final {
                    cdf,
                    state,
                    collapses,
                    queries,
                } => {
                    let k = pick(cdf, u);
                    return Ok(self.machine.transcript(k, state, collapses.clone(), *queries));
                }
            }
        }
    }
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

fn pick(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("nonempty distribution");
    let target = u * total;
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_direct, Step};
    use crate::problems::ProblemKind;
    use crate::state::Gate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trivial() -> ProblemInstance {
        ProblemInstance::from_table(ProblemKind::Search, vec![0, 0]).unwrap()
    }

    #[test]
    fn hadamard_then_full_collapse_on_two_copies() {
        let c = StepCircuit::new(
            vec![Register::new("q", 1)],
            vec![
                Step::sample().with_unitary(vec![GateOp::on(Gate::H, "q")]).with_collapse("q"),
                Step::sample(),
            ],
        );
        let inst = trivial();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (t, records) = run_purified_traced(&c, &inst, &mut rng, PurifiedOptions::default()).unwrap();
        let rec = &records[0];
        assert_eq!(rec.active, 2);
        // Only 00 and 11 survive, each with joint weight 1/4, reweighted by 1/a = 2.
        assert!((rec.joint[0] - 0.25).abs() < 1e-12 && (rec.joint[1] - 0.25).abs() < 1e-12);
        assert!((rec.reweighted[0] - 0.5).abs() < 1e-12 && (rec.reweighted[1] - 0.5).abs() < 1e-12);
        let n = t.collapses[0].value;
        assert_eq!(t.samples, vec![vec![n], vec![n]]);
    }

    #[test]
    fn single_step_matches_direct() {
        let c = StepCircuit::new(
            vec![Register::new("q", 2)],
            vec![Step::sample().with_unitary(vec![GateOp::on(Gate::Ry { theta: 1.0 }, "q")])],
        );
        let inst = trivial();
        let layout = PurifiedLayout::for_circuit(&c);
        assert_eq!(layout.active, vec![1]);
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            assert_eq!(
                run_purified(&c, &inst, &mut a).unwrap().samples,
                run_direct(&c, &inst, &mut b).unwrap().samples
            );
        }
    }

    #[test]
    fn qubit_cap_is_enforced() {
        let steps = (0..4).map(|_| Step::sample()).collect();
        let c = StepCircuit::new(vec![Register::new("q", 6)], steps);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            run_purified(&c, &trivial(), &mut rng),
            Err(Error::QubitBudgetExceeded { requested: 24, cap: 20 })
        ));
    }

    #[test]
    fn unit_reweighting_skews_outcomes() {
        // Ry(θ)|0⟩ has a = (cos²θ/2, sin²θ/2); with three copies unit weights give a³ normalized.
        let c = StepCircuit::new(
            vec![Register::new("q", 1)],
            vec![
                Step::sample().with_unitary(vec![GateOp::on(Gate::Ry { theta: 1.2 }, "q")]).with_collapse("q"),
                Step::sample(),
                Step::sample(),
            ],
        );
        let inst = trivial();
        let opts = PurifiedOptions {
            reweight: ReweightMode::Unit,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (_, recs) = run_purified_traced(&c, &inst, &mut rng, opts).unwrap();
        let a = &recs[0].single_copy;
        let cube: Vec<f64> = a.iter().map(|x| x.powi(3)).collect();
        let s: f64 = cube.iter().sum();
        assert!((recs[0].reweighted[0] - cube[0] / s).abs() < 1e-12);
        assert!((recs[0].reweighted[0] - a[0]).abs() > 0.05);
    }
}
