//! Step-circuit executors.
//!
//! A [`StepCircuit`] is a list of steps over a fixed register layout. Each
//! step applies its unitaries, then an optional collapsing measurement of one
//! register, then exactly one of:
//!
//! * `Sample` – a non-collapsing measurement of the whole workspace,
//! * `Query` – an oracle call,
//! * `Copy` – an unentangled copy of one register (copy semantics only).
//!
//! After the last step the `epilogue` unitaries run and, if `final_measure` is
//! set, the workspace is measured once more.
//!
//! Three executors share this format:
//!
//! * [`run_direct`] samples the current state without disturbing it,
//! * [`run_purified`] replays the run on a tensor product of workspace copies
//!   with reweighted joint measurements,
//! * [`run_cbqp`] executes `Copy` steps.

mod cbqp;
mod direct;
mod exact;
mod monotone;
mod purified;
mod workspace;

pub use cbqp::{run_cbqp, COPY_PURITY_TOLERANCE};
pub use direct::{evolve_pure, run_direct, run_direct_traced, StepSnapshot};
pub use exact::{empirical, exact_distribution, total_variation, TranscriptDistribution};
pub use monotone::{apply_m_star, check_fidelity_monotone, replicate, MStarSpec, MonotoneCase};
pub use purified::{
    run_purified, run_purified_traced, PurifiedLayout, PurifiedOptions, PurifiedSampler, ReweightMode,
    ReweightRecord, DEFAULT_QUBIT_CAP, REWEIGHT_TOLERANCE,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleCall;
use crate::state::{check_unitary, Gate, GateOp, MeasurementOutcome, Register};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Sample,
    Query(OracleCall),
    Copy { source: String, target: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unitary: Vec<GateOp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse: Option<String>,
    #[serde(flatten)]
    pub kind: StepKind,
}

impl Step {
    pub fn sample() -> Self {
        Step {
            unitary: Vec::new(),
            collapse: None,
            kind: StepKind::Sample,
        }
    }

    pub fn query(call: OracleCall) -> Self {
        Step {
            unitary: Vec::new(),
            collapse: None,
            kind: StepKind::Query(call),
        }
    }

    pub fn copy(source: impl Into<String>, target: impl Into<String>) -> Self {
        Step {
            unitary: Vec::new(),
            collapse: None,
            kind: StepKind::Copy {
                source: source.into(),
                target: target.into(),
            },
        }
    }

    pub fn with_unitary(mut self, ops: Vec<GateOp>) -> Self {
        self.unitary = ops;
        self
    }

    pub fn with_collapse(mut self, register: impl Into<String>) -> Self {
        self.collapse = Some(register.into());
        self
    }
}

/// Which executor a circuit is validated for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semantics {
    /// Non-collapsing samples (direct or purified execution).
    Sampling,
    /// Copy gates.
    Copying,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCircuit {
    pub registers: Vec<Register>,
    pub steps: Vec<Step>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub epilogue: Vec<GateOp>,
    #[serde(default)]
    pub final_measure: bool,
    pub declared_q: usize,
    pub declared_p: usize,
}

impl StepCircuit {
    /// Builds a circuit and fills in the declared counts from its steps.
    pub fn new(registers: Vec<Register>, steps: Vec<Step>) -> Self {
        let mut c = StepCircuit {
            registers,
            steps,
            epilogue: Vec::new(),
            final_measure: false,
            declared_q: 0,
            declared_p: 0,
        };
        (c.declared_q, c.declared_p) = c.counted();
        c
    }

    pub fn with_epilogue(mut self, ops: Vec<GateOp>) -> Self {
        self.epilogue = ops;
        self
    }

    pub fn with_final_measure(mut self) -> Self {
        self.final_measure = true;
        self
    }

    /// Queries (parallel calls weighted by their width) and sample-or-copy steps.
    pub fn counted(&self) -> (usize, usize) {
        let mut q = 0;
        let mut p = 0;
        for s in &self.steps {
            match &s.kind {
                StepKind::Query(call) => q += call.weight(),
                StepKind::Sample | StepKind::Copy { .. } => p += 1,
            }
        }
        (q, p)
    }

    /// Number of steps that carry an oracle call.
    pub fn query_steps(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.kind, StepKind::Query(_))).count()
    }

    pub fn workspace_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.qubits).sum()
    }

    pub fn validate(&self, semantics: Semantics) -> Result<()> {
        if self.registers.is_empty() {
            return Err(Error::MalformedCircuit("no registers".into()));
        }
        let mut labels = std::collections::HashSet::new();
        for r in &self.registers {
            if r.label.is_empty() || r.label.contains(['#', '[', ']']) {
                return Err(Error::MalformedCircuit(format!("bad register label `{}`", r.label)));
            }
            if !labels.insert(r.label.clone()) {
                return Err(Error::MalformedCircuit(format!("duplicate register `{}`", r.label)));
            }
        }
        let (q, p) = self.counted();
        if q != self.declared_q || p != self.declared_p {
            return Err(Error::MalformedCircuit(format!(
                "declared (Q, P) = ({}, {}) but steps give ({q}, {p})",
                self.declared_q, self.declared_p
            )));
        }
        for (i, s) in self.steps.iter().enumerate() {
            match (&s.kind, semantics) {
                (StepKind::Copy { .. }, Semantics::Sampling) => {
                    return Err(Error::MalformedCircuit(format!("step {i}: copy gate outside copy semantics")))
                }
                (StepKind::Sample, Semantics::Copying) => {
                    return Err(Error::MalformedCircuit(format!(
                        "step {i}: non-collapsing sample under copy semantics"
                    )))
                }
                (StepKind::Copy { target, .. }, Semantics::Copying) => {
                    if target.is_empty() || target.contains(['#', '[', ']']) || !labels.insert(target.clone()) {
                        return Err(Error::MalformedCircuit(format!("step {i}: bad copy target `{target}`")));
                    }
                }
                (StepKind::Query(call), _) if call.wires().is_empty() => {
                    return Err(Error::MalformedCircuit(format!("step {i}: oracle call with no wires")))
                }
                _ => {}
            }
        }
        for op in self.steps.iter().flat_map(|s| &s.unitary).chain(&self.epilogue) {
            if let Gate::Unitary { matrix } = &op.gate {
                check_unitary(&matrix.0)?;
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuits always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedCircuit(e.to_string()))
    }
}

/// Everything a run reports back.
///
/// `samples[j]` and `final_outcome` hold one value per workspace register in
/// layout order; under copy semantics copies are appended to the layout in the
/// order they were created.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTranscript {
    pub samples: Vec<Vec<usize>>,
    pub collapses: Vec<MeasurementOutcome>,
    pub final_outcome: Option<Vec<usize>>,
    pub queries_used: usize,
    pub samples_used: usize,
    pub steps: usize,
}

/// The observable content of a transcript, for comparing distributions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TranscriptKey {
    pub samples: Vec<Vec<usize>>,
    pub collapses: Vec<usize>,
    pub final_outcome: Option<Vec<usize>>,
}

impl RunTranscript {
    pub fn key(&self) -> TranscriptKey {
        TranscriptKey {
            samples: self.samples.clone(),
            collapses: self.collapses.iter().map(|c| c.value).collect(),
            final_outcome: self.final_outcome.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleWire;

    #[test]
    fn declared_counts_are_checked() {
        let mut c = StepCircuit::new(
            vec![Register::new("q", 1)],
            vec![Step::sample(), Step::query(OracleCall::Phase(OracleWire::new("q", "b")))],
        );
        assert_eq!((c.declared_q, c.declared_p), (1, 1));
        c.validate(Semantics::Sampling).unwrap();
        c.declared_p = 2;
        assert!(matches!(c.validate(Semantics::Sampling), Err(Error::MalformedCircuit(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = StepCircuit::new(
            vec![Register::new("i", 2), Register::new("v", 2)],
            vec![
                Step::query(OracleCall::XorValue(OracleWire::new("i", "v")))
                    .with_unitary(vec![GateOp::on(Gate::H, "i")]),
                Step::sample().with_collapse("v"),
                Step::query(OracleCall::ParallelPhase {
                    wires: vec![OracleWire::windowed("i", "v", 0, 4)],
                }),
            ],
        )
        .with_epilogue(vec![GateOp::new(
            Gate::Cnot,
            vec![crate::state::Target::qubit("i", 0), crate::state::Target::qubit("v", 1)],
        )])
        .with_final_measure();
        let text = c.to_json();
        let back = StepCircuit::from_json(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), text);
    }
}
