//! Exact transcript distributions by branch enumeration over the joint state.

use std::collections::BTreeMap;

use super::{Semantics, StepCircuit, StepKind, TranscriptKey};
use crate::error::{Error, Result};
use crate::oracle::{apply_wire, OracleSession};
use crate::problems::ProblemInstance;
use crate::state::{QuantumState, ZERO_PROBABILITY};

pub type TranscriptDistribution = BTreeMap<TranscriptKey, f64>;

/// Enumerates every transcript of the direct semantics with its probability.
/// Fails once more than `budget` transcripts have been produced.
pub fn exact_distribution(
    circuit: &StepCircuit,
    instance: &ProblemInstance,
    budget: usize,
) -> Result<TranscriptDistribution> {
    circuit.validate(Semantics::Sampling)?;
    let mut out = TranscriptDistribution::new();
    let state = QuantumState::zero(circuit.registers.clone())?;
    let key = TranscriptKey {
        samples: Vec::new(),
        collapses: Vec::new(),
        final_outcome: None,
    };
    // The call sequence is fixed, so the query contract can be checked up front.
    let mut session = OracleSession::new(instance);
    for step in &circuit.steps {
        if let StepKind::Query(call) = &step.kind {
            session.charge(call)?;
        }
    }
    let mut walker = Walker {
        circuit,
        instance,
        budget,
        out: &mut out,
    };
    walker.step(0, state, key, 1.0)?;
    Ok(out)
}

struct Walker<'a> {
    circuit: &'a StepCircuit,
    instance: &'a ProblemInstance,
    budget: usize,
    out: &'a mut TranscriptDistribution,
}

impl Walker<'_> {
    fn emit(&mut self, key: TranscriptKey, p: f64) -> Result<()> {
        *self.out.entry(key).or_insert(0.0) += p;
        if self.out.len() > self.budget {
            return Err(Error::EnumerationBudgetExceeded {
                requested: self.out.len() as u128,
                budget: self.budget as u128,
            });
        }
        Ok(())
    }

    fn step(
        &mut self,
        i: usize,
        mut state: QuantumState,
        key: TranscriptKey,
        p: f64,
    ) -> Result<()> {
        if i == self.circuit.steps.len() {
            for op in &self.circuit.epilogue {
                state.apply_in_place(&op.gate, &op.targets)?;
            }
            if !self.circuit.final_measure {
                return self.emit(key, p);
            }
            for (k, pk) in state.joint_distribution().into_iter().enumerate() {
                if pk > ZERO_PROBABILITY {
                    let mut key = key.clone();
                    key.final_outcome = Some(state.register_values(k));
                    self.emit(key, p * pk)?;
                }
            }
            return Ok(());
        }
        let step = &self.circuit.steps[i];
        for op in &step.unitary {
            state.apply_in_place(&op.gate, &op.targets)?;
        }
        let branches: Vec<(QuantumState, TranscriptKey, f64)> = match &step.collapse {
            None => vec![(state, key, p)],
            Some(reg) => {
                let probs = state.born_distribution(reg)?;
                let mut b = Vec::new();
                for (n, pn) in probs.into_iter().enumerate() {
                    if pn > ZERO_PROBABILITY {
                        let (projected, _) = state.project(reg, n)?;
                        let mut key = key.clone();
                        key.collapses.push(n);
                        b.push((projected, key, p * pn));
                    }
                }
                b
            }
        };
        for (state, key, p) in branches {
            match &step.kind {
                StepKind::Sample => {
                    for (k, pk) in state.joint_distribution().into_iter().enumerate() {
                        if pk > ZERO_PROBABILITY {
                            let mut key = key.clone();
                            key.samples.push(state.register_values(k));
                            self.step(i + 1, state.clone(), key, p * pk)?;
                        }
                    }
                }
                StepKind::Query(call) => {
                    let mut next = state;
                    for wire in call.wires() {
                        apply_wire(&mut next, self.instance, wire, call.mode())?;
                    }
                    self.step(i + 1, next, key, p)?;
                }
                StepKind::Copy { .. } => unreachable!("rejected by validation"),
            }
        }
        Ok(())
    }
}

/// Total-variation distance `½ Σ |p − q|` over the union of supports.
pub fn total_variation(p: &TranscriptDistribution, q: &TranscriptDistribution) -> f64 {
    let mut tv = 0.0;
    for (k, pk) in p {
        tv += (pk - q.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, qk) in q {
        if !p.contains_key(k) {
            tv += qk;
        }
    }
    tv / 2.0
}

/// Empirical distribution of a list of transcript keys.
pub fn empirical(keys: impl IntoIterator<Item = TranscriptKey>) -> TranscriptDistribution {
    let mut counts = TranscriptDistribution::new();
    let mut total = 0.0;
    for k in keys {
        *counts.entry(k).or_insert(0.0) += 1.0;
        total += 1.0;
    }
    counts.values_mut().for_each(|v| *v /= total);
    counts
}
