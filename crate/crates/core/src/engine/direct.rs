use rand::Rng;

use super::workspace::Workspace;
use super::{RunTranscript, Semantics, StepCircuit, StepKind};
use crate::error::{Error, Result};
use crate::oracle::OracleSession;
use crate::problems::ProblemInstance;
use crate::state::QuantumState;

/// Joint workspace state around the step's final action.
#[derive(Clone, Debug)]
pub struct StepSnapshot {
    pub step: usize,
    /// After the unitary and the collapsing measurement.
    pub before: QuantumState,
    /// After the sample or query.
    pub after: QuantumState,
}

/// Runs a circuit with non-collapsing samples drawn straight from the current state.
pub fn run_direct<R: Rng + ?Sized>(
    circuit: &StepCircuit,
    instance: &ProblemInstance,
    rng: &mut R,
) -> Result<RunTranscript> {
    execute(circuit, instance, rng, None)
}

/// Like [`run_direct`], also returning the joint state around every step.
pub fn run_direct_traced<R: Rng + ?Sized>(
    circuit: &StepCircuit,
    instance: &ProblemInstance,
    rng: &mut R,
) -> Result<(RunTranscript, Vec<StepSnapshot>)> {
    let mut snaps = Vec::new();
    let t = execute(circuit, instance, rng, Some(&mut snaps))?;
    Ok((t, snaps))
}

fn execute<R: Rng + ?Sized>(
    circuit: &StepCircuit,
    instance: &ProblemInstance,
    rng: &mut R,
    mut snaps: Option<&mut Vec<StepSnapshot>>,
) -> Result<RunTranscript> {
    circuit.validate(Semantics::Sampling)?;
    let mut ws = Workspace::new(&circuit.registers)?;
    let mut session = OracleSession::new(instance);
    let mut transcript = RunTranscript {
        samples: Vec::new(),
        collapses: Vec::new(),
        final_outcome: None,
        queries_used: 0,
        samples_used: 0,
        steps: circuit.steps.len(),
    };
    for (i, step) in circuit.steps.iter().enumerate() {
        for op in &step.unitary {
            ws.apply(op)?;
        }
        if let Some(reg) = &step.collapse {
            transcript.collapses.push(ws.collapse(reg, rng)?);
        }
        let before = match snaps {
            Some(_) => Some(ws.joint()?),
            None => None,
        };
        match &step.kind {
            StepKind::Sample => {
                transcript.samples.push(ws.sample(rng));
                transcript.samples_used += 1;
            }
            StepKind::Query(call) => {
                session.charge(call)?;
                ws.query(call, instance)?;
            }
            StepKind::Copy { .. } => unreachable!("rejected by validation"),
        }
        if let (Some(list), Some(before)) = (snaps.as_deref_mut(), before) {
            list.push(StepSnapshot {
                step: i,
                before,
                after: ws.joint()?,
            });
        }
    }
    for op in &circuit.epilogue {
        ws.apply(op)?;
    }
    if circuit.final_measure {
        transcript.final_outcome = Some(ws.sample(rng));
    }
    transcript.queries_used = session.queries();
    Ok(transcript)
}

/// The pure state after the first `steps` steps, ignoring samples.
///
/// Fails on a collapsing measurement, since the result would not be pure.
pub fn evolve_pure(circuit: &StepCircuit, instance: &ProblemInstance, steps: usize) -> Result<QuantumState> {
    circuit.validate(Semantics::Sampling)?;
    if steps > circuit.steps.len() {
        return Err(Error::InvalidParameters(format!(
            "circuit has {} steps, asked for {steps}",
            circuit.steps.len()
        )));
    }
    let mut state = QuantumState::zero(circuit.registers.clone())?;
    let mut session = OracleSession::new(instance);
    for step in &circuit.steps[..steps] {
        for op in &step.unitary {
            state.apply_in_place(&op.gate, &op.targets)?;
        }
        if step.collapse.is_some() {
            return Err(Error::MalformedCircuit("collapsing measurement in a pure evolution".into()));
        }
        if let StepKind::Query(call) = &step.kind {
            state = session.apply(call, &state)?;
        }
    }
    Ok(state)
}
