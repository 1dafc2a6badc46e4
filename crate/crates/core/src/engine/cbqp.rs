use rand::Rng;

use super::workspace::Workspace;
use super::{RunTranscript, Semantics, StepCircuit, StepKind};
use crate::error::Result;
use crate::oracle::OracleSession;
use crate::problems::ProblemInstance;

/// A register may be copied only when its reduced purity is at least `1 − tol`.
pub const COPY_PURITY_TOLERANCE: f64 = 1e-9;

/// Runs a circuit whose `Copy` steps append a fresh register holding the
/// source register's pure state. Copies join the layout in creation order and
/// may be acted on by later unitaries, including the epilogue.
pub fn run_cbqp<R: Rng + ?Sized>(
    circuit: &StepCircuit,
    instance: &ProblemInstance,
    rng: &mut R,
) -> Result<RunTranscript> {
    circuit.validate(Semantics::Copying)?;
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
    for step in &circuit.steps {
        for op in &step.unitary {
            ws.apply(op)?;
        }
        if let Some(reg) = &step.collapse {
            transcript.collapses.push(ws.collapse(reg, rng)?);
        }
        match &step.kind {
            StepKind::Query(call) => {
                session.charge(call)?;
                ws.query(call, instance)?;
            }
            StepKind::Copy { source, target } => {
                let pure = ws.extract(source, COPY_PURITY_TOLERANCE)?;
                let width = pure.registers()[0].qubits;
                ws.append(pure.relabel(vec![crate::state::Register::new(target.clone(), width)])?)?;
                transcript.samples_used += 1;
            }
            StepKind::Sample => unreachable!("rejected by validation"),
        }
    }
    for op in &circuit.epilogue {
        ws.apply(op)?;
    }
    if circuit.final_measure {
        transcript.final_outcome = Some(ws.sample(rng));
    }
    debug_assert_eq!(ws.layout().len(), circuit.registers.len() + transcript.samples_used);
    transcript.queries_used = session.queries();
    Ok(transcript)
}
