//! Oracle gates.
//!
//! * phase: `|i, b⟩ → (−1)^{x(i)·b} |i, b⟩`
//! * XOR value: `|i⟩|y⟩ → |i⟩|y ⊕ f(i)⟩`
//! * parallel: `Q` independent (index, data) pairs queried in one round; the
//!   phase variant multiplies by `(−1)^s` with `s = Σ_j x(i_j)·b_j`.
//!
//! An index register may address a window `offset..offset+len` of the input,
//! so a block of size `len` can be queried with a `⌈log₂ len⌉`-qubit register.
//! Index values outside the window, or past `N`, leave the state unchanged.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{bits_for, ProblemInstance};
use crate::state::{mask, QuantumState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub offset: usize,
    pub len: usize,
}

/// One (index, data) register pair an oracle acts on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleWire {
    pub index: String,
    pub data: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<IndexWindow>,
}

impl OracleWire {
    pub fn new(index: impl Into<String>, data: impl Into<String>) -> Self {
        OracleWire {
            index: index.into(),
            data: data.into(),
            window: None,
        }
    }

    pub fn windowed(index: impl Into<String>, data: impl Into<String>, offset: usize, len: usize) -> Self {
        OracleWire {
            index: index.into(),
            data: data.into(),
            window: Some(IndexWindow { offset, len }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "oracle", rename_all = "snake_case")]
pub enum OracleCall {
    Phase(OracleWire),
    XorValue(OracleWire),
    ParallelPhase { wires: Vec<OracleWire> },
    ParallelXorValue { wires: Vec<OracleWire> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum OracleMode {
    Phase,
    XorValue,
}

impl OracleCall {
    /// Number of queries this call is charged.
    pub fn weight(&self) -> usize {
        self.wires().len()
    }

    pub fn is_parallel(&self) -> bool {
        matches!(self, OracleCall::ParallelPhase { .. } | OracleCall::ParallelXorValue { .. })
    }

    pub fn wires(&self) -> &[OracleWire] {
        match self {
            OracleCall::Phase(w) | OracleCall::XorValue(w) => std::slice::from_ref(w),
            OracleCall::ParallelPhase { wires } | OracleCall::ParallelXorValue { wires } => wires,
        }
    }

    pub(crate) fn mode(&self) -> OracleMode {
        match self {
            OracleCall::Phase(_) | OracleCall::ParallelPhase { .. } => OracleMode::Phase,
            OracleCall::XorValue(_) | OracleCall::ParallelXorValue { .. } => OracleMode::XorValue,
        }
    }
}

/// Applies one wire of an oracle in place.
pub(crate) fn apply_wire(
    state: &mut QuantumState,
    instance: &ProblemInstance,
    wire: &OracleWire,
    mode: OracleMode,
) -> Result<()> {
    let (index_off, index_width) = state.register_span(&wire.index)?;
    let (data_off, data_width) = state.register_span(&wire.data)?;
    let (offset, len) = match wire.window {
        Some(w) => (w.offset, w.len),
        None => (0, instance.n),
    };
    let expected_index = bits_for(len);
    if index_width != expected_index {
        return Err(Error::RegisterSizeMismatch {
            register: wire.index.clone(),
            expected: expected_index,
            found: index_width,
        });
    }
    let expected_data = match mode {
        OracleMode::Phase => {
            if !instance.kind.is_boolean() {
                return Err(Error::InvalidParameters(format!(
                    "phase oracle needs a 0/1 table, {} has a function table",
                    instance.kind
                )));
            }
            1
        }
        OracleMode::XorValue => instance.value_bits(),
    };
    if data_width != expected_data {
        return Err(Error::RegisterSizeMismatch {
            register: wire.data.clone(),
            expected: expected_data,
            found: data_width,
        });
    }
    let lookup = |local: usize| -> Option<usize> {
        let global = offset + local;
        (local < len && global < instance.n).then(|| instance.table[global])
    };
    let amps = state.amplitudes_mut();
    match mode {
        OracleMode::Phase => {
            for (k, a) in amps.iter_mut().enumerate() {
                let local = (k >> index_off) & mask(index_width);
                let b = (k >> data_off) & 1;
                if b == 1 && lookup(local) == Some(1) {
                    *a = -*a;
                }
            }
        }
        OracleMode::XorValue => {
            // An involution: swap each pair once.
            for k in 0..amps.len() {
                let local = (k >> index_off) & mask(index_width);
                if let Some(v) = lookup(local) {
                    let partner = k ^ (v << data_off);
                    if partner > k {
                        amps.swap(k, partner);
                    }
                }
            }
        }
    }
    Ok(())
}

fn apply_all(
    state: &QuantumState,
    instance: &ProblemInstance,
    wires: &[OracleWire],
    mode: OracleMode,
) -> Result<QuantumState> {
    let mut out = state.clone();
    for w in wires {
        apply_wire(&mut out, instance, w, mode)?;
    }
    Ok(out)
}

pub fn apply_phase_oracle(
    state: &QuantumState,
    instance: &ProblemInstance,
    index_reg: &str,
    bit_reg: &str,
) -> Result<QuantumState> {
    apply_all(state, instance, &[OracleWire::new(index_reg, bit_reg)], OracleMode::Phase)
}

pub fn apply_xor_value_oracle(
    state: &QuantumState,
    instance: &ProblemInstance,
    index_reg: &str,
    value_reg: &str,
) -> Result<QuantumState> {
    apply_all(state, instance, &[OracleWire::new(index_reg, value_reg)], OracleMode::XorValue)
}

/// `O_x^Q` on `Q = reg_pairs.len()` (index, bit) pairs.
pub fn apply_parallel_phase_oracle(
    state: &QuantumState,
    instance: &ProblemInstance,
    reg_pairs: &[(&str, &str)],
) -> Result<QuantumState> {
    let wires: Vec<OracleWire> = reg_pairs.iter().map(|(i, b)| OracleWire::new(*i, *b)).collect();
    apply_all(state, instance, &wires, OracleMode::Phase)
}

/// Query bookkeeping for one run. A parallel round must be the only query of the run.
#[derive(Debug)]
pub struct OracleSession<'a> {
    instance: &'a ProblemInstance,
    queries: usize,
    parallel_used: bool,
}

impl<'a> OracleSession<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Self {
        OracleSession {
            instance,
            queries: 0,
            parallel_used: false,
        }
    }

    pub fn instance(&self) -> &'a ProblemInstance {
        self.instance
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    /// Records a call, failing if it would break the single-round contract.
    pub fn charge(&mut self, call: &OracleCall) -> Result<()> {
        if self.parallel_used || (call.is_parallel() && self.queries > 0) {
            return Err(Error::SecondParallelQuery);
        }
        self.parallel_used |= call.is_parallel();
        self.queries += call.weight();
        Ok(())
    }

    /// Charges and applies a call to a single state.
    pub fn apply(&mut self, call: &OracleCall, state: &QuantumState) -> Result<QuantumState> {
        self.charge(call)?;
        apply_all(state, self.instance, call.wires(), call.mode())
    }
}

/// Dense matrix of the phase oracle on `(index, bit)` for inspection and tests.
pub fn phase_oracle_diagonal(instance: &ProblemInstance) -> Vec<Complex64> {
    let bits = instance.index_bits();
    (0..1usize << (bits + 1))
        .map(|k| {
            let i = k >> 1;
            let b = k & 1;
            let flip = b == 1 && i < instance.n && instance.table[i] == 1;
            Complex64::new(if flip { -1.0 } else { 1.0 }, 0.0)
        })
        .collect()
}
