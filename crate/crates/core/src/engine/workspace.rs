//! A workspace kept as a tensor product of independent factors.
//!
//! Every register starts in its own factor; factors merge only when a gate or
//! oracle wire spans them. Block-structured circuits therefore never build the
//! full joint vector.

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::{apply_wire, OracleCall};
use crate::problems::ProblemInstance;
use crate::state::{GateOp, MeasurementOutcome, QuantumState, Register};

/// Qubit budget for one factor.
pub(crate) const FACTOR_QUBIT_CAP: usize = 24;

#[derive(Clone, Debug)]
struct Factor {
    state: QuantumState,
    cdf: Option<Vec<f64>>,
}

impl Factor {
    fn new(state: QuantumState) -> Self {
        Factor { state, cdf: None }
    }

    fn sample_index<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let cdf = self.cdf.get_or_insert_with(|| {
            let mut acc = 0.0;
            self.state
                .amplitudes()
                .iter()
                .map(|a| {
                    acc += a.norm_sqr();
                    acc
                })
                .collect()
        });
        let total = *cdf.last().expect("factor is nonempty");
        let u = rng.random::<f64>() * total;
        cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Workspace {
    factors: Vec<Factor>,
    layout: Vec<Register>,
}

impl Workspace {
    pub(crate) fn new(registers: &[Register]) -> Result<Self> {
        let factors = registers
            .iter()
            .map(|r| QuantumState::zero(vec![r.clone()]).map(Factor::new))
            .collect::<Result<_>>()?;
        Ok(Workspace {
            factors,
            layout: registers.to_vec(),
        })
    }

    pub(crate) fn layout(&self) -> &[Register] {
        &self.layout
    }

    fn factor_of(&self, label: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.state.has_register(label))
            .ok_or_else(|| Error::UnknownRegister(label.to_string()))
    }

    /// Merges the factors holding `labels` and returns the merged factor's index.
    fn gather(&mut self, labels: &[&str]) -> Result<usize> {
        let mut idx: Vec<usize> = labels.iter().map(|l| self.factor_of(l)).collect::<Result<_>>()?;
        idx.sort_unstable();
        idx.dedup();
        let first = idx[0];
        for &j in idx[1..].iter().rev() {
            let other = self.factors.remove(j);
            let merged = self.factors[first].state.tensor(&other.state)?;
            if merged.num_qubits() > FACTOR_QUBIT_CAP {
                return Err(Error::QubitBudgetExceeded {
                    requested: merged.num_qubits(),
                    cap: FACTOR_QUBIT_CAP,
                });
            }
            self.factors[first] = Factor::new(merged);
        }
        Ok(first)
    }

    pub(crate) fn apply(&mut self, op: &GateOp) -> Result<()> {
        let labels: Vec<&str> = op.targets.iter().map(|t| t.register.as_str()).collect();
        let f = self.gather(&labels)?;
        let factor = &mut self.factors[f];
        factor.cdf = None;
        factor.state.apply_in_place(&op.gate, &op.targets)
    }

    pub(crate) fn query(&mut self, call: &OracleCall, instance: &ProblemInstance) -> Result<()> {
        // Wires act on disjoint register pairs, so the parallel phase
        // (−1)^{Σ_j x(i_j) b_j} factorizes into one phase per wire.
        for wire in call.wires() {
            let f = self.gather(&[&wire.index, &wire.data])?;
            let factor = &mut self.factors[f];
            factor.cdf = None;
            apply_wire(&mut factor.state, instance, wire, call.mode())?;
        }
        Ok(())
    }

    pub(crate) fn collapse<R: Rng + ?Sized>(&mut self, label: &str, rng: &mut R) -> Result<MeasurementOutcome> {
        let f = self.factor_of(label)?;
        let factor = &mut self.factors[f];
        let (state, outcome) = factor.state.collapse(label, rng)?;
        *factor = Factor::new(state);
        Ok(outcome)
    }

    /// Born sample of every register, in layout order. The state is untouched.
    pub(crate) fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<usize> {
        let mut values = vec![0; self.layout.len()];
        for factor in &mut self.factors {
            let k = factor.sample_index(rng);
            for (slot, reg) in values.iter_mut().zip(&self.layout) {
                if let Ok(v) = factor.state.register_value(k, &reg.label) {
                    *slot = v;
                }
            }
        }
        values
    }

    /// Pure state of a register, which must be unentangled with the rest.
    pub(crate) fn extract(&self, label: &str, tol: f64) -> Result<QuantumState> {
        let f = self.factor_of(label)?;
        let state = &self.factors[f].state;
        if state.registers().len() == 1 {
            return Ok(state.clone());
        }
        state.extract_register(label, tol)
    }

    /// Adds a fresh independent register in the given state.
    pub(crate) fn append(&mut self, state: QuantumState) -> Result<()> {
        for r in state.registers() {
            if self.layout.iter().any(|l| l.label == r.label) {
                return Err(Error::MalformedCircuit(format!("register `{}` already exists", r.label)));
            }
            self.layout.push(r.clone());
        }
        self.factors.push(Factor::new(state));
        Ok(())
    }

    /// The full joint state in layout order.
    pub(crate) fn joint(&self) -> Result<QuantumState> {
        let n: usize = self.layout.iter().map(|r| r.qubits).sum();
        if n > FACTOR_QUBIT_CAP {
            return Err(Error::QubitBudgetExceeded {
                requested: n,
                cap: FACTOR_QUBIT_CAP,
            });
        }
        let mut joint = QuantumState::zero(self.layout.clone())?;
        let owner: Vec<usize> = self
            .layout
            .iter()
            .map(|r| self.factor_of(&r.label))
            .collect::<Result<_>>()?;
        let amps = joint.amplitudes_mut();
        for (k, slot) in amps.iter_mut().enumerate() {
            let values = layout_values(&self.layout, k);
            let mut amp = num_complex::Complex64::new(1.0, 0.0);
            for (fi, factor) in self.factors.iter().enumerate() {
                let mut sub = 0usize;
                for r in factor.state.registers() {
                    let pos = self.layout.iter().position(|l| l.label == r.label).expect("layout covers factors");
                    debug_assert_eq!(owner[pos], fi);
                    sub = (sub << r.qubits) | values[pos];
                }
                amp *= factor.state.amplitudes()[sub];
            }
            *slot = amp;
        }
        Ok(joint)
    }
}

fn layout_values(layout: &[Register], mut k: usize) -> Vec<usize> {
    let mut values = vec![0; layout.len()];
    for (slot, r) in values.iter_mut().zip(layout).rev() {
        *slot = k & ((1 << r.qubits) - 1);
        k >>= r.qubits;
    }
    values
}
