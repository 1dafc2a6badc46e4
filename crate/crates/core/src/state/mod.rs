//! Dense statevectors over labelled qubit registers.
//!
//! Basis indices are big-endian over the register list: the first register
//! occupies the most significant bits, and within a register qubit 0 is the
//! most significant qubit. A register's value in basis state `k` is therefore
//! the binary number formed by its qubits in order.
//!
//! Fidelity throughout the crate is the square-root (Uhlmann) fidelity
//! `F(ρ, σ) = Tr √(√ρ σ √ρ)`, which for pure states is `|⟨a|b⟩|`, not its square.

mod density;
mod gate;
pub mod random;

pub use density::{density_fidelity, DensityMatrix, Ensemble};
pub use gate::{check_unitary, unitarity_deviation, Gate, GateOp, Matrix, Target, UNITARY_TOLERANCE};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use gate::GateAction;

/// Allowed drift of the L2 norm away from one.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Largest subsystem for which density matrices are materialized.
pub const DENSITY_QUBIT_CAP: usize = 12;
/// Branches below this probability are treated as impossible.
pub const ZERO_PROBABILITY: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub label: String,
    pub qubits: usize,
}

impl Register {
    pub fn new(label: impl Into<String>, qubits: usize) -> Self {
        Register {
            label: label.into(),
            qubits,
        }
    }
}

/// Result of a collapsing measurement of one register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    pub register: String,
    pub value: usize,
    pub probability: f64,
}

/// A normalized pure state. Public operations return new states.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
    registers: Vec<Register>,
}

impl QuantumState {
    /// `|0…0⟩` over the given registers.
    pub fn zero(registers: Vec<Register>) -> Result<Self> {
        let values = vec![0; registers.len()];
        Self::basis(registers, &values)
    }

    /// Computational basis state with one value per register.
    pub fn basis(registers: Vec<Register>, values: &[usize]) -> Result<Self> {
        validate_layout(&registers)?;
        if values.len() != registers.len() {
            return Err(Error::DimensionMismatch {
                expected: registers.len(),
                found: values.len(),
            });
        }
        let mut index = 0usize;
        for (reg, &v) in registers.iter().zip(values) {
            if v >> reg.qubits != 0 {
                return Err(Error::InvalidParameters(format!(
                    "value {v} does not fit register `{}`",
                    reg.label
                )));
            }
            index = (index << reg.qubits) | v;
        }
        let n: usize = registers.iter().map(|r| r.qubits).sum();
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState {
            amplitudes,
            registers,
        })
    }

    /// Builds a state from explicit amplitudes; the norm must be one within tolerance.
    pub fn from_amplitudes(registers: Vec<Register>, amplitudes: Vec<Complex64>) -> Result<Self> {
        validate_layout(&registers)?;
        let n: usize = registers.iter().map(|r| r.qubits).sum();
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amplitudes.len(),
            });
        }
        let state = QuantumState {
            amplitudes,
            registers,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameters(format!("state norm is {norm}")));
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit norm.
    pub fn normalized(registers: Vec<Register>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < ZERO_PROBABILITY {
            return Err(Error::InvalidParameters("zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(registers, amplitudes)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn num_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn has_register(&self, label: &str) -> bool {
        self.registers.iter().any(|r| r.label == label)
    }

    pub fn register(&self, label: &str) -> Result<&Register> {
        self.registers
            .iter()
            .find(|r| r.label == label)
            .ok_or_else(|| Error::UnknownRegister(label.to_string()))
    }

    /// Bit offset and width of a register.
    pub(crate) fn register_span(&self, label: &str) -> Result<(usize, usize)> {
        let mut offset = self.num_qubits();
        for r in &self.registers {
            offset -= r.qubits;
            if r.label == label {
                return Ok((offset, r.qubits));
            }
        }
        Err(Error::UnknownRegister(label.to_string()))
    }

    /// Value of a register in basis state `index`.
    pub fn register_value(&self, index: usize, label: &str) -> Result<usize> {
        let (offset, width) = self.register_span(label)?;
        Ok((index >> offset) & mask(width))
    }

    /// All register values of basis state `index`, in layout order.
    pub fn register_values(&self, index: usize) -> Vec<usize> {
        let mut offset = self.num_qubits();
        self.registers
            .iter()
            .map(|r| {
                offset -= r.qubits;
                (index >> offset) & mask(r.qubits)
            })
            .collect()
    }

    /// Global bit positions of the targets, first target most significant.
    pub(crate) fn resolve_targets(&self, targets: &[Target]) -> Result<Vec<usize>> {
        let mut positions = Vec::new();
        for t in targets {
            let (offset, width) = self.register_span(&t.register)?;
            match t.qubit {
                Some(q) if q < width => positions.push(offset + width - 1 - q),
                Some(q) => {
                    return Err(Error::InvalidParameters(format!(
                        "qubit {q} out of range for `{}`",
                        t.register
                    )))
                }
                None => positions.extend((0..width).map(|q| offset + width - 1 - q)),
            }
        }
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != positions.len() {
            return Err(Error::InvalidParameters("repeated target qubit".into()));
        }
        Ok(positions)
    }

    /// Applies a gate to the given targets. The gate is checked for unitarity.
    pub fn apply_unitary(&self, gate: &Gate, targets: &[Target]) -> Result<Self> {
        if let Gate::Unitary { matrix } = gate {
            check_unitary(&matrix.0)?;
        }
        let mut out = self.clone();
        out.apply_in_place(gate, targets)?;
        Ok(out)
    }

    pub fn apply(&self, op: &GateOp) -> Result<Self> {
        self.apply_unitary(&op.gate, &op.targets)
    }

    /// Applies without re-checking unitarity of explicit matrices.
    pub(crate) fn apply_in_place(&mut self, gate: &Gate, targets: &[Target]) -> Result<()> {
        let positions = self.resolve_targets(targets)?;
        let action = gate.action(positions.len())?;
        match action {
            GateAction::Identity => {}
            GateAction::EachQubit(u) => {
                for &p in &positions {
                    self.for_each_group(&[p], |g| {
                        let (a, b) = (g[0], g[1]);
                        g[0] = u[0][0] * a + u[0][1] * b;
                        g[1] = u[1][0] * a + u[1][1] * b;
                    });
                }
            }
            other => self.for_each_group(&positions, |g| other.apply_group(g)),
        }
        Ok(())
    }

    /// Gathers the `2^k` amplitudes sharing all non-target bits, hands them to
    /// `f` indexed by the target bits (first position most significant), and
    /// scatters the result back.
    pub(crate) fn for_each_group(&mut self, positions: &[usize], mut f: impl FnMut(&mut [Complex64])) {
        let k = positions.len();
        let size = 1usize << k;
        let offsets: Vec<usize> = (0..size)
            .map(|j| {
                positions
                    .iter()
                    .enumerate()
                    .map(|(t, &p)| ((j >> (k - 1 - t)) & 1) << p)
                    .sum()
            })
            .collect();
        let target_mask: usize = positions.iter().map(|p| 1usize << p).sum();
        let mut buf = vec![ZERO; size];
        for base in 0..self.amplitudes.len() {
            if base & target_mask != 0 {
                continue;
            }
            for (slot, off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amplitudes[base | off];
            }
            f(&mut buf);
            for (slot, off) in buf.iter().zip(&offsets) {
                self.amplitudes[base | off] = *slot;
            }
        }
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Probability of each value of one register.
    pub fn born_distribution(&self, label: &str) -> Result<Vec<f64>> {
        let (offset, width) = self.register_span(label)?;
        let mut probs = vec![0.0; 1 << width];
        for (i, a) in self.amplitudes.iter().enumerate() {
            probs[(i >> offset) & mask(width)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Probability of every basis state of the whole system.
    pub fn joint_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws a basis index from the Born distribution without touching the state.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_weights(self.amplitudes.iter().map(|a| a.norm_sqr()), rng)
    }

    /// Projects one register onto `value` and renormalizes.
    pub fn project(&self, label: &str, value: usize) -> Result<(Self, f64)> {
        let (offset, width) = self.register_span(label)?;
        let mut out = self.clone();
        let mut weight = 0.0;
        for (i, a) in out.amplitudes.iter_mut().enumerate() {
            if (i >> offset) & mask(width) == value {
                weight += a.norm_sqr();
            } else {
                *a = ZERO;
            }
        }
        if weight <= ZERO_PROBABILITY {
            return Err(Error::ZeroProbabilityBranch {
                register: label.to_string(),
                value,
                probability: weight,
            });
        }
        let scale = 1.0 / weight.sqrt();
        out.amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok((out, weight))
    }

    /// Collapsing measurement of one register.
    pub fn collapse<R: Rng + ?Sized>(&self, label: &str, rng: &mut R) -> Result<(Self, MeasurementOutcome)> {
        let probs = self.born_distribution(label)?;
        let value = sample_weights(probs.iter().copied(), rng);
        let (state, probability) = self.project(label, value)?;
        Ok((
            state,
            MeasurementOutcome {
                register: label.to_string(),
                value,
                probability,
            },
        ))
    }

    pub fn inner(&self, other: &QuantumState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other`; register labels must be disjoint.
    pub fn tensor(&self, other: &QuantumState) -> Result<Self> {
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        validate_layout(&registers)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(QuantumState {
            amplitudes,
            registers,
        })
    }

    /// Same amplitudes under new register labels (widths must match).
    pub fn relabel(&self, registers: Vec<Register>) -> Result<Self> {
        validate_layout(&registers)?;
        let n: usize = registers.iter().map(|r| r.qubits).sum();
        if n != self.num_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits(),
                found: n,
            });
        }
        Ok(QuantumState {
            amplitudes: self.amplitudes.clone(),
            registers,
        })
    }

    /// Reduced density matrix of the listed registers (in the given order).
    pub fn reduced_density(&self, labels: &[&str]) -> Result<DensityMatrix> {
        let mut positions = Vec::new();
        let mut regs = Vec::new();
        for l in labels {
            let (offset, width) = self.register_span(l)?;
            positions.extend((0..width).rev().map(|b| offset + b));
            regs.push(self.register(l)?.clone());
        }
        if positions.len() > DENSITY_QUBIT_CAP {
            return Err(Error::QubitBudgetExceeded {
                requested: positions.len(),
                cap: DENSITY_QUBIT_CAP,
            });
        }
        let k = positions.len();
        let sub_dim = 1usize << k;
        let kept_mask: usize = positions.iter().map(|p| 1usize << p).sum();
        // Group amplitudes by the traced-out part of the index.
        let rest_bits: Vec<usize> = (0..self.num_qubits()).filter(|b| kept_mask >> b & 1 == 0).collect();
        let rest_dim = 1usize << rest_bits.len();
        let mut columns = vec![vec![ZERO; sub_dim]; rest_dim];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let sub = positions
                .iter()
                .enumerate()
                .fold(0usize, |acc, (t, &p)| acc | (((i >> p) & 1) << (k - 1 - t)));
            let rest = rest_bits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (t, &p)| acc | (((i >> p) & 1) << t));
            columns[rest][sub] = *a;
        }
        let mut m = nalgebra::DMatrix::zeros(sub_dim, sub_dim);
        for col in &columns {
            for r in 0..sub_dim {
                if col[r] == ZERO {
                    continue;
                }
                for c in 0..sub_dim {
                    m[(r, c)] += col[r] * col[c].conj();
                }
            }
        }
        DensityMatrix::with_registers(m, regs)
    }

    /// `Tr ρ²` of one register's reduced state.
    pub fn reduced_purity(&self, label: &str) -> Result<f64> {
        let (_, width) = self.register_span(label)?;
        if width == self.num_qubits() {
            return Ok(1.0);
        }
        Ok(self.reduced_density(&[label])?.purity())
    }

    /// The pure state of a register that is unentangled with the rest, up to
    /// global phase. Fails when the register's purity is below `1 − tol`.
    pub fn extract_register(&self, label: &str, tol: f64) -> Result<QuantumState> {
        let register = self.register(label)?.clone();
        let purity = self.reduced_purity(label)?;
        if purity < 1.0 - tol {
            return Err(Error::CopyOfEntangledRegister {
                register: label.to_string(),
                purity,
            });
        }
        let (offset, width) = self.register_span(label)?;
        // Slice along the heaviest configuration of the other qubits.
        let rest_mask = !(mask(width) << offset) & mask(self.num_qubits());
        let mut weights = std::collections::HashMap::new();
        for (i, a) in self.amplitudes.iter().enumerate() {
            *weights.entry(i & rest_mask).or_insert(0.0) += a.norm_sqr();
        }
        let best = weights
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(r, _)| r)
            .unwrap_or(0);
        let amps: Vec<Complex64> = (0..1usize << width)
            .map(|v| self.amplitudes[best | (v << offset)])
            .collect();
        QuantumState::normalized(vec![register], amps)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// Pure-state fidelity `|⟨a|b⟩|`.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    Ok(a.inner(b)?.norm().min(1.0))
}

pub(crate) fn mask(width: usize) -> usize {
    if width >= usize::BITS as usize {
        usize::MAX
    } else {
        (1usize << width) - 1
    }
}

fn validate_layout(registers: &[Register]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for r in registers {
        if !seen.insert(r.label.as_str()) {
            return Err(Error::InvalidParameters(format!("duplicate register `{}`", r.label)));
        }
    }
    let n: usize = registers.iter().map(|r| r.qubits).sum();
    if n > 30 {
        return Err(Error::QubitBudgetExceeded { requested: n, cap: 30 });
    }
    Ok(())
}

/// Samples an index proportionally to nonnegative weights (which need not be normalized).
pub(crate) fn sample_weights<R: Rng + ?Sized>(weights: impl Iterator<Item = f64> + Clone, rng: &mut R) -> usize {
    let total: f64 = weights.clone().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, w) in weights.enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}
