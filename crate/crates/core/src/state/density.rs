use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{QuantumState, Register, DENSITY_QUBIT_CAP};
use crate::error::{Error, Result};

/// An explicit density operator on at most [`DENSITY_QUBIT_CAP`] qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
    registers: Vec<Register>,
}

/// A probability-weighted collection of pure states on a common layout.
#[derive(Clone, Debug, Default)]
pub struct Ensemble {
    pub members: Vec<(f64, QuantumState)>,
}

impl Ensemble {
    pub fn new() -> Self {
        Ensemble::default()
    }

    pub fn push(&mut self, weight: f64, state: QuantumState) {
        self.members.push((weight, state));
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(w, _)| w).sum()
    }

    /// `Σ w_k |ψ_k⟩⟨ψ_k|`, normalized by the total weight.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        let first = self
            .members
            .first()
            .ok_or_else(|| Error::InvalidParameters("empty ensemble".into()))?;
        let dim = first.1.dim();
        let mut m = DMatrix::zeros(dim, dim);
        let total = self.total_weight();
        for (w, s) in &self.members {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            let v = DMatrix::from_column_slice(dim, 1, s.amplitudes());
            m += (&v * v.adjoint()) * Complex64::new(w / total, 0.0);
        }
        DensityMatrix::with_registers(m, first.1.registers().to_vec())
    }
}

impl DensityMatrix {
    pub fn with_registers(matrix: DMatrix<Complex64>, registers: Vec<Register>) -> Result<Self> {
        let n: usize = registers.iter().map(|r| r.qubits).sum();
        if n > DENSITY_QUBIT_CAP {
            return Err(Error::QubitBudgetExceeded {
                requested: n,
                cap: DENSITY_QUBIT_CAP,
            });
        }
        if matrix.nrows() != 1 << n || matrix.ncols() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: matrix.nrows(),
            });
        }
        Ok(DensityMatrix { matrix, registers })
    }

    pub fn from_pure(state: &QuantumState) -> Self {
        let v = DMatrix::from_column_slice(state.dim(), 1, state.amplitudes());
        DensityMatrix {
            matrix: &v * v.adjoint(),
            registers: state.registers().to_vec(),
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `U ρ U†` for a full-dimension unitary.
    pub fn conjugate(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(DensityMatrix {
            matrix: u * &self.matrix * u.adjoint(),
            registers: self.registers.clone(),
        })
    }

    /// `A ⊗ B` of two density matrices.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let mut registers = self.registers.clone();
        registers.extend(other.registers.iter().cloned());
        DensityMatrix::with_registers(self.matrix.kronecker(&other.matrix), registers)
    }

    /// Traces out everything except the listed registers.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let n: usize = self.registers.iter().map(|r| r.qubits).sum();
        let mut offsets = Vec::new();
        let mut off = n;
        for r in &self.registers {
            off -= r.qubits;
            offsets.push((r.label.as_str(), off, r.qubits));
        }
        let mut positions = Vec::new();
        let mut regs = Vec::new();
        for label in keep {
            let &(_, o, w) = offsets
                .iter()
                .find(|(l, _, _)| l == label)
                .ok_or_else(|| Error::UnknownRegister(label.to_string()))?;
            positions.extend((0..w).rev().map(|b| o + b));
            regs.push(Register::new(*label, w));
        }
        let k = positions.len();
        let kept_mask: usize = positions.iter().map(|p| 1usize << p).sum();
        let split = |i: usize| -> (usize, usize) {
            let sub = positions
                .iter()
                .enumerate()
                .fold(0, |acc, (t, &p)| acc | (((i >> p) & 1) << (k - 1 - t)));
            (sub, i & !kept_mask)
        };
        let mut out = DMatrix::zeros(1 << k, 1 << k);
        let dim = self.dim();
        for r in 0..dim {
            let (sr, rest_r) = split(r);
            for c in 0..dim {
                let (sc, rest_c) = split(c);
                if rest_r == rest_c {
                    out[(sr, sc)] += self.matrix[(r, c)];
                }
            }
        }
        DensityMatrix::with_registers(out, regs)
    }

    /// Hermitian square root via eigendecomposition, negative eigenvalues clipped.
    pub(crate) fn sqrt(&self) -> DMatrix<Complex64> {
        hermitian_sqrt(&self.matrix)
    }
}

fn hermitian_sqrt(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let hermitian = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = hermitian.symmetric_eigen();
    let roots = eig
        .eigenvalues
        .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
    &eig.eigenvectors * DMatrix::from_diagonal(&roots) * eig.eigenvectors.adjoint()
}

/// Square-root fidelity `Tr √(√ρ σ √ρ)`, computed as the trace norm of `√ρ √σ`.
/// Both operators are normalized by their traces first.
pub fn density_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let (ta, tb) = (a.trace(), b.trace());
    if ta <= 0.0 || tb <= 0.0 {
        return Ok(0.0);
    }
    let prod = a.sqrt() * b.sqrt();
    let singular = prod.singular_values();
    let f = singular.iter().sum::<f64>() / (ta * tb).sqrt();
    Ok(f.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{fidelity, random, Gate, Target};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pure_density_fidelity_matches_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let regs = vec![Register::new("a", 2)];
            let x = random::random_state(regs.clone(), &mut rng);
            let y = random::random_state(regs, &mut rng);
            let direct = fidelity(&x, &y).unwrap();
            let dens = density_fidelity(&x.to_density(), &y.to_density()).unwrap();
            assert!((direct - dens).abs() < 1e-7, "{direct} vs {dens}");
        }
    }

    #[test]
    fn maximally_mixed_qubit() {
        let bell = QuantumState::zero(vec![Register::new("a", 1), Register::new("b", 1)])
            .unwrap()
            .apply_unitary(&Gate::H, &[Target::reg("a")])
            .unwrap()
            .apply_unitary(&Gate::Cnot, &[Target::reg("a"), Target::reg("b")])
            .unwrap();
        let rho = bell.to_density().partial_trace(&["a"]).unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-12);
        let zero = QuantumState::zero(vec![Register::new("a", 1)]).unwrap().to_density();
        // F(I/2, |0⟩⟨0|) = √(1/2)
        assert!((density_fidelity(&rho, &zero).unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn partial_trace_agrees_with_statevector_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let regs = vec![Register::new("a", 1), Register::new("b", 2), Register::new("c", 1)];
        let s = random::random_state(regs, &mut rng);
        let via_state = s.reduced_density(&["c", "a"]).unwrap();
        let via_density = s.to_density().partial_trace(&["c", "a"]).unwrap();
        assert!((via_state.matrix() - via_density.matrix()).norm() < 1e-12);
    }

    #[test]
    fn ensemble_of_orthogonal_states() {
        let zero = QuantumState::zero(vec![Register::new("q", 1)]).unwrap();
        let one = QuantumState::basis(vec![Register::new("q", 1)], &[1]).unwrap();
        let mut e = Ensemble::new();
        e.push(0.25, zero.clone());
        e.push(0.75, one);
        let rho = e.to_density().unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!((density_fidelity(&rho, &zero.to_density()).unwrap() - 0.5).abs() < 1e-9);
    }
}
