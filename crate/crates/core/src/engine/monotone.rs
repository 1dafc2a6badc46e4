//! Fidelity under the reweighted joint measurement `M*`.
//!
//! `M*` measures one register on each of `r` copies, keeps agreeing outcomes
//! and weights outcome `n` by `d_n = 1 / a_n^{r − 1}`, where `a_n` is the Born
//! probability of `n` in the first listed register of the state being
//! measured. Each state uses its own `a`, as in two runs of one circuit on
//! different oracle inputs.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{density_fidelity, DensityMatrix, Register, ZERO_PROBABILITY};

use super::PurifiedLayout;

#[derive(Clone, Debug, PartialEq)]
pub struct MStarSpec {
    /// The measured register in each active copy.
    pub registers: Vec<String>,
}

impl MStarSpec {
    /// Register `label` on copies `0..copies`, named as in [`replicate`].
    pub fn on_copies(label: &str, copies: usize) -> Self {
        MStarSpec {
            registers: (0..copies).map(|c| PurifiedLayout::label(label, c)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MonotoneCase {
    pub first: DensityMatrix,
    pub second: DensityMatrix,
    pub spec: MStarSpec,
}

/// `σ^{⊗r}`, with copy `c` of register `R` labelled `R#c`.
pub fn replicate(sigma: &DensityMatrix, copies: usize) -> Result<DensityMatrix> {
    if copies == 0 {
        return Err(Error::InvalidParameters("at least one copy".into()));
    }
    let mut out: Option<DensityMatrix> = None;
    for c in 0..copies {
        let regs: Vec<Register> = sigma
            .registers()
            .iter()
            .map(|r| Register::new(PurifiedLayout::label(&r.label, c), r.qubits))
            .collect();
        let copy = DensityMatrix::with_registers(sigma.matrix().clone(), regs)?;
        out = Some(match out {
            None => copy,
            Some(acc) => acc.tensor(&copy)?,
        });
    }
    Ok(out.expect("copies ≥ 1"))
}

fn spans(rho: &DensityMatrix, labels: &[String]) -> Result<Vec<(usize, usize)>> {
    let n: usize = rho.registers().iter().map(|r| r.qubits).sum();
    labels
        .iter()
        .map(|l| {
            let mut off = n;
            for r in rho.registers() {
                off -= r.qubits;
                if &r.label == l {
                    return Ok((off, r.qubits));
                }
            }
            Err(Error::UnknownRegister(l.clone()))
        })
        .collect()
}

/// `Σ_n d_n Π_n ρ Π_n` with `Π_n` the projector onto "every listed register equals `n`".
pub fn apply_m_star(rho: &DensityMatrix, spec: &MStarSpec) -> Result<DensityMatrix> {
    if spec.registers.is_empty() {
        return Err(Error::InvalidParameters("M* needs at least one register".into()));
    }
    let spans = spans(rho, &spec.registers)?;
    let width = spans[0].1;
    if spans.iter().any(|&(_, w)| w != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            found: spans.iter().map(|s| s.1).find(|&w| w != width).unwrap_or(width),
        });
    }
    let r = spans.len() as i32;
    let m = rho.matrix();
    let dim = rho.dim();
    let value = |k: usize, (off, w): (usize, usize)| (k >> off) & ((1 << w) - 1);
    let mut a = vec![0.0; 1 << width];
    for k in 0..dim {
        a[value(k, spans[0])] += m[(k, k)].re;
    }
    // Agreeing outcome of basis state k, if all listed registers agree.
    let agreed = |k: usize| -> Option<usize> {
        let n = value(k, spans[0]);
        spans[1..].iter().all(|&s| value(k, s) == n).then_some(n)
    };
    let mut out = DMatrix::zeros(dim, dim);
    for row in 0..dim {
        let Some(n) = agreed(row) else { continue };
        if a[n] <= ZERO_PROBABILITY {
            continue;
        }
        let d = 1.0 / a[n].powi(r - 1);
        for col in 0..dim {
            if agreed(col) == Some(n) {
                out[(row, col)] = m[(row, col)] * Complex64::new(d, 0.0);
            }
        }
    }
    DensityMatrix::with_registers(out, rho.registers().to_vec())
}

/// `(F(ρ′₁, ρ′₂), F(M*ρ′₁, M*ρ′₂))` for each case.
pub fn check_fidelity_monotone(cases: &[MonotoneCase]) -> Result<Vec<(f64, f64)>> {
    cases
        .iter()
        .map(|case| {
            if case.first.dim() != case.second.dim() {
                return Err(Error::DimensionMismatch {
                    expected: case.first.dim(),
                    found: case.second.dim(),
                });
            }
            let before = density_fidelity(&case.first, &case.second)?;
            let after = density_fidelity(
                &apply_m_star(&case.first, &case.spec)?,
                &apply_m_star(&case.second, &case.spec)?,
            )?;
            Ok((before, after))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{random, QuantumState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn m_star_preserves_trace_on_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random::random_state(vec![Register::new("w", 2)], &mut rng);
        for r in 1..=3 {
            let rho = replicate(&s.to_density(), r).unwrap();
            let after = apply_m_star(&rho, &MStarSpec::on_copies("w", r)).unwrap();
            assert!((after.trace() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_and_orthogonal_states() {
        let regs = vec![Register::new("w", 1)];
        let zero = QuantumState::zero(regs.clone()).unwrap().to_density();
        let one = QuantumState::basis(regs, &[1]).unwrap().to_density();
        let spec = MStarSpec::on_copies("w", 2);
        let same = MonotoneCase {
            first: replicate(&zero, 2).unwrap(),
            second: replicate(&zero, 2).unwrap(),
            spec: spec.clone(),
        };
        let orth = MonotoneCase {
            first: replicate(&zero, 2).unwrap(),
            second: replicate(&one, 2).unwrap(),
            spec,
        };
        let res = check_fidelity_monotone(&[same, orth]).unwrap();
        assert!((res[0].0 - 1.0).abs() < 1e-9 && (res[0].1 - 1.0).abs() < 1e-9);
        assert!(res[1].0.abs() < 1e-9 && res[1].1.abs() < 1e-9);
    }
}
