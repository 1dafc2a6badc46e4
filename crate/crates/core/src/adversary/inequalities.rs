//! Numerical checks of the inequalities behind the lower bounds.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::relation::RelationInstance;
use super::weights::{load_profile, WeightScheme};
use crate::algorithms::grover_iterations_circuit;
use crate::engine::{evolve_pure, StepCircuit, DEFAULT_QUBIT_CAP};
use crate::error::{Error, Result};
use crate::problems::{bits_for, ProblemInstance, ProblemKind};
use crate::state::{fidelity, QuantumState};

/// Slack allowed in [`verify_polynomial_inequality`].
pub const POLYNOMIAL_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialReport {
    pub checked: usize,
    pub violations: usize,
    /// Largest `r^k − (r − s)^k − k s` seen; non-positive when the inequality holds.
    pub max_excess: f64,
}

impl PolynomialReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `k s ≥ r^k − (r − s)^k` on each `(k, r, s)`.
pub fn verify_polynomial_inequality(samples: &[(u32, f64, f64)]) -> PolynomialReport {
    let mut report = PolynomialReport {
        checked: 0,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
    };
    for &(k, r, s) in samples {
        let excess = r.powi(k as i32) - (r - s).powi(k as i32) - k as f64 * s;
        report.checked += 1;
        report.max_excess = report.max_excess.max(excess);
        if excess > POLYNOMIAL_SLACK {
            report.violations += 1;
        }
    }
    report
}

/// Uniform `k ∈ [1, 64]`, `r ∈ [0, 1]`, `s ∈ [0, 2r]`.
pub fn sample_polynomial_triples<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<(u32, f64, f64)> {
    (0..count)
        .map(|_| {
            let k = rng.random_range(1..=64);
            let r: f64 = rng.random_range(0.0..=1.0);
            let s = rng.random_range(0.0..=2.0 * r);
            (k, r, s)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    /// `Σ_x ‖ψ_t − ψ_t^x‖²` after `t = 0, …, Q` queries.
    pub lhs: Vec<f64>,
    /// `4 Q²`.
    pub rhs: f64,
}

impl HybridReport {
    pub fn holds(&self) -> bool {
        self.lhs.iter().all(|&v| v <= self.rhs * (1.0 + 1e-9))
    }

    /// The stronger `LHS(t) ≤ 4 t²` at every step.
    pub fn holds_per_step(&self) -> bool {
        self.lhs
            .iter()
            .enumerate()
            .all(|(t, &v)| v <= 4.0 * (t * t) as f64 * (1.0 + 1e-9) + 1e-12)
    }
}

/// Runs `Q` Grover iterations under the empty oracle and under every
/// single-marked oracle and sums the squared distances after each query.
pub fn verify_hybrid_bound(n: usize, q: usize) -> Result<HybridReport> {
    let qubits = bits_for(n) + 1;
    if qubits > DEFAULT_QUBIT_CAP {
        return Err(Error::QubitBudgetExceeded {
            requested: qubits,
            cap: DEFAULT_QUBIT_CAP,
        });
    }
    let circuit = grover_iterations_circuit(n, q)?;
    let empty = ProblemInstance::from_table(ProblemKind::Search, vec![0; n])?;
    let marked: Vec<ProblemInstance> = (0..n)
        .map(|x| {
            let mut t = vec![0; n];
            t[x] = 1;
            ProblemInstance::from_table(ProblemKind::Search, t)
        })
        .collect::<Result<_>>()?;
    let mut lhs = Vec::with_capacity(q + 1);
    for t in 0..=q {
        let base = evolve_pure(&circuit, &empty, t)?;
        let mut sum = 0.0;
        for inst in &marked {
            let other = evolve_pure(&circuit, inst, t)?;
            sum += base
                .amplitudes()
                .iter()
                .zip(other.amplitudes())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>();
        }
        lhs.push(sum);
    }
    Ok(HybridReport {
        n,
        q,
        lhs,
        rhs: 4.0 * (q * q) as f64,
    })
}

/// The state of a measurement-free circuit as it enters query `t`: `t`
/// complete steps, then the unitaries of step `t`.
pub fn state_at_query(circuit: &StepCircuit, instance: &ProblemInstance, t: usize) -> Result<QuantumState> {
    let mut state = evolve_pure(circuit, instance, t)?;
    if let Some(step) = circuit.steps.get(t) {
        for op in &step.unitary {
            state = state.apply(op)?;
        }
    }
    Ok(state)
}

/// States entering query `t` for every member of X, then of Y.
pub fn relation_states(
    relation: &RelationInstance,
    circuit: &StepCircuit,
    t: usize,
) -> Result<(Vec<QuantumState>, Vec<QuantumState>)> {
    let run = |tables: &[Vec<usize>]| -> Result<Vec<QuantumState>> {
        tables
            .iter()
            .map(|table| {
                let inst = ProblemInstance::from_table(relation.kind, table.clone())?;
                state_at_query(circuit, &inst, t)
            })
            .collect()
    };
    Ok((run(&relation.x)?, run(&relation.y)?))
}

/// Where the oracle reads its index in a state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryRegisters {
    pub index: String,
    /// Phase-oracle bit: only amplitude with this register equal to 1 is counted.
    pub bit: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightIdentityReport {
    /// `Σ_{(x,y)∈R} Σ_{i: x(i)≠y(i)} 2 w(x,y) |α_{x,i}| |α_{y,i}|`.
    pub lhs: f64,
    /// `v_max Φ(0)`.
    pub rhs: f64,
    pub v_max: f64,
    pub phi0: f64,
}

impl WeightIdentityReport {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-9)
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// `|α_i|` for every index value `i < n`.
fn query_amplitudes(state: &QuantumState, regs: &QueryRegisters, n: usize) -> Result<Vec<f64>> {
    let mut mass = vec![0.0; n];
    for (k, a) in state.amplitudes().iter().enumerate() {
        if let Some(bit) = &regs.bit {
            if state.register_value(k, bit)? != 1 {
                continue;
            }
        }
        let i = state.register_value(k, &regs.index)?;
        if i < n {
            mass[i] += a.norm_sqr();
        }
    }
    Ok(mass.into_iter().map(f64::sqrt).collect())
}

/// Evaluates both sides of
/// `Σ_{(x,y)∈R, i: x(i)≠y(i)} 2 w(x,y) |α_{x,i}| |α_{y,i}| ≤ v_max Φ(0)`.
///
/// `x_states[a]` and `y_states[b]` are the states on inputs `x[a]` and `y[b]`
/// at the same query.
pub fn verify_weight_identity(
    relation: &RelationInstance,
    scheme: &WeightScheme,
    x_states: &[QuantumState],
    y_states: &[QuantumState],
    regs: &QueryRegisters,
) -> Result<WeightIdentityReport> {
    if x_states.len() < relation.x.len() {
        return Err(Error::MissingState(x_states.len()));
    }
    if y_states.len() < relation.y.len() {
        return Err(Error::MissingState(relation.x.len() + y_states.len()));
    }
    let n = relation.n;
    let ax: Vec<Vec<f64>> = x_states[..relation.x.len()]
        .iter()
        .map(|s| query_amplitudes(s, regs, n))
        .collect::<Result<_>>()?;
    let ay: Vec<Vec<f64>> = y_states[..relation.y.len()]
        .iter()
        .map(|s| query_amplitudes(s, regs, n))
        .collect::<Result<_>>()?;
    let mut lhs = 0.0;
    for (k, &(a, b)) in relation.pairs.iter().enumerate() {
        for i in relation.differing(k) {
            lhs += 2.0 * scheme.w[k] * ax[a][i] * ay[b][i];
        }
    }
    let profile = load_profile(relation, scheme);
    let phi0 = profile.total_weight;
    Ok(WeightIdentityReport {
        lhs,
        rhs: profile.v_max * phi0,
        v_max: profile.v_max,
        phi0,
    })
}

/// `Φ(t) = Σ_R w(x,y) F(ρ_{x,t}, ρ_{y,t})` for pure states.
pub fn progress(
    relation: &RelationInstance,
    scheme: &WeightScheme,
    x_states: &[QuantumState],
    y_states: &[QuantumState],
) -> Result<f64> {
    let mut phi = 0.0;
    for (k, &(a, b)) in relation.pairs.iter().enumerate() {
        let sx = x_states.get(a).ok_or(Error::MissingState(a))?;
        let sy = y_states.get(b).ok_or(Error::MissingState(relation.x.len() + b))?;
        phi += scheme.w[k] * fidelity(sx, sy)?;
    }
    Ok(phi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProgressTrace {
    /// `Φ` after `t = 0, 1, …` complete steps.
    pub phi: Vec<f64>,
}

/// `Φ` over a measurement-free circuit, one entry per completed step.
pub fn progress_trace(relation: &RelationInstance, scheme: &WeightScheme, circuit: &StepCircuit) -> Result<ProgressTrace> {
    let states = |tables: &[Vec<usize>], t: usize| -> Result<Vec<QuantumState>> {
        tables
            .iter()
            .map(|table| evolve_pure(circuit, &ProblemInstance::from_table(relation.kind, table.clone())?, t))
            .collect()
    };
    let mut phi = Vec::new();
    for t in 0..=circuit.steps.len() {
        phi.push(progress(relation, scheme, &states(&relation.x, t)?, &states(&relation.y, t)?)?);
    }
    Ok(ProgressTrace { phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::relation::build_relation;
    use crate::state::Register;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn polynomial_cases() {
        let r = verify_polynomial_inequality(&[(1, 0.7, 0.3), (3, 1.0, 2.0), (5, 0.0, 0.0)]);
        assert!(r.holds());
        // k = 1 is an equality; (3, 1, 2) gives 6 ≥ 2.
        assert!(r.max_excess.abs() < 1e-15);
        // Outside r ≤ 1 it fails: 8 − 1.9³ > 0.3.
        let bad = verify_polynomial_inequality(&[(3, 2.0, 0.1)]);
        assert_eq!(bad.violations, 1);
    }

    #[test]
    fn polynomial_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = verify_polynomial_inequality(&sample_polynomial_triples(20_000, &mut rng));
        assert!(r.holds() && r.checked == 20_000);
    }

    #[test]
    fn hybrid_zero_queries() {
        let r = verify_hybrid_bound(8, 0).unwrap();
        assert_eq!(r.lhs, vec![0.0]);
    }

    #[test]
    fn hybrid_grover_sixteen() {
        let r = verify_hybrid_bound(16, 2).unwrap();
        assert!(r.holds() && r.holds_per_step(), "{r:?}");
        // After one query only the marked amplitude flips: Σ_x 4/N = 4.
        assert!((r.lhs[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn weight_identity_at_zero_amplitude() {
        let r = build_relation(ProblemKind::Search, 4).unwrap();
        let regs = vec![Register::new("index", 2), Register::new("bit", 1)];
        let zero = QuantumState::zero(regs).unwrap();
        let report = verify_weight_identity(
            &r,
            &WeightScheme::uniform(&r),
            &[zero.clone()],
            &vec![zero; 4],
            &QueryRegisters {
                index: "index".into(),
                bit: Some("bit".into()),
            },
        )
        .unwrap();
        assert_eq!(report.lhs, 0.0);
        assert!(report.holds());
        assert_eq!(report.phi0, 4.0);
    }

    #[test]
    fn weight_identity_needs_every_state() {
        let r = build_relation(ProblemKind::Search, 4).unwrap();
        let zero = QuantumState::zero(vec![Register::new("index", 2)]).unwrap();
        let regs = QueryRegisters {
            index: "index".into(),
            bit: None,
        };
        let res = verify_weight_identity(&r, &WeightScheme::uniform(&r), &[zero.clone()], &[zero], &regs);
        assert_eq!(res.unwrap_err(), Error::MissingState(2));
    }

    #[test]
    fn progress_starts_at_total_weight() {
        let r = build_relation(ProblemKind::Search, 8).unwrap();
        let s = WeightScheme::uniform(&r);
        let trace = progress_trace(&r, &s, &grover_iterations_circuit(8, 2).unwrap()).unwrap();
        assert_eq!(trace.phi[0], 8.0);
        assert!(trace.phi.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }
}
