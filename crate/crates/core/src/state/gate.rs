//! Gate descriptions and their dense matrices.
//!
//! Single-qubit named gates broadcast over every target qubit. Two-qubit
//! gates take exactly two target qubits, first target is the control (or the
//! more significant qubit of the matrix). `UniformPrep` and `Diffusion` treat
//! the target qubits as one register whose value is read most significant
//! qubit first. `Unitary` carries an explicit matrix whose dimension must be
//! `2^k` for `k` target qubits.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for unitarity checks.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense complex matrix, serialized row-major as separate real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(pub DMatrix<Complex64>);

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let dim = self.0.nrows();
        let mut re = Vec::with_capacity(dim * dim);
        let mut im = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                re.push(self.0[(r, c)].re);
                im.push(self.0[(r, c)].im);
            }
        }
        MatrixRepr { dim, re, im }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let n = repr.dim * repr.dim;
        if repr.re.len() != n || repr.im.len() != n {
            return Err(serde::de::Error::custom("matrix entry count does not match dim"));
        }
        let m = DMatrix::from_fn(repr.dim, repr.dim, |r, c| {
            Complex64::new(repr.re[r * repr.dim + c], repr.im[r * repr.dim + c])
        });
        Ok(Matrix(m))
    }
}

impl Matrix {
    /// Wraps a square matrix after checking it is unitary within [`UNITARY_TOLERANCE`].
    pub fn unitary(m: DMatrix<Complex64>) -> Result<Self> {
        check_unitary(&m)?;
        Ok(Matrix(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// Largest entrywise deviation of `U†U` from the identity.
pub fn unitarity_deviation(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for r in 0..prod.nrows() {
        for c in 0..prod.ncols() {
            let target = if r == c { ONE } else { ZERO };
            worst = worst.max((prod[(r, c)] - target).norm());
        }
    }
    worst
}

pub fn check_unitary(m: &DMatrix<Complex64>) -> Result<()> {
    let deviation = unitarity_deviation(m);
    if deviation > UNITARY_TOLERANCE || !m.nrows().is_power_of_two() {
        return Err(Error::NonUnitaryMatrix { deviation });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "gate", rename_all = "snake_case")]
pub enum Gate {
    I,
    H,
    X,
    Y,
    Z,
    S,
    T,
    Rx { theta: f64 },
    Ry { theta: f64 },
    Rz { theta: f64 },
    Phase { theta: f64 },
    Cnot,
    Cz,
    Swap,
    /// Maps `|0⟩` to the uniform superposition over register values `0..size`.
    UniformPrep { size: usize },
    /// Grover diffusion `2|u⟩⟨u| − I` about the uniform state over `0..size`.
    Diffusion { size: usize },
    Unitary { matrix: Matrix },
}

/// How a gate acts on its resolved target qubits.
pub(crate) enum GateAction<'a> {
    Identity,
    EachQubit([[Complex64; 2]; 2]),
    Dense(std::borrow::Cow<'a, DMatrix<Complex64>>),
    UniformPrep(usize),
    Diffusion(usize),
}

impl Gate {
    pub fn unitary(m: DMatrix<Complex64>) -> Result<Self> {
        Ok(Gate::Unitary {
            matrix: Matrix::unitary(m)?,
        })
    }

    /// 2×2 matrix of a single-qubit named gate.
    pub fn single_qubit_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let h = FRAC_1_SQRT_2;
        Some(match self {
            Gate::I => [[ONE, ZERO], [ZERO, ONE]],
            Gate::H => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            Gate::X => [[ZERO, ONE], [ONE, ZERO]],
            Gate::Y => [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]],
            Gate::Z => [[ONE, ZERO], [ZERO, c(-1.0, 0.0)]],
            Gate::S => [[ONE, ZERO], [ZERO, c(0.0, 1.0)]],
            Gate::T => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
            Gate::Rx { theta } => {
                let (s, co) = (theta / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::Ry { theta } => {
                let (s, co) = (theta / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            Gate::Rz { theta } => [
                [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
                [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            Gate::Phase { theta } => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, *theta)]],
            _ => return None,
        })
    }

    /// Number of target qubits the gate requires, if fixed.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Gate::Cnot | Gate::Cz | Gate::Swap => Some(2),
            Gate::Unitary { matrix } => Some(matrix.dim().trailing_zeros() as usize),
            _ => None,
        }
    }

    /// Dense matrix of the gate acting on `k` target qubits.
    pub fn matrix(&self, k: usize) -> Result<DMatrix<Complex64>> {
        let dim = 1usize << k;
        if let Some(arity) = self.arity() {
            if arity != k {
                return Err(Error::DimensionMismatch {
                    expected: 1 << arity,
                    found: dim,
                });
            }
        }
        match self.action(k)? {
            GateAction::Identity => Ok(DMatrix::identity(dim, dim)),
            GateAction::Dense(m) => Ok(m.into_owned()),
            GateAction::EachQubit(u) => {
                let mut out = DMatrix::from_element(1, 1, ONE);
                let small = DMatrix::from_fn(2, 2, |r, c| u[r][c]);
                for _ in 0..k {
                    out = out.kronecker(&small);
                }
                Ok(out)
            }
            GateAction::UniformPrep(_) | GateAction::Diffusion(_) => {
                let mut m = DMatrix::zeros(dim, dim);
                let mut column = vec![ZERO; dim];
                for c in 0..dim {
                    column.iter_mut().for_each(|a| *a = ZERO);
                    column[c] = ONE;
                    self.action(k)?.apply_group(&mut column);
                    for r in 0..dim {
                        m[(r, c)] = column[r];
                    }
                }
                Ok(m)
            }
        }
    }

    pub(crate) fn action(&self, k: usize) -> Result<GateAction<'_>> {
        let dim = 1usize << k;
        let two = |m: [[f64; 4]; 4]| {
            DMatrix::from_fn(4, 4, |r, c| Complex64::new(m[r][c], 0.0))
        };
        Ok(match self {
            Gate::I => GateAction::Identity,
            Gate::Cnot => {
                check_arity(2, k)?;
                GateAction::Dense(std::borrow::Cow::Owned(two([
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0],
                    [0.0, 0.0, 1.0, 0.0],
                ])))
            }
            Gate::Cz => {
                check_arity(2, k)?;
                GateAction::Dense(std::borrow::Cow::Owned(two([
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, -1.0],
                ])))
            }
            Gate::Swap => {
                check_arity(2, k)?;
                GateAction::Dense(std::borrow::Cow::Owned(two([
                    [1.0, 0.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 0.0],
                    [0.0, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0],
                ])))
            }
            Gate::UniformPrep { size } | Gate::Diffusion { size } => {
                if *size == 0 || *size > dim {
                    return Err(Error::InvalidParameters(format!(
                        "uniform size {size} does not fit {k} qubits"
                    )));
                }
                if matches!(self, Gate::UniformPrep { .. }) {
                    GateAction::UniformPrep(*size)
                } else {
                    GateAction::Diffusion(*size)
                }
            }
            Gate::Unitary { matrix } => {
                if matrix.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: matrix.dim(),
                        found: dim,
                    });
                }
                GateAction::Dense(std::borrow::Cow::Borrowed(&matrix.0))
            }
            single => GateAction::EachQubit(
                single
                    .single_qubit_matrix()
                    .expect("remaining variants are single-qubit gates"),
            ),
        })
    }
}

fn check_arity(expected: usize, k: usize) -> Result<()> {
    if expected != k {
        return Err(Error::DimensionMismatch {
            expected: 1 << expected,
            found: 1 << k,
        });
    }
    Ok(())
}

impl GateAction<'_> {
    /// Applies a register-wide action to one gathered group of amplitudes.
    pub(crate) fn apply_group(&self, v: &mut [Complex64]) {
        match self {
            GateAction::Identity | GateAction::EachQubit(_) => {}
            GateAction::Dense(m) => {
                let input: Vec<Complex64> = v.to_vec();
                for (r, out) in v.iter_mut().enumerate() {
                    let mut acc = ZERO;
                    for (c, a) in input.iter().enumerate() {
                        acc += m[(r, c)] * a;
                    }
                    *out = acc;
                }
            }
            GateAction::UniformPrep(size) => {
                // Householder reflection exchanging |0⟩ and |u⟩.
                if *size == 1 {
                    return;
                }
                let amp = 1.0 / (*size as f64).sqrt();
                // w = e0 − u; w†w = 2 − 2·amp
                let mut dot = v[0];
                for a in &v[..*size] {
                    dot -= a * amp;
                }
                let coeff = dot * (2.0 / (2.0 - 2.0 * amp));
                v[0] -= coeff;
                for a in &mut v[..*size] {
                    *a += coeff * amp;
                }
            }
            GateAction::Diffusion(size) => {
                let amp = 1.0 / (*size as f64).sqrt();
                let mut dot = ZERO;
                for a in &v[..*size] {
                    dot += a * amp;
                }
                for (j, a) in v.iter_mut().enumerate() {
                    *a = if j < *size { dot * (2.0 * amp) - *a } else { -*a };
                }
            }
        }
    }
}

/// A qubit or a whole register addressed by label. Written `reg` or `reg[q]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Target {
    pub register: String,
    pub qubit: Option<usize>,
}

impl Target {
    pub fn reg(label: impl Into<String>) -> Self {
        Target {
            register: label.into(),
            qubit: None,
        }
    }

    pub fn qubit(label: impl Into<String>, qubit: usize) -> Self {
        Target {
            register: label.into(),
            qubit: Some(qubit),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qubit {
            Some(q) => write!(f, "{}[{}]", self.register, q),
            None => write!(f, "{}", self.register),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_suffix(']').and_then(|rest| rest.split_once('[')) {
            Some((label, q)) => {
                let qubit = q
                    .parse()
                    .map_err(|_| Error::InvalidParameters(format!("bad qubit target `{s}`")))?;
                Ok(Target::qubit(label, qubit))
            }
            None if !s.is_empty() && !s.contains('[') => Ok(Target::reg(s)),
            None => Err(Error::InvalidParameters(format!("bad target `{s}`"))),
        }
    }
}

impl TryFrom<String> for Target {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Target> for String {
    fn from(t: Target) -> String {
        t.to_string()
    }
}

/// A gate together with the qubits it acts on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    #[serde(flatten)]
    pub gate: Gate,
    pub targets: Vec<Target>,
}

impl GateOp {
    pub fn new(gate: Gate, targets: Vec<Target>) -> Self {
        GateOp { gate, targets }
    }

    /// Gate acting on every qubit of one register.
    pub fn on(gate: Gate, register: impl Into<String>) -> Self {
        GateOp {
            gate,
            targets: vec![Target::reg(register)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_gates_are_unitary() {
        let gates = [
            Gate::I,
            Gate::H,
            Gate::X,
            Gate::Y,
            Gate::Z,
            Gate::S,
            Gate::T,
            Gate::Rx { theta: 0.3 },
            Gate::Ry { theta: 1.1 },
            Gate::Rz { theta: -2.0 },
            Gate::Phase { theta: 0.7 },
        ];
        for g in gates {
            for k in 1..=2 {
                assert!(unitarity_deviation(&g.matrix(k).unwrap()) < 1e-12, "{g:?}");
            }
        }
        for g in [Gate::Cnot, Gate::Cz, Gate::Swap] {
            assert!(unitarity_deviation(&g.matrix(2).unwrap()) < 1e-12);
            assert!(g.matrix(3).is_err());
        }
        for size in 1..=8 {
            for g in [Gate::UniformPrep { size }, Gate::Diffusion { size }] {
                assert!(unitarity_deviation(&g.matrix(3).unwrap()) < 1e-12, "{g:?}");
            }
        }
    }

    #[test]
    fn uniform_prep_maps_zero_to_uniform() {
        let m = Gate::UniformPrep { size: 5 }.matrix(3).unwrap();
        for r in 0..8 {
            let expected = if r < 5 { 1.0 / 5f64.sqrt() } else { 0.0 };
            assert!((m[(r, 0)] - Complex64::new(expected, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn diffusion_reflects_about_uniform() {
        let m = Gate::Diffusion { size: 4 }.matrix(2).unwrap();
        let u = DMatrix::from_element(4, 1, Complex64::new(0.5, 0.0));
        let expected = (&u * u.adjoint()) * Complex64::new(2.0, 0.0) - DMatrix::identity(4, 4);
        assert!((m - expected).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_unitary_matrix() {
        let m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(Gate::unitary(m), Err(Error::NonUnitaryMatrix { .. })));
    }

    #[test]
    fn target_parsing() {
        assert_eq!("idx".parse::<Target>().unwrap(), Target::reg("idx"));
        assert_eq!("idx[2]".parse::<Target>().unwrap(), Target::qubit("idx", 2));
        assert!("idx[x]".parse::<Target>().is_err());
        assert!("".parse::<Target>().is_err());
    }
}
