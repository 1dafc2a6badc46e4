//! Haar-random unitaries and states for tests and randomized checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{QuantumState, Register};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random pure state over the given registers.
pub fn random_state<R: Rng + ?Sized>(registers: Vec<Register>, rng: &mut R) -> QuantumState {
    let n: usize = registers.iter().map(|r| r.qubits).sum();
    let amps: Vec<Complex64> = (0..1usize << n).map(|_| gaussian(rng)).collect();
    QuantumState::normalized(registers, amps).expect("gaussian vector is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::unitarity_deviation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [1, 2, 4, 8] {
            assert!(unitarity_deviation(&haar_unitary(dim, &mut rng)) < 1e-12);
        }
    }
}
