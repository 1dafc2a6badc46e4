//! Fidelity never drops under the copy-then-sample map on random states.
//!
//! cargo run --release --example fidelity_monotone

use pdqp::bench::verify::random_monotone_case;
use pdqp::engine::check_fidelity_monotone;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pdqp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cases = (0..200).map(|_| random_monotone_case(&mut rng)).collect::<pdqp::Result<Vec<_>>>()?;
    let pairs = check_fidelity_monotone(&cases)?;
    let worst = pairs.iter().map(|(b, a)| a - b).fold(f64::INFINITY, f64::min);
    for (before, after) in pairs.iter().take(5) {
        println!("F before {before:.4}  after {after:.4}");
    }
    println!("{} cases, smallest gain {worst:.2e}", pairs.len());
    Ok(())
}
