//! Two-to-one versus one-to-one with a single query and P non-collapsing samples.
//!
//! cargo run --release --example collision

use pdqp::algorithms::collision_algorithm;
use pdqp::bench::{estimate_algorithm, hard_classes};
use pdqp::problems::ProblemKind;

fn main() -> pdqp::Result<()> {
    let n = 16;
    println!("P  error(two-to-one)  2^(1-P)");
    for p in 2..=8 {
        let algo = collision_algorithm(n, p)?;
        let row = estimate_algorithm(&algo, &hard_classes(ProblemKind::Collision, n), 20_000, 1)?;
        let two_to_one = &row.classes[1];
        println!(
            "{p:<2} {:<18.4} {:.4}",
            1.0 - two_to_one.rate,
            2f64.powi(1 - p as i32)
        );
    }
    Ok(())
}
