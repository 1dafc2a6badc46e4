//! Copy-based algorithms: collision with one query and extra copies, and the
//! copies a single query would need for search.
//!
//! cargo run --release --example cbqp_copies

use pdqp::adversary::{compute_bounds, DEFAULT_EPSILON};
use pdqp::algorithms::{cbqp_collision_algorithm, Model};
use pdqp::bench::{estimate_algorithm, hard_classes};
use pdqp::problems::ProblemKind;

fn main() -> pdqp::Result<()> {
    let n = 8;
    for copies in 1..=5 {
        let algo = cbqp_collision_algorithm(n, copies)?;
        let row = estimate_algorithm(&algo, &hard_classes(ProblemKind::Collision, n), 10_000, 3)?;
        println!("copies={copies} worst={:.4}", row.worst_rate);
    }
    for n in [16, 256, 4096, 65536] {
        let b = compute_bounds(ProblemKind::Search, n, Model::Cbqp, DEFAULT_EPSILON)?;
        println!("search N={n:<6} single-query copies >= {:.2}", b.single_query_copies.unwrap_or(0.0));
    }
    Ok(())
}
