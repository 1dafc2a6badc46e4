//! Smallest sample budget for search with ⌈N^{1/3}⌉ Grover iterations, and the
//! fitted growth of Q + P.
//!
//! cargo run --release --example search_scaling

use pdqp::algorithms::Model;
use pdqp::bench::{budget_scaling, ExperimentSpec};
use pdqp::problems::ProblemKind;

fn main() -> pdqp::Result<()> {
    let spec = ExperimentSpec {
        problem: ProblemKind::Search,
        model: Model::Pdqp,
        n: vec![27, 64, 125, 216],
        trials: 2000,
        seed: 5,
        ..Default::default()
    };
    let (rows, fit) = budget_scaling(&spec)?;
    for r in &rows {
        println!("N={:<4} Q={:<2} P*={:<3} worst={:.3}", r.n, r.q, r.p, r.worst_rate);
    }
    if let Some(f) = fit {
        println!("Q+P ~ N^{:.3}", f.exponent);
    }
    Ok(())
}
