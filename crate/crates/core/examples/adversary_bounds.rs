//! Lower bounds from adversary relations for every problem and model.
//!
//! cargo run --release --example adversary_bounds

use pdqp::adversary::{compute_bounds, DEFAULT_EPSILON};
use pdqp::algorithms::Model;
use pdqp::problems::ProblemKind;

fn main() -> pdqp::Result<()> {
    println!("{:<22} {:<9} {:>5} {:>10} {:>10}", "problem", "model", "N", "product", "Q+P >=");
    for problem in [ProblemKind::Search, ProblemKind::Majority, ProblemKind::Parity, ProblemKind::ElementDistinctness] {
        for model in Model::ALL {
            for n in [16, 64, 256] {
                let b = compute_bounds(problem, n, model, DEFAULT_EPSILON)?;
                println!(
                    "{:<22} {:<9} {:>5} {:>10.3} {:>10.3}",
                    problem.to_string(),
                    model.name(),
                    n,
                    b.product_bound,
                    b.additive_bound
                );
            }
        }
    }
    Ok(())
}
