//! Non-adaptive partition algorithms: √N blocks, one query each, samples
//! spread over blocks.
//!
//! cargo run --release --example nonadaptive_partition

use pdqp::algorithms::Model;
use pdqp::bench::{estimate_success, ExperimentSpec};
use pdqp::problems::ProblemKind;

fn main() -> pdqp::Result<()> {
    for problem in [ProblemKind::Search, ProblemKind::Majority, ProblemKind::ElementDistinctness] {
        let spec = ExperimentSpec {
            problem,
            model: Model::PdqpNaq,
            n: vec![16, 64],
            trials: 1000,
            seed: 2,
            ..Default::default()
        };
        for r in estimate_success(&spec)? {
            println!("{:<22} N={:<3} Q={:<2} P={:<4} worst={:.3}", problem.to_string(), r.n, r.q, r.p, r.worst_rate);
        }
    }
    Ok(())
}
