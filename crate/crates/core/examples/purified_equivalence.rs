//! Direct simulation with collapses against the purified simulation that
//! defers every measurement, on randomly generated circuits.
//!
//! cargo run --release --example purified_equivalence

use pdqp::bench::verify::random_equivalence_circuit;
use pdqp::engine::{empirical, run_direct, total_variation, PurifiedOptions, PurifiedSampler, ReweightMode};
use pdqp::problems::ProblemInstance;
use pdqp::problems::ProblemKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> pdqp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let inst = ProblemInstance::from_table(ProblemKind::Search, vec![0, 1])?;
    let runs = 50_000;
    for i in 0..5 {
        let circuit = random_equivalence_circuit(&mut rng, i % 2 == 0)?;
        let direct = empirical((0..runs).map(|_| run_direct(&circuit, &inst, &mut rng).map(|t| t.key())).collect::<pdqp::Result<Vec<_>>>()?);
        let mut line = format!("circuit {i} ({} steps)", circuit.steps.len());
        for mode in [ReweightMode::Exact, ReweightMode::Unit] {
            let mut sampler = PurifiedSampler::new(&circuit, &inst, PurifiedOptions { reweight: mode, ..Default::default() })?;
            let keys = (0..runs).map(|_| sampler.sample(&mut rng).map(|t| t.key())).collect::<pdqp::Result<Vec<_>>>()?;
            line += &format!("  TV[{mode:?}]={:.4}", total_variation(&direct, &empirical(keys)));
        }
        println!("{line}");
    }
    Ok(())
}
