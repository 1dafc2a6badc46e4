//! The analytic property suites, printed as a report.
//!
//! cargo run --release --example inequality_suites

use pdqp::bench::verify::{Suite, VerifyOptions};
use pdqp::bench::{render_report, verify_all, OutputFormat};

fn main() -> pdqp::Result<()> {
    let report = verify_all(&VerifyOptions {
        seed: 0,
        suites: vec![Suite::Polynomial, Suite::Hybrid, Suite::Lifted, Suite::WeightIdentity],
        mutate_reweight: false,
    })?;
    print!("{}", render_report(&report, OutputFormat::Csv)?);
    Ok(())
}
