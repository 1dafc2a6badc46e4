//! CSV and JSON rendering. Column order and number formatting are fixed, so
//! equal inputs give byte-identical text.

use serde::Serialize;

use super::budget::LogLogFit;
use super::experiment::{OutputFormat, ResultRow};
use super::verify::SuiteReport;
use crate::adversary::BoundReport;
use crate::error::{Error, Result};

/// Result-row columns, in order.
pub const CSV_COLUMNS: [&str; 11] = [
    "problem", "model", "N", "Q", "P", "trials", "successes", "rate", "ci_lo", "ci_hi", "seed",
];

fn csv_text<T: Serialize>(header: &[&str], records: impl IntoIterator<Item = T>) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidParameters(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for r in records {
        w.serialize(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidParameters(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Rows<'a> {
    rows: &'a [ResultRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<&'a LogLogFit>,
}

/// Success rows; JSON adds per-class rates and the fit when present.
pub fn render_rows(rows: &[ResultRow], fit: Option<&LogLogFit>, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(json_text(&Rows { rows, fit })),
        OutputFormat::Csv => {
            let records = rows.iter().map(|r| {
                (
                    r.problem, r.model, r.n, r.q, r.p, r.trials, r.successes, r.rate, r.ci_lo, r.ci_hi, r.seed,
                )
            });
            let mut text = csv_text(&CSV_COLUMNS, records)?;
            if let Some(f) = fit {
                text.push_str(&format!(
                    "# fit ln(Q+P) ~ ln N: exponent={} intercept={} residual={} points={}\n",
                    f.exponent, f.intercept, f.residual, f.points
                ));
            }
            Ok(text)
        }
    }
}

pub fn render_bounds(reports: &[BoundReport], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(json_text(&reports)),
        OutputFormat::Csv => csv_text(
            &[
                "problem",
                "model",
                "N",
                "m",
                "m_prime",
                "l",
                "l_prime",
                "product_bound",
                "additive_bound",
                "epsilon",
                "c_epsilon",
                "source",
                "single_query_copies",
            ],
            reports,
        ),
    }
}

pub fn render_report(report: &SuiteReport, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(json_text(report)),
        OutputFormat::Csv => csv_text(
            &["suite", "checks", "violations", "metric", "passed", "detail"],
            report
                .suites
                .iter()
                .map(|s| (s.suite, s.checks, s.violations, s.metric, s.passed(), &s.detail)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Model;
    use crate::problems::ProblemKind;
    use std::time::Duration;

    fn row(runtime: u64) -> ResultRow {
        ResultRow {
            problem: ProblemKind::ElementDistinctness,
            model: Model::PdqpNaq,
            n: 16,
            q: 4,
            p: 37,
            trials: 10,
            successes: 7,
            rate: 0.7,
            ci_lo: 0.39,
            ci_hi: 0.89,
            seed: 3,
            classes: Vec::new(),
            worst_rate: 0.6,
            runtime: Duration::from_millis(runtime),
        }
    }

    #[test]
    fn csv_layout() {
        let text = render_rows(&[row(1)], None, OutputFormat::Csv).unwrap();
        assert_eq!(
            text,
            "problem,model,N,Q,P,trials,successes,rate,ci_lo,ci_hi,seed\n\
             element_distinctness,pdqp-naq,16,4,37,10,7,0.7,0.39,0.89,3\n"
        );
    }

    #[test]
    fn runtime_does_not_leak() {
        for f in [OutputFormat::Csv, OutputFormat::Json] {
            assert_eq!(
                render_rows(&[row(1)], None, f).unwrap(),
                render_rows(&[row(999)], None, f).unwrap()
            );
        }
    }
}
