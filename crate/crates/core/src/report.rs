//! CSV and JSON result files. Column layout is described in
//! `schema/results.schema.json`.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sim::{RunConfig, RunMetrics};

/// Fixed CSV header.
pub const CSV_COLUMNS: [&str; 12] = [
    "scheme",
    "K",
    "alpha",
    "V",
    "seed",
    "user",
    "avg_rate_files_per_slot",
    "utility",
    "avg_S",
    "avg_Q_total",
    "avg_U",
    "B_est",
];

/// One CSV line: a single user, or `user = "all"` for the aggregate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub scheme: String,
    #[serde(rename = "K")]
    pub users: usize,
    pub alpha: f64,
    #[serde(rename = "V")]
    pub tradeoff: f64,
    pub seed: u64,
    pub user: String,
    pub avg_rate_files_per_slot: f64,
    pub utility: f64,
    #[serde(rename = "avg_S")]
    pub avg_s: f64,
    #[serde(rename = "avg_Q_total")]
    pub avg_q_total: f64,
    #[serde(rename = "avg_U")]
    pub avg_u: f64,
    #[serde(rename = "B_est")]
    pub b_est: f64,
}

/// Per-user rows (users numbered from 1) followed by the aggregate row.
pub fn csv_rows(m: &RunMetrics, fairness_utility: impl Fn(f64) -> f64) -> Vec<CsvRow> {
    let row = |user: String, rate: f64, utility: f64, s: f64, q: f64, u: f64| CsvRow {
        scheme: m.scheme.name().to_string(),
        users: m.users,
        alpha: m.alpha,
        tradeoff: m.tradeoff,
        seed: m.seed,
        user,
        avg_rate_files_per_slot: rate,
        utility,
        avg_s: s,
        avg_q_total: q,
        avg_u: u,
        b_est: m.b_estimate.value,
    };
    let mut rows: Vec<CsvRow> = (0..m.users)
        .map(|k| {
            row(
                (k + 1).to_string(),
                m.rates[k],
                fairness_utility(m.rates[k]),
                m.avg_user_queue[k],
                m.avg_codeword_queue[k],
                m.avg_virtual_queue[k],
            )
        })
        .collect();
    rows.push(row(
        "all".into(),
        m.sum_rate(),
        m.utility,
        m.avg_user_queue.iter().sum(),
        m.avg_codeword_total,
        m.avg_virtual_queue.iter().sum(),
    ));
    rows
}

/// Writes every run's rows under one header. `configs[i]` produced `metrics[i]`.
pub fn write_csv<W: Write>(out: W, configs: &[RunConfig], metrics: &[RunMetrics]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for (c, m) in configs.iter().zip(metrics) {
        for r in csv_rows(m, |x| c.fairness.utility(x)) {
            w.serialize(r)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonRun<'a> {
    config: &'a RunConfig,
    metrics: &'a RunMetrics,
}

/// One JSON document holding each resolved config with its metrics.
pub fn write_json<W: Write>(out: W, configs: &[RunConfig], metrics: &[RunMetrics]) -> Result<()> {
    let runs: Vec<JsonRun> = configs
        .iter()
        .zip(metrics)
        .map(|(config, metrics)| JsonRun { config, metrics })
        .collect();
    serde_json::to_writer_pretty(out, &serde_json::json!({ "runs": runs }))?;
    Ok(())
}

/// Plain-text table with one line per run.
pub fn summary_table(metrics: &[RunMetrics]) -> String {
    let mut s = format!(
        "{:<12} {:>3} {:>6} {:>8} {:>10} {:>10} {:>8} {:>12}\n",
        "scheme", "K", "alpha", "V", "sum_rate", "utility", "spread", "analytic"
    );
    for m in metrics {
        let analytic = m
            .analytic_rate
            .map(|r| format!("{:.4}", r * m.users as f64))
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "{:<12} {:>3} {:>6} {:>8} {:>10.4} {:>10.4} {:>8.4} {:>12}",
            m.scheme.name(),
            m.users,
            m.alpha,
            m.tradeoff,
            m.sum_rate(),
            m.utility,
            m.rate_spread(),
            analytic
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;
    use crate::sim::run;

    #[test]
    fn header_and_rows() {
        let mut c = Scenario::DetTwoClass.config(2).unwrap();
        c.horizon = 50;
        let m = run(&c).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &[c.clone()], &[m]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(text.lines().count(), 1 + 3);
        assert!(text.lines().last().unwrap().starts_with("proposed,2,1.0,100.0,1,all,"));
    }
}
