//! Results table and line-delimited report.
//!
//! Report records are JSON objects, one per line, tagged by `record`:
//! `config` (the resolved experiment configuration, first line) and
//! `metric` (one per UPL × variant with per-sample NDCG). Wall-clock
//! timings only go to the results table, so equal seeds give equal reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::eval::{ExperimentConfig, MetricReport};
use crate::projection::Variant;

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record<'a> {
    Config(&'a ExperimentConfig),
    Metric(MetricRecord),
}

#[derive(Serialize)]
struct MetricRecord {
    variant: Variant,
    upl: usize,
    mean: f64,
    std: f64,
    users: usize,
    samples: Vec<SampleRecord>,
}

#[derive(Serialize)]
struct SampleRecord {
    seed: u64,
    ndcg: f64,
    users: usize,
    skipped: usize,
    cold_users: usize,
}

pub fn report_lines(cfg: &ExperimentConfig, reports: &[MetricReport]) -> Result<String> {
    let mut out = serde_json::to_string(&Record::Config(cfg))?;
    out.push('\n');
    for r in reports {
        let rec = Record::Metric(MetricRecord {
            variant: r.variant,
            upl: r.upl,
            mean: r.mean,
            std: r.std,
            users: r.users,
            samples: r
                .samples
                .iter()
                .map(|s| SampleRecord {
                    seed: s.seed,
                    ndcg: s.ndcg,
                    users: s.users,
                    skipped: s.skipped,
                    cold_users: s.cold_users,
                })
                .collect(),
        });
        out.push_str(&serde_json::to_string(&rec)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_report(path: &Path, cfg: &ExperimentConfig, reports: &[MetricReport]) -> Result<()> {
    fs::write(path, report_lines(cfg, reports)?)?;
    Ok(())
}

/// Tab-separated `variant upl mean std users seconds_per_user`.
pub fn results_table(reports: &[MetricReport]) -> String {
    let mut out = String::from("variant\tupl\tmean\tstd\tusers\tseconds_per_user\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.4}\t{:.4}\t{}\t{:.6}",
            r.variant, r.upl, r.mean, r.std, r.users, r.seconds_per_user
        );
    }
    out
}
