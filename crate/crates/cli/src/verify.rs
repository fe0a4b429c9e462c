use std::path::Path;

use crate::config::ExperimentConfig;
use crate::experiments::score;
use crate::report::ExperimentReport;
use crate::table::Table;
use crate::Result;

/// Result of recomputing a report from its CSVs.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub report: ExperimentReport,
    /// One line per metric or check that disagrees with the report.
    pub mismatches: Vec<String>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) || (a.is_nan() && b.is_nan())
}

/// Reads `report.txt` and the CSVs it lists from `dir`, recomputes every
/// metric and check, and lists disagreements.
pub fn verify_dir(dir: &Path) -> Result<Verification> {
    let report = ExperimentReport::read(dir)?;
    let mut cfg = ExperimentConfig::new(report.experiment, report.seed, dir);
    for (k, v) in &report.config {
        cfg.set(k, v)?;
    }
    let tables = report
        .files
        .iter()
        .filter_map(|f| f.strip_suffix(".csv"))
        .map(|name| Table::read(dir, name))
        .collect::<Result<Vec<_>>>()?;
    let (metrics, checks) = score(&cfg, &tables)?;

    let mut mismatches = Vec::new();
    for (name, v) in &metrics {
        match report.metric(name) {
            Some(r) if same(r, *v) => {}
            Some(r) => mismatches.push(format!("metric {name}: report {r:?}, recomputed {v:?}")),
            None => mismatches.push(format!("metric {name}: missing from report")),
        }
    }
    for (name, _) in &report.metrics {
        if !metrics.iter().any(|(n, _)| n == name) {
            mismatches.push(format!("metric {name}: not produced by recomputation"));
        }
    }
    for c in &checks {
        match report.check(&c.name) {
            Some(r) if r.passed == c.passed && same(r.value, c.value) && same(r.threshold, c.threshold) => {}
            Some(r) => mismatches.push(format!(
                "check {}: report {} {:?}, recomputed {} {:?}",
                c.name,
                if r.passed { "PASS" } else { "FAIL" },
                r.value,
                if c.passed { "PASS" } else { "FAIL" },
                c.value
            )),
            None => mismatches.push(format!("check {}: missing from report", c.name)),
        }
    }
    Ok(Verification { report, mismatches })
}
