use std::fmt::Write as _;
use std::path::Path;

use crate::config::ExperimentName;
use crate::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Cmp {
    pub fn symbol(&self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Cmp::Lt, Cmp::Le, Cmp::Gt, Cmp::Ge].into_iter().find(|c| c.symbol() == s)
    }

    fn holds(&self, a: f64, b: f64) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Gt => a > b,
            Cmp::Ge => a >= b,
        }
    }
}

/// One acceptance threshold: `value op threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub op: Cmp,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, op: Cmp, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            op,
            threshold,
            passed: op.holds(value, threshold),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub experiment: ExperimentName,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    pub metrics: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
}

impl ExperimentReport {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One record per line: `experiment`, `seed`, `config KEY VALUE`,
    /// `metric NAME VALUE`, `check NAME PASS|FAIL VALUE OP THRESHOLD` and
    /// `file NAME`. Floats use the shortest exact representation.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# natgen experiment report\n");
        let _ = writeln!(s, "experiment {}", self.experiment);
        let _ = writeln!(s, "seed {}", self.seed);
        for (k, v) in &self.config {
            let _ = writeln!(s, "config {k} {v}");
        }
        let width = self.metrics.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        for (n, v) in &self.metrics {
            let _ = writeln!(s, "metric {n:<width$} {v:?}");
        }
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "check {:<width$} {} {:?} {} {:?}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.value,
                c.op.symbol(),
                c.threshold
            );
        }
        for f in &self.files {
            let _ = writeln!(s, "file {f}");
        }
        s
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut experiment = None;
        let mut seed = None;
        let mut report = ExperimentReport {
            experiment: ExperimentName::Fig4,
            seed: 0,
            config: Vec::new(),
            metrics: Vec::new(),
            checks: Vec::new(),
            files: Vec::new(),
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, ' ');
            let kind = parts.next().unwrap_or("");
            let rest = parts.next().unwrap_or("").trim();
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let bad = || format!("line {}: malformed `{kind}` record", i + 1);
            match kind {
                "experiment" => experiment = Some(rest.parse::<ExperimentName>().map_err(|e| e.to_string())?),
                "seed" => seed = Some(rest.parse::<u64>().map_err(|_| bad())?),
                "config" => {
                    let (k, v) = rest.split_once(' ').ok_or_else(bad)?;
                    report.config.push((k.to_string(), v.trim().to_string()));
                }
                "metric" => match fields.as_slice() {
                    [n, v] => report.metrics.push((n.to_string(), num(v)?)),
                    _ => return Err(bad()),
                },
                "check" => match fields.as_slice() {
                    [n, status, v, op, t] => {
                        let passed = match *status {
                            "PASS" => true,
                            "FAIL" => false,
                            _ => return Err(bad()),
                        };
                        let op = Cmp::parse(op).ok_or_else(bad)?;
                        report.checks.push(Check {
                            name: n.to_string(),
                            value: num(v)?,
                            op,
                            threshold: num(t)?,
                            passed,
                        });
                    }
                    _ => return Err(bad()),
                },
                "file" => report.files.push(rest.to_string()),
                _ => return Err(format!("line {}: unknown record `{kind}`", i + 1)),
            }
        }
        report.experiment = experiment.ok_or("missing `experiment` record")?;
        report.seed = seed.ok_or("missing `seed` record")?;
        Ok(report)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("report.txt");
        std::fs::write(&path, self.to_text()).map_err(|e| CliError::io(path, e))
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join("report.txt");
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        Self::parse(&text).map_err(|reason| CliError::data(path, reason))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let r = ExperimentReport {
            experiment: ExperimentName::Fig6,
            seed: 17,
            config: vec![("weights_a".into(), "0.7, 0.3".into()), ("eta".into(), "50".into())],
            metrics: vec![("leap".into(), 0.1 + 0.2), ("tiny".into(), 1e-300)],
            checks: vec![
                Check::new("leap_min", 0.3, Cmp::Ge, 0.03),
                Check::new("ctrl", 0.01, Cmp::Lt, 0.005),
            ],
            files: vec!["a.csv".into(), "b.svg".into()],
        };
        assert!(!r.all_passed());
        assert_eq!(r.failures().count(), 1);
        assert_eq!(ExperimentReport::parse(&r.to_text()).unwrap(), r);
    }

    #[test]
    fn malformed_reports_are_rejected() {
        assert!(ExperimentReport::parse("seed 1\n").is_err());
        assert!(ExperimentReport::parse("experiment fig5\nseed 1\nmetric x\n").is_err());
        assert!(ExperimentReport::parse("experiment fig5\nseed 1\nwhat 3\n").is_err());
    }
}
