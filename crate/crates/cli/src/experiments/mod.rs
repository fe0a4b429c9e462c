//! The experiment registry. Each experiment generates its data tables,
//! derives every metric from those tables alone, and writes CSVs, SVGs and
//! `report.txt` into the output directory.

mod convergence;
mod fig4;
mod multitask;

use std::path::Path;

use natgen::RngStream;

pub use convergence::{run_eda_sphere, run_igo_quadratic};
pub use fig4::run_fig4;
pub use multitask::{run_fig5, run_fig6};

use crate::config::{ExperimentConfig, ExperimentName};
use crate::report::{Check, ExperimentReport};
use crate::svg::{emit_svg_scatter, Series};
use crate::table::Table;
use crate::{CliError, Result};

/// Metrics and checks of one run.
pub(crate) type Scored = (Vec<(String, f64)>, Vec<Check>);

pub(crate) struct Figure {
    pub name: String,
    pub title: String,
    pub series: Vec<Series>,
    pub hulls: Vec<Vec<[f64; 2]>>,
}

/// Runs `cfg.name` seeded from `cfg.seed`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut rng = RngStream::new(cfg.seed);
    match cfg.name {
        ExperimentName::Fig4 => run_fig4(cfg, &mut rng),
        ExperimentName::Fig5 => run_fig5(cfg, &mut rng),
        ExperimentName::Fig6 => run_fig6(cfg, &mut rng),
        ExperimentName::EdaSphere => run_eda_sphere(cfg, &mut rng),
        ExperimentName::IgoQuadratic => run_igo_quadratic(cfg, &mut rng),
    }
}

/// Recomputes the metrics and checks of `name` from its tables.
pub(crate) fn score(cfg: &ExperimentConfig, tables: &[Table]) -> Result<Scored> {
    match cfg.name {
        ExperimentName::Fig4 => fig4::score(cfg, tables),
        ExperimentName::Fig5 => multitask::score_fig5(cfg, tables),
        ExperimentName::Fig6 => multitask::score_fig6(cfg, tables),
        ExperimentName::EdaSphere => convergence::score_eda(cfg, tables),
        ExperimentName::IgoQuadratic => convergence::score_igo(cfg, tables),
    }
}

pub(crate) fn table<'a>(tables: &'a [Table], name: &str) -> Result<&'a Table> {
    tables
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| CliError::data(format!("{name}.csv"), "table missing"))
}

/// Writes tables and figures, scores the tables and writes the report.
pub(crate) fn finish(cfg: &ExperimentConfig, tables: Vec<Table>, figures: Vec<Figure>) -> Result<ExperimentReport> {
    let dir: &Path = &cfg.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let (metrics, checks) = score(cfg, &tables)?;
    let mut files = Vec::new();
    for t in &tables {
        t.write(dir)?;
        files.push(t.file_name());
    }
    for f in &figures {
        let file = format!("{}.svg", f.name);
        emit_svg_scatter(&dir.join(&file), &f.title, &f.series, &f.hulls)?;
        files.push(file);
    }
    let report = ExperimentReport {
        experiment: cfg.name,
        seed: cfg.seed,
        config: cfg.entries().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        metrics,
        checks,
        files,
    };
    report.write(dir)?;
    Ok(report)
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (n - 1).
pub(crate) fn std_dev(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}
