//! Experiment registry and drivers for the `natgen` command-line tool.
//!
//! Every experiment writes its raw data as CSV, figures as SVG and a
//! `report.txt` with metrics and pass/fail checks. All metrics are derived
//! from the CSVs alone, so [`verify_dir`] can recompute them.

mod config;
mod error;
pub mod experiments;
mod report;
mod svg;
mod table;
mod verify;

pub use config::{parse_key_values, ExperimentConfig, ExperimentName};
pub use error::{CliError, Result};
pub use experiments::{run_eda_sphere, run_experiment, run_fig4, run_fig5, run_fig6, run_igo_quadratic};
pub use report::{Check, Cmp, ExperimentReport};
pub use svg::{emit_svg_scatter, render_svg_scatter, Series};
pub use table::{emit_csv, fmt_num, read_csv, Table};
pub use verify::{verify_dir, Verification};
