use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use natgen_cli::{run_experiment, verify_dir, CliError, ExperimentConfig, ExperimentName};

#[derive(Parser)]
#[command(name = "natgen", version, about = "Generative evolutionary computation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write CSVs, SVGs and report.txt
    Run {
        experiment: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Flat `key = value` file; command-line values take precedence
        #[arg(long)]
        config: Option<PathBuf>,
        /// `key=value`, may be repeated
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the available experiments and their settings
    List,
    /// Recompute a report's metrics from its CSVs
    Verify { report_dir: PathBuf },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::List => {
            for e in ExperimentName::ALL {
                println!("{:<14} {}", e.as_str(), e.description());
                let keys: Vec<String> = e.defaults().iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{:<14} {}", "", keys.join(" "));
            }
            Ok(true)
        }
        Command::Run {
            experiment,
            seed,
            out,
            config,
            overrides,
        } => {
            let name: ExperimentName = experiment.parse()?;
            let text = match &config {
                Some(p) => Some(std::fs::read_to_string(p).map_err(|e| CliError::Io {
                    path: p.clone(),
                    source: e,
                })?),
                None => None,
            };
            let pairs = overrides
                .iter()
                .map(|o| {
                    o.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| CliError::Config(format!("override `{o}` is not key=value")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = ExperimentConfig::resolve(name, text.as_deref(), seed, out, &pairs)?;
            let report = run_experiment(&cfg)?;
            print!("{}", report.to_text());
            for c in report.failures() {
                eprintln!("FAIL {} {:?} {} {:?}", c.name, c.value, c.op.symbol(), c.threshold);
            }
            Ok(report.all_passed())
        }
        Command::Verify { report_dir } => {
            let v = verify_dir(&report_dir)?;
            for m in &v.mismatches {
                eprintln!("FAIL {m}");
            }
            if v.ok() {
                println!(
                    "verified {} metrics and {} checks of {}",
                    v.report.metrics.len(),
                    v.report.checks.len(),
                    v.report.experiment
                );
            }
            Ok(v.ok())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
