//! Convergence traces: a full-covariance Gaussian EDA on a shifted sphere
//! and IGO natural-gradient ascent on `-|x|^2`.

use natgen::eda::{eda_run, igo_run, population_variance, EdaConfig, IgoState, ModelFamily};
use natgen::{RngStream, SearchSpace};

use super::{finish, mean, table, Figure, Scored};
use crate::config::ExperimentConfig;
use crate::report::{Check, Cmp, ExperimentReport};
use crate::svg::Series;
use crate::table::{fmt_num, Table};
use crate::{CliError, Result};

const WINDOW: usize = 10;

pub fn run_eda_sphere(cfg: &ExperimentConfig, rng: &mut RngStream) -> Result<ExperimentReport> {
    let opt = cfg.get_list("optimum")?;
    let bound = cfg.get_f64("bound")?;
    let space = SearchSpace::cube(opt.len(), -bound, bound)?;
    let f = |x: &[f64]| -x.iter().zip(&opt).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let mut ec = EdaConfig::new(
        cfg.get_usize("pop_size")?,
        cfg.get_f64("parent_fraction")?,
        cfg.get_usize("generations")?,
        ModelFamily::GaussianFull,
    );
    ec.min_variance = cfg.get_f64("min_variance")?;
    let history = eda_run(&space, &f, &ec, rng)?;

    let d = opt.len();
    let mut header: Vec<String> = vec!["generation".into(), "best_fitness".into()];
    header.extend((0..d).map(|i| format!("mean_{i}")));
    header.extend((0..d).map(|i| format!("pop_variance_{i}")));
    header.push("model_variance".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut trace = Table::new("eda_sphere_trace", &header);
    // generation 0 is drawn from the uniform box, whose per-axis variance is (2b)^2 / 12
    let uniform_var = (2.0 * bound).powi(2) / 12.0;
    for g in &history {
        let pop = &g.population;
        let n = pop.len() as f64;
        let mut row = vec![
            pop.generation.to_string(),
            fmt_num(pop.best_fitness().unwrap_or(f64::NAN)),
        ];
        row.extend((0..d).map(|i| fmt_num(pop.genomes().map(|x| x[i]).sum::<f64>() / n)));
        row.extend(population_variance(pop).into_iter().map(fmt_num));
        let model_var = match g.model.as_ref().and_then(|m| m.as_gaussian()) {
            Some(m) => m.cov().diagonal().mean(),
            None => uniform_var,
        };
        row.push(fmt_num(model_var));
        trace.push(row);
    }

    let snapshots = [0, history.len() / 4, history.len() - 1];
    let series = snapshots
        .iter()
        .map(|&t| {
            Series::new(
                format!("generation {t}"),
                history[t].population.genomes().map(|g| [g[0], g.get(1).copied().unwrap_or(0.0)]).collect(),
            )
        })
        .collect();
    let fig = Figure {
        name: "eda_sphere".into(),
        title: "Gaussian EDA populations".into(),
        series,
        hulls: Vec::new(),
    };
    finish(cfg, vec![trace], vec![fig])
}

pub(crate) fn score_eda(cfg: &ExperimentConfig, tables: &[Table]) -> Result<Scored> {
    let opt = cfg.get_list("optimum")?;
    let t = table(tables, "eda_sphere_trace")?;
    let var = t.nums("model_variance")?;
    if var.is_empty() {
        return Err(CliError::data("eda_sphere_trace.csv", "empty trace"));
    }
    let last = var.len() - 1;
    let mut dist2 = 0.0;
    for (i, o) in opt.iter().enumerate() {
        dist2 += (t.nums(&format!("mean_{i}"))?[last] - o).powi(2);
    }
    let dist = dist2.sqrt();
    let shrink = var[0] / var[last];
    // every generation must sit below the one WINDOW generations earlier
    let worst_window = (WINDOW..var.len())
        .map(|i| var[i] / var[i - WINDOW])
        .fold(0.0, f64::max);
    let metrics = vec![
        ("generations_run".to_string(), last as f64),
        ("final_mean_distance".to_string(), dist),
        ("final_best_fitness".to_string(), t.nums("best_fitness")?[last]),
        ("variance_shrink_factor".to_string(), shrink),
        ("worst_window_variance_ratio".to_string(), worst_window),
    ];
    let checks = vec![
        Check::new("final_mean_near_optimum", dist, Cmp::Lt, 0.1),
        Check::new("generations_within_budget", last as f64, Cmp::Le, 60.0),
        Check::new("variance_shrinks_tenfold", shrink, Cmp::Ge, 10.0),
        Check::new("variance_decreases_per_window", worst_window, Cmp::Lt, 1.0),
    ];
    Ok((metrics, checks))
}

/// `E[-|x|^2]` under a diagonal Gaussian, in closed form.
fn expected_neg_sphere(mean: &[f64], var: &[f64]) -> f64 {
    -(mean.iter().map(|m| m * m).sum::<f64>() + var.iter().sum::<f64>())
}

pub fn run_igo_quadratic(cfg: &ExperimentConfig, rng: &mut RngStream) -> Result<ExperimentReport> {
    let reps = cfg.get_usize("replicates")?;
    let steps = cfg.get_usize("steps")?;
    let m0 = cfg.get_list("initial_mean")?;
    let v0 = cfg.get_f64("initial_variance")?;
    if !(v0 > 0.0) {
        return Err(CliError::config("initial_variance must be positive"));
    }
    let d = m0.len();
    let state = IgoState::new(m0.clone(), vec![v0.ln(); d], cfg.get_f64("step_size")?, cfg.get_usize("batch")?)?;
    let f = |x: &[f64]| -x.iter().map(|v| v * v).sum::<f64>();

    let mut header: Vec<String> = vec!["replicate".into(), "step".into()];
    header.extend((0..d).map(|i| format!("mean_{i}")));
    header.extend((0..d).map(|i| format!("variance_{i}")));
    header.push("expected_fitness".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut trace = Table::new("igo_trace", &header);
    let mut paths = Vec::new();
    for r in 0..reps {
        let mut rr = rng.split();
        let run = igo_run(state.clone(), &f, steps, &mut rr)?;
        for (s, st) in run.iter().enumerate() {
            let var = st.variance();
            let mut row = vec![r.to_string(), s.to_string()];
            row.extend(st.mean.iter().map(|v| fmt_num(*v)));
            row.extend(var.iter().map(|v| fmt_num(*v)));
            row.push(fmt_num(expected_neg_sphere(&st.mean, &var)));
            trace.push(row);
        }
        paths.push(Series::new(
            format!("replicate {r}"),
            run.iter().map(|s| [s.mean[0], s.mean.get(1).copied().unwrap_or(0.0)]).collect(),
        ));
    }
    let fig = Figure {
        name: "igo_quadratic".into(),
        title: "IGO mean trajectories".into(),
        series: paths,
        hulls: Vec::new(),
    };
    finish(cfg, vec![trace], vec![fig])
}

pub(crate) fn score_igo(cfg: &ExperimentConfig, tables: &[Table]) -> Result<Scored> {
    let reps = cfg.get_usize("replicates")?;
    let steps = cfg.get_usize("steps")?;
    let d = cfg.get_list("initial_mean")?.len();
    let t = table(tables, "igo_trace")?;
    let (rep, step, j) = (t.ints("replicate")?, t.ints("step")?, t.nums("expected_fitness")?);
    let means: Vec<Vec<f64>> = (0..d).map(|i| t.nums(&format!("mean_{i}"))).collect::<Result<_>>()?;

    let mut avg = vec![0.0; steps + 1];
    let mut final_norms = Vec::new();
    for i in 0..t.rows.len() {
        if rep[i] < reps && step[i] <= steps {
            avg[step[i]] += j[i] / reps as f64;
            if step[i] == steps {
                final_norms.push(means.iter().map(|m| m[i] * m[i]).sum::<f64>().sqrt());
            }
        }
    }
    let windows: Vec<f64> = avg.chunks(WINDOW).filter(|c| c.len() == WINDOW).map(mean).collect();
    let min_increment = windows.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let metrics = vec![
        ("initial_expected_fitness".to_string(), avg[0]),
        ("final_expected_fitness".to_string(), avg[steps]),
        ("min_window_increment".to_string(), min_increment),
        ("mean_final_mean_norm".to_string(), mean(&final_norms)),
    ];
    let checks = vec![
        Check::new("expected_fitness_windows_nondecreasing", min_increment, Cmp::Ge, 0.0),
        Check::new("expected_fitness_improves", avg[steps] - avg[0], Cmp::Gt, 0.0),
        Check::new("final_mean_near_optimum", mean(&final_norms), Cmp::Lt, 0.2),
    ];
    Ok((metrics, checks))
}
