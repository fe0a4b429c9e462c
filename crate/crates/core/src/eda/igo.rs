//! Natural-gradient ascent of expected fitness for a diagonal Gaussian
//! search distribution parameterised by mean and log-variance.
//!
//! For `theta = (m, lv)` with `sigma^2 = exp(lv)` the score functions are
//! `(x - m) / sigma^2` and `((x - m)^2 / sigma^2 - 1) / 2`, and the Fisher
//! information is diagonal with entries `1 / sigma^2` and `1 / 2`. The
//! natural gradient is therefore `(sigma^2 g_m, 2 g_lv)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::distributions::{sample_gaussian, GaussianModel};
use crate::{Error, Genome, Result, RngStream};

/// Monte-Carlo estimate of `J = E[f(x)]` under `model`, with its standard
/// error. A constant `f` gives exactly that constant and zero error.
pub fn expected_fitness<F>(model: &GaussianModel, f: &F, n: usize, rng: &mut RngStream) -> Result<(f64, f64)>
where
    F: Fn(&[f64]) -> f64,
{
    if n < 2 {
        return Err(Error::arg("expected fitness needs at least two samples"));
    }
    let xs = sample_gaussian(model, n, rng)?;
    let values = score_all(&xs, f)?;
    let (mean, var) = shifted_moments(&values);
    Ok((mean, (var / n as f64).sqrt()))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FitnessShaping {
    /// Use raw fitness values.
    #[default]
    Raw,
    /// Replace fitness by centred ranks in `[-1/2, 1/2]`.
    Rank,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IgoState {
    pub mean: Vec<f64>,
    pub log_var: Vec<f64>,
    pub step_size: f64,
    pub batch: usize,
    pub shaping: FitnessShaping,
}

impl IgoState {
    pub fn new(mean: Vec<f64>, log_var: Vec<f64>, step_size: f64, batch: usize) -> Result<Self> {
        let s = Self {
            mean,
            log_var,
            step_size,
            batch,
            shaping: FitnessShaping::Raw,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn variance(&self) -> Vec<f64> {
        self.log_var.iter().map(|lv| lv.exp()).collect()
    }

    pub fn model(&self) -> Result<GaussianModel> {
        GaussianModel::diagonal(self.mean.clone(), &self.variance())
    }

    fn validate(&self) -> Result<()> {
        if self.mean.is_empty() || self.mean.len() != self.log_var.len() {
            return Err(Error::arg("IGO mean and log-variance must be non-empty and equally long"));
        }
        if self.batch < 2 {
            return Err(Error::arg("IGO batch must be >= 2"));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::arg("IGO step size must be positive"));
        }
        if self.mean.iter().chain(&self.log_var).any(|v| !v.is_finite()) {
            return Err(Error::numeric("IGO parameters are not finite"));
        }
        Ok(())
    }
}

/// Gradient estimates of `J` at one state.
#[derive(Clone, Debug, PartialEq)]
pub struct IgoGradient {
    pub vanilla_mean: Vec<f64>,
    pub vanilla_log_var: Vec<f64>,
    pub natural_mean: Vec<f64>,
    pub natural_log_var: Vec<f64>,
    /// Standard error of each `vanilla_mean` component.
    pub mean_std_error: Vec<f64>,
}

/// Score-function estimate from given samples and their fitness values,
/// with the batch-mean fitness as baseline.
pub fn igo_gradient(state: &IgoState, samples: &[Genome], fitness: &[f64]) -> Result<IgoGradient> {
    state.validate()?;
    let n = samples.len();
    if n < 2 || fitness.len() != n {
        return Err(Error::arg("need at least two samples with one fitness value each"));
    }
    let d = state.mean.len();
    let utilities = match state.shaping {
        FitnessShaping::Raw => fitness.to_vec(),
        FitnessShaping::Rank => centred_ranks(fitness),
    };
    let (baseline, _) = shifted_moments(&utilities);
    let var = state.variance();

    let mut g_mean = vec![0.0; d];
    let mut g_lv = vec![0.0; d];
    let mut sq_mean = vec![0.0; d];
    for (x, u) in samples.iter().zip(&utilities) {
        if x.len() != d {
            return Err(Error::arg("sample dimension differs from the state"));
        }
        let w = u - baseline;
        for i in 0..d {
            let diff = x[i] - state.mean[i];
            let c = w * diff / var[i];
            g_mean[i] += c;
            sq_mean[i] += c * c;
            g_lv[i] += w * 0.5 * (diff * diff / var[i] - 1.0);
        }
    }
    let nf = n as f64;
    let mut se = vec![0.0; d];
    for i in 0..d {
        g_mean[i] /= nf;
        g_lv[i] /= nf;
        let second = sq_mean[i] / nf - g_mean[i] * g_mean[i];
        se[i] = (second.max(0.0) * nf / (nf - 1.0) / nf).sqrt();
    }
    let natural_mean: Vec<f64> = g_mean.iter().zip(&var).map(|(g, v)| v * g).collect();
    let natural_log_var: Vec<f64> = g_lv.iter().map(|g| 2.0 * g).collect();
    if natural_mean.iter().chain(&natural_log_var).any(|v| !v.is_finite()) {
        return Err(Error::numeric("IGO gradient is not finite"));
    }
    Ok(IgoGradient {
        vanilla_mean: g_mean,
        vanilla_log_var: g_lv,
        natural_mean,
        natural_log_var,
        mean_std_error: se,
    })
}

/// Draws a batch from the state's distribution and estimates the gradient.
pub fn estimate_gradient<F>(state: &IgoState, f: &F, rng: &mut RngStream) -> Result<IgoGradient>
where
    F: Fn(&[f64]) -> f64,
{
    state.validate()?;
    let sd: Vec<f64> = state.log_var.iter().map(|lv| (0.5 * lv).exp()).collect();
    let samples: Vec<Genome> = (0..state.batch)
        .map(|_| {
            state
                .mean
                .iter()
                .zip(&sd)
                .map(|(m, s)| m + s * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let fitness = score_all(&samples, f)?;
    igo_gradient(state, &samples, &fitness)
}

/// One natural-gradient step `theta <- theta + step_size * F^-1 grad J`.
pub fn igo_step<F>(state: &IgoState, f: &F, rng: &mut RngStream) -> Result<IgoState>
where
    F: Fn(&[f64]) -> f64,
{
    let g = estimate_gradient(state, f, rng)?;
    let eps = state.step_size;
    let mut next = state.clone();
    for i in 0..next.mean.len() {
        next.mean[i] += eps * g.natural_mean[i];
        next.log_var[i] += eps * g.natural_log_var[i];
    }
    if next.mean.iter().chain(&next.log_var).any(|v| !v.is_finite()) {
        return Err(Error::numeric("IGO update produced non-finite parameters"));
    }
    Ok(next)
}

/// `steps` consecutive IGO steps; the returned trace starts with `state`.
pub fn igo_run<F>(state: IgoState, f: &F, steps: usize, rng: &mut RngStream) -> Result<Vec<IgoState>>
where
    F: Fn(&[f64]) -> f64,
{
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(state);
    for _ in 0..steps {
        let next = igo_step(trace.last().expect("non-empty"), f, rng)?;
        trace.push(next);
    }
    Ok(trace)
}

fn score_all<F>(xs: &[Genome], f: &F) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    xs.iter()
        .map(|x| {
            let v = f(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFiniteFitness {
                    genome: x.clone(),
                    value: v,
                })
            }
        })
        .collect()
}

/// Mean and unbiased variance, accumulated relative to the first value so
/// that constant inputs come out exact.
fn shifted_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let pivot = values[0];
    let mut s = 0.0;
    let mut s2 = 0.0;
    for v in values {
        let d = v - pivot;
        s += d;
        s2 += d * d;
    }
    let mean_shift = s / n;
    let var = if values.len() > 1 {
        ((s2 - s * mean_shift) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    (pivot + mean_shift, var)
}

fn centred_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank as f64 / (n - 1) as f64 - 0.5;
    }
    out
}
