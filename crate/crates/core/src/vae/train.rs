use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use super::model::VaeModel;
use crate::{Error, Genome, Result, RngStream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub kl_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 500,
            batch_size: 32,
            kl_weight: 1.0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::arg("learning rate must be finite and non-negative"));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::arg("epochs and batch size must be positive"));
        }
        if !(self.kl_weight >= 0.0) {
            return Err(Error::arg("KL weight must be non-negative"));
        }
        Ok(())
    }
}

/// Mean ELBO over `batch` and its exact gradient with respect to every
/// weight, for fixed reparameterisation noise (`eps[i]` for sample `i`).
pub fn batch_elbo_and_grad(
    model: &VaeModel,
    batch: &[(Genome, Vec<f64>)],
    eps: &[DVector<f64>],
    kl_weight: f64,
) -> Result<(f64, VaeModel)> {
    if batch.is_empty() || eps.len() != batch.len() {
        return Err(Error::arg("need one noise vector per batch element"));
    }
    let mut grad = model.zeros_like();
    let mut total = 0.0;
    for ((x, label), e) in batch.iter().zip(eps) {
        model.check_input(x, label)?;
        if e.len() != model.latent() {
            return Err(Error::arg("noise vector length does not match latent size"));
        }
        let fwd = model.forward(x, label, e.clone());
        total += model.terms(&fwd, x, kl_weight).elbo;
        model.accumulate_grad(&fwd, x, kl_weight, &mut grad);
    }
    let scale = 1.0 / batch.len() as f64;
    for (_, g) in grad.blocks_mut() {
        g.iter_mut().for_each(|v| *v *= scale);
    }
    Ok((total * scale, grad))
}

/// Minibatch gradient ascent on the mean ELBO. Returns the trained model and
/// the mean ELBO of each epoch (averaged over the minibatches seen).
pub fn vae_train(
    mut model: VaeModel,
    data: &[(Genome, Vec<f64>)],
    cfg: &TrainConfig,
    rng: &mut RngStream,
) -> Result<(VaeModel, Vec<f64>)> {
    cfg.validate()?;
    model.validate()?;
    if data.is_empty() {
        return Err(Error::arg("cannot train on an empty data set"));
    }
    for (x, label) in data {
        model.check_input(x, label)?;
    }
    let latent = model.latent();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(rng);
        let mut epoch_total = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<(Genome, Vec<f64>)> = chunk.iter().map(|&i| data[i].clone()).collect();
            let eps: Vec<DVector<f64>> = chunk
                .iter()
                .map(|_| DVector::from_fn(latent, |_, _| rng.sample::<f64, _>(StandardNormal)))
                .collect();
            let (elbo, grad) = batch_elbo_and_grad(&model, &batch, &eps, cfg.kl_weight)?;
            if !elbo.is_finite() {
                return Err(Error::Training { epoch, value: elbo });
            }
            epoch_total += elbo * chunk.len() as f64;
            for ((_, w), (_, g)) in model.blocks_mut().into_iter().zip(grad.blocks()) {
                for (wi, gi) in w.iter_mut().zip(g) {
                    *wi += cfg.learning_rate * gi;
                }
            }
        }
        let mean = epoch_total / data.len() as f64;
        if !mean.is_finite() {
            return Err(Error::Training { epoch, value: mean });
        }
        trace.push(mean);
    }
    Ok((model, trace))
}

/// Decodes `n` prior draws `z ~ N(0, I)` under the given label.
pub fn vae_sample(model: &VaeModel, label: &[f64], n: usize, rng: &mut RngStream) -> Result<Vec<Genome>> {
    if label.len() != model.label_dim() {
        return Err(Error::arg("label length does not match the model"));
    }
    (0..n)
        .map(|_| {
            let z: Vec<f64> = (0..model.latent())
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect();
            Ok(model.decode(&z, label)?.iter().copied().collect())
        })
        .collect()
}
