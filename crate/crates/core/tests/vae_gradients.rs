//! Backprop of the conditional VAE against central finite differences, and
//! training behaviour on a two-cluster toy set.

use nalgebra::DVector;
use natgen::vae::{batch_elbo_and_grad, one_hot, vae_sample, vae_train, TrainConfig, VaeModel, DEFAULT_HIDDEN, LATENT_DIM};
use natgen::{Genome, RngStream};
use rand::Rng;
use rand_distr::StandardNormal;

const CENTERS: [[f64; 2]; 2] = [[-2.0, -2.0], [2.0, 2.0]];

fn toy(n_per: usize, rng: &mut RngStream) -> Vec<(Genome, Vec<f64>)> {
    let mut out = Vec::new();
    for (k, c) in CENTERS.iter().enumerate() {
        for _ in 0..n_per {
            let x = vec![
                c[0] + 0.3 * rng.sample::<f64, _>(StandardNormal),
                c[1] + 0.3 * rng.sample::<f64, _>(StandardNormal),
            ];
            out.push((x, one_hot(k, 2)));
        }
    }
    out
}

/// Largest relative error over all entries of each weight block, against a
/// five-point central difference. The denominator is floored at 1e-6 so
/// entries with vanishing gradient are judged on absolute error.
fn fd_errors(model: &VaeModel, batch: &[(Genome, Vec<f64>)], eps: &[DVector<f64>]) -> Vec<(&'static str, f64)> {
    let (_, grad) = batch_elbo_and_grad(model, batch, eps, 1.0).unwrap();
    let h = 1e-3;
    let mut out = Vec::new();
    let names: Vec<&'static str> = model.blocks().iter().map(|(n, _)| *n).collect();
    for (b, name) in names.iter().enumerate() {
        let len = model.blocks()[b].1.len();
        let mut worst = 0.0f64;
        for i in 0..len {
            let at = |step: f64| {
                let mut m = model.clone();
                m.blocks_mut()[b].1[i] += step;
                batch_elbo_and_grad(&m, batch, eps, 1.0).unwrap().0
            };
            let numeric = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
            let analytic = grad.blocks()[b].1[i];
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        }
        out.push((*name, worst));
    }
    out
}

#[test]
fn every_block_matches_finite_differences() {
    let mut rng = RngStream::new(3);
    let model = VaeModel::new(2, 2, DEFAULT_HIDDEN, LATENT_DIM, 0.3, &mut rng).unwrap();
    let batch = toy(2, &mut rng);
    let eps: Vec<DVector<f64>> = batch
        .iter()
        .map(|_| DVector::from_fn(LATENT_DIM, |_, _| rng.sample::<f64, _>(StandardNormal)))
        .collect();
    for (name, err) in fd_errors(&model, &batch, &eps) {
        assert!(err <= 1e-4, "{name}: relative error {err:e}");
    }
}

#[test]
fn training_improves_elbo_and_conditions_on_label() {
    let mut rng = RngStream::new(4);
    let data = toy(100, &mut rng);
    let model = VaeModel::new(2, 2, DEFAULT_HIDDEN, LATENT_DIM, 0.1, &mut rng).unwrap();
    let cfg = TrainConfig {
        epochs: 500,
        ..TrainConfig::default()
    };
    let (trained, trace) = vae_train(model, &data, &cfg, &mut rng).unwrap();
    let (first, last) = (trace[0], *trace.last().unwrap());
    assert!(last - first >= 0.2 * first.abs(), "ELBO {first} -> {last}");
    for (k, c) in CENTERS.iter().enumerate() {
        let xs = vae_sample(&trained, &one_hot(k, 2), 500, &mut rng).unwrap();
        let hits = xs
            .iter()
            .filter(|x| {
                let d = |p: &[f64; 2]| (x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2);
                d(c) < d(&CENTERS[1 - k])
            })
            .count();
        assert!(hits as f64 >= 0.9 * 500.0, "label {k}: {hits}/500");
    }
}
