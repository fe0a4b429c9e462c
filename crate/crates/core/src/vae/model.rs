use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result, RngStream};

pub const LATENT_DIM: usize = 32;
pub const DEFAULT_HIDDEN: usize = 64;

/// Weights of the conditional VAE. Matrices map column vectors, i.e. a
/// layer computes `w * input + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct VaeModel {
    pub enc_w1: DMatrix<f64>,
    pub enc_b1: DVector<f64>,
    pub enc_w_mu: DMatrix<f64>,
    pub enc_b_mu: DVector<f64>,
    pub enc_w_logvar: DMatrix<f64>,
    pub enc_b_logvar: DVector<f64>,
    pub dec_w1: DMatrix<f64>,
    pub dec_b1: DVector<f64>,
    pub dec_w_out: DMatrix<f64>,
    pub dec_b_out: DVector<f64>,
}

/// Per-sample ELBO decomposition. `elbo = recon - kl_weight * kl`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElboTerms {
    pub elbo: f64,
    /// `-|x - x_hat|^2 / 2`, the Gaussian log-likelihood without its constant.
    pub recon: f64,
    pub kl: f64,
}

pub(crate) struct Forward {
    pub enc_in: DVector<f64>,
    pub h1: DVector<f64>,
    pub mu: DVector<f64>,
    pub logvar: DVector<f64>,
    pub eps: DVector<f64>,
    pub dec_in: DVector<f64>,
    pub h2: DVector<f64>,
    pub x_hat: DVector<f64>,
}

impl VaeModel {
    /// Gaussian-initialised weights with standard deviation `init_scale`
    /// and zero biases.
    pub fn new(
        x_dim: usize,
        label_dim: usize,
        hidden: usize,
        latent: usize,
        init_scale: f64,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if x_dim == 0 || hidden == 0 || latent == 0 {
            return Err(Error::arg("VAE dimensions must be positive"));
        }
        let mut w = |r: usize, c: usize| {
            DMatrix::from_fn(r, c, |_, _| init_scale * rng.sample::<f64, _>(StandardNormal))
        };
        Ok(Self {
            enc_w1: w(hidden, x_dim + label_dim),
            enc_b1: DVector::zeros(hidden),
            enc_w_mu: w(latent, hidden),
            enc_b_mu: DVector::zeros(latent),
            enc_w_logvar: w(latent, hidden),
            enc_b_logvar: DVector::zeros(latent),
            dec_w1: w(hidden, latent + label_dim),
            dec_b1: DVector::zeros(hidden),
            dec_w_out: w(x_dim, hidden),
            dec_b_out: DVector::zeros(x_dim),
        })
    }

    pub(crate) fn zeros(x_dim: usize, label_dim: usize, hidden: usize, latent: usize) -> Self {
        Self {
            enc_w1: DMatrix::zeros(hidden, x_dim + label_dim),
            enc_b1: DVector::zeros(hidden),
            enc_w_mu: DMatrix::zeros(latent, hidden),
            enc_b_mu: DVector::zeros(latent),
            enc_w_logvar: DMatrix::zeros(latent, hidden),
            enc_b_logvar: DVector::zeros(latent),
            dec_w1: DMatrix::zeros(hidden, latent + label_dim),
            dec_b1: DVector::zeros(hidden),
            dec_w_out: DMatrix::zeros(x_dim, hidden),
            dec_b_out: DVector::zeros(x_dim),
        }
    }

    pub(crate) fn zeros_like(&self) -> Self {
        Self::zeros(self.x_dim(), self.label_dim(), self.hidden(), self.latent())
    }

    pub fn x_dim(&self) -> usize {
        self.dec_w_out.nrows()
    }

    pub fn label_dim(&self) -> usize {
        self.enc_w1.ncols() - self.x_dim()
    }

    pub fn hidden(&self) -> usize {
        self.enc_w1.nrows()
    }

    pub fn latent(&self) -> usize {
        self.enc_w_mu.nrows()
    }

    /// Checks that all blocks agree on their shapes and are finite.
    pub fn validate(&self) -> Result<()> {
        let (x, l, h, z) = (self.x_dim(), self.label_dim(), self.hidden(), self.latent());
        let shapes = [
            ("enc_w1", self.enc_w1.shape(), (h, x + l)),
            ("enc_b1", self.enc_b1.shape(), (h, 1)),
            ("enc_w_mu", self.enc_w_mu.shape(), (z, h)),
            ("enc_b_mu", self.enc_b_mu.shape(), (z, 1)),
            ("enc_w_logvar", self.enc_w_logvar.shape(), (z, h)),
            ("enc_b_logvar", self.enc_b_logvar.shape(), (z, 1)),
            ("dec_w1", self.dec_w1.shape(), (h, z + l)),
            ("dec_b1", self.dec_b1.shape(), (h, 1)),
            ("dec_w_out", self.dec_w_out.shape(), (x, h)),
            ("dec_b_out", self.dec_b_out.shape(), (x, 1)),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(Error::arg(format!("{name} has shape {got:?}, expected {want:?}")));
            }
        }
        if self.blocks().iter().any(|(_, b)| b.iter().any(|v| !v.is_finite())) {
            return Err(Error::numeric("VAE weights contain non-finite values"));
        }
        Ok(())
    }

    /// Parameter blocks in canonical order, each as column-major storage.
    pub fn blocks(&self) -> [(&'static str, &[f64]); 10] {
        [
            ("enc_w1", self.enc_w1.as_slice()),
            ("enc_b1", self.enc_b1.as_slice()),
            ("enc_w_mu", self.enc_w_mu.as_slice()),
            ("enc_b_mu", self.enc_b_mu.as_slice()),
            ("enc_w_logvar", self.enc_w_logvar.as_slice()),
            ("enc_b_logvar", self.enc_b_logvar.as_slice()),
            ("dec_w1", self.dec_w1.as_slice()),
            ("dec_b1", self.dec_b1.as_slice()),
            ("dec_w_out", self.dec_w_out.as_slice()),
            ("dec_b_out", self.dec_b_out.as_slice()),
        ]
    }

    pub fn blocks_mut(&mut self) -> [(&'static str, &mut [f64]); 10] {
        [
            ("enc_w1", self.enc_w1.as_mut_slice()),
            ("enc_b1", self.enc_b1.as_mut_slice()),
            ("enc_w_mu", self.enc_w_mu.as_mut_slice()),
            ("enc_b_mu", self.enc_b_mu.as_mut_slice()),
            ("enc_w_logvar", self.enc_w_logvar.as_mut_slice()),
            ("enc_b_logvar", self.enc_b_logvar.as_mut_slice()),
            ("dec_w1", self.dec_w1.as_mut_slice()),
            ("dec_b1", self.dec_b1.as_mut_slice()),
            ("dec_w_out", self.dec_w_out.as_mut_slice()),
            ("dec_b_out", self.dec_b_out.as_mut_slice()),
        ]
    }

    pub(crate) fn check_input(&self, x: &[f64], label: &[f64]) -> Result<()> {
        if x.len() != self.x_dim() || label.len() != self.label_dim() {
            return Err(Error::arg(format!(
                "VAE expects x of length {} and label of length {}, got {} and {}",
                self.x_dim(),
                self.label_dim(),
                x.len(),
                label.len()
            )));
        }
        Ok(())
    }

    /// Encoder mean and log-variance for one input.
    pub fn encode(&self, x: &[f64], label: &[f64]) -> Result<(DVector<f64>, DVector<f64>)> {
        self.check_input(x, label)?;
        let enc_in = concat(x, label);
        let h1 = (&self.enc_w1 * &enc_in + &self.enc_b1).map(f64::tanh);
        let mu = &self.enc_w_mu * &h1 + &self.enc_b_mu;
        let logvar = &self.enc_w_logvar * &h1 + &self.enc_b_logvar;
        Ok((mu, logvar))
    }

    /// Decoder output for a latent code and label.
    pub fn decode(&self, z: &[f64], label: &[f64]) -> Result<DVector<f64>> {
        if z.len() != self.latent() || label.len() != self.label_dim() {
            return Err(Error::arg("latent or label length does not match the model"));
        }
        let dec_in = concat(z, label);
        let h2 = (&self.dec_w1 * &dec_in + &self.dec_b1).map(f64::tanh);
        Ok(&self.dec_w_out * h2 + &self.dec_b_out)
    }

    /// Full forward pass with a given reparameterisation noise `eps`.
    pub(crate) fn forward(&self, x: &[f64], label: &[f64], eps: DVector<f64>) -> Forward {
        let enc_in = concat(x, label);
        let h1 = (&self.enc_w1 * &enc_in + &self.enc_b1).map(f64::tanh);
        let mu = &self.enc_w_mu * &h1 + &self.enc_b_mu;
        let logvar = &self.enc_w_logvar * &h1 + &self.enc_b_logvar;
        let z = &mu + logvar.map(|lv| (0.5 * lv).exp()).component_mul(&eps);
        let dec_in = concat(z.as_slice(), label);
        let h2 = (&self.dec_w1 * &dec_in + &self.dec_b1).map(f64::tanh);
        let x_hat = &self.dec_w_out * &h2 + &self.dec_b_out;
        Forward {
            enc_in,
            h1,
            mu,
            logvar,
            eps,
            dec_in,
            h2,
            x_hat,
        }
    }

    pub(crate) fn terms(&self, fwd: &Forward, x: &[f64], kl_weight: f64) -> ElboTerms {
        let recon = -0.5
            * x.iter()
                .zip(fwd.x_hat.iter())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>();
        let kl = kl_divergence(fwd.mu.as_slice(), fwd.logvar.as_slice());
        ElboTerms {
            elbo: recon - kl_weight * kl,
            recon,
            kl,
        }
    }

    /// Adds the gradient of the per-sample ELBO (ascent direction) to `grad`.
    pub(crate) fn accumulate_grad(&self, fwd: &Forward, x: &[f64], kl_weight: f64, grad: &mut VaeModel) {
        let g_xhat = DVector::from_iterator(
            x.len(),
            x.iter().zip(fwd.x_hat.iter()).map(|(a, b)| a - b),
        );
        grad.dec_w_out.ger(1.0, &g_xhat, &fwd.h2, 1.0);
        grad.dec_b_out += &g_xhat;

        let g_a2 = (self.dec_w_out.tr_mul(&g_xhat)).zip_map(&fwd.h2, |g, h| g * (1.0 - h * h));
        grad.dec_w1.ger(1.0, &g_a2, &fwd.dec_in, 1.0);
        grad.dec_b1 += &g_a2;

        let g_dec_in = self.dec_w1.tr_mul(&g_a2);
        let latent = self.latent();
        let g_z = g_dec_in.rows(0, latent);

        let g_mu = DVector::from_fn(latent, |j, _| g_z[j] - kl_weight * fwd.mu[j]);
        let g_lv = DVector::from_fn(latent, |j, _| {
            let lv = fwd.logvar[j];
            g_z[j] * fwd.eps[j] * 0.5 * (0.5 * lv).exp() - kl_weight * 0.5 * (lv.exp() - 1.0)
        });
        grad.enc_w_mu.ger(1.0, &g_mu, &fwd.h1, 1.0);
        grad.enc_b_mu += &g_mu;
        grad.enc_w_logvar.ger(1.0, &g_lv, &fwd.h1, 1.0);
        grad.enc_b_logvar += &g_lv;

        let g_h1 = self.enc_w_mu.tr_mul(&g_mu) + self.enc_w_logvar.tr_mul(&g_lv);
        let g_a1 = g_h1.zip_map(&fwd.h1, |g, h| g * (1.0 - h * h));
        grad.enc_w1.ger(1.0, &g_a1, &fwd.enc_in, 1.0);
        grad.enc_b1 += &g_a1;
    }
}

/// `KL(N(mu, diag(exp(logvar))) || N(0, I))`.
pub fn kl_divergence(mu: &[f64], logvar: &[f64]) -> f64 {
    0.5 * mu
        .iter()
        .zip(logvar)
        .map(|(m, lv)| m * m + lv.exp() - lv - 1.0)
        .sum::<f64>()
}

/// One-hot vector of length `n` with a one at `k`.
pub fn one_hot(k: usize, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

/// Single-draw Monte-Carlo ELBO of one labelled point.
pub fn vae_elbo(
    model: &VaeModel,
    x: &[f64],
    label: &[f64],
    kl_weight: f64,
    rng: &mut RngStream,
) -> Result<ElboTerms> {
    model.check_input(x, label)?;
    let eps = DVector::from_fn(model.latent(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let fwd = model.forward(x, label, eps);
    Ok(model.terms(&fwd, x, kl_weight))
}

fn concat(a: &[f64], b: &[f64]) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b).copied())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> VaeModel {
        VaeModel::new(2, 2, DEFAULT_HIDDEN, LATENT_DIM, 0.1, &mut RngStream::new(0)).unwrap()
    }

    #[test]
    fn prior_matching_encoder_has_zero_kl() {
        let mut m = model();
        m.enc_w_mu.fill(0.0);
        m.enc_b_mu.fill(0.0);
        m.enc_w_logvar.fill(0.0);
        m.enc_b_logvar.fill(0.0);
        let t = vae_elbo(&m, &[0.3, -1.0], &[1.0, 0.0], 1.0, &mut RngStream::new(1)).unwrap();
        assert_eq!(t.kl, 0.0);
    }

    #[test]
    fn unit_mean_kl_is_sixteen() {
        let mut m = model();
        m.enc_w_mu.fill(0.0);
        m.enc_b_mu.fill(1.0);
        m.enc_w_logvar.fill(0.0);
        m.enc_b_logvar.fill(0.0);
        let t = vae_elbo(&m, &[0.3, -1.0], &[0.0, 1.0], 1.0, &mut RngStream::new(1)).unwrap();
        assert!((t.kl - 16.0).abs() < 1e-12);
        assert!((t.elbo - (t.recon - 16.0)).abs() < 1e-12);
    }

    #[test]
    fn perfect_reconstruction_has_zero_recon() {
        let mut m = model();
        m.dec_w_out.fill(0.0);
        m.dec_b_out = DVector::from_vec(vec![0.3, -1.0]);
        let t = vae_elbo(&m, &[0.3, -1.0], &[1.0, 0.0], 1.0, &mut RngStream::new(1)).unwrap();
        assert_eq!(t.recon, 0.0);
    }

    #[test]
    fn kl_is_nonnegative_and_zero_only_at_prior() {
        assert_eq!(kl_divergence(&[0.0; 4], &[0.0; 4]), 0.0);
        assert!(kl_divergence(&[0.0, 0.1], &[0.0, 0.0]) > 0.0);
        assert!(kl_divergence(&[0.0, 0.0], &[0.0, -0.1]) > 0.0);
        assert!(kl_divergence(&[-2.0, 0.5], &[1.5, -3.0]) > 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let m = model();
        let mut rng = RngStream::new(0);
        assert!(vae_elbo(&m, &[0.0], &[1.0, 0.0], 1.0, &mut rng).is_err());
        assert!(vae_elbo(&m, &[0.0, 0.0], &[1.0], 1.0, &mut rng).is_err());
    }

    #[test]
    fn fresh_model_is_valid() {
        let m = model();
        m.validate().unwrap();
        assert_eq!((m.x_dim(), m.label_dim(), m.hidden(), m.latent()), (2, 2, 64, 32));
    }
}
