use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Genome, Result, RngStream};

/// Ridge added to every fitted covariance.
pub const DEFAULT_REGULARIZATION: f64 = 1e-9;

/// Multivariate normal `N(mean, cov)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianModel {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianModel {
    /// Builds a model from a mean and a full covariance. The covariance must
    /// be square, finite and symmetric; definiteness is checked lazily by the
    /// operations that need a factorisation.
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::arg("Gaussian needs at least one dimension"));
        }
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::arg(format!(
                "covariance is {}x{}, mean has length {d}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::arg("Gaussian parameters must be finite"));
        }
        let scale = cov.amax().max(f64::MIN_POSITIVE);
        for i in 0..d {
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::arg(format!("covariance is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self {
            mean: DVector::from_vec(mean),
            cov,
        })
    }

    /// Axis-aligned Gaussian with the given per-dimension variances.
    pub fn diagonal(mean: Vec<f64>, variances: &[f64]) -> Result<Self> {
        if variances.len() != mean.len() {
            return Err(Error::arg("variance vector length differs from mean"));
        }
        let cov = DMatrix::from_diagonal(&DVector::from_column_slice(variances));
        Self::new(mean, cov)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub(crate) fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        Self { mean, cov }
    }

    pub(crate) fn cholesky(&self) -> Result<Cholesky<f64, Dyn>> {
        Cholesky::new(self.cov.clone())
            .ok_or_else(|| Error::numeric("covariance is not positive definite"))
    }

    /// Precision matrix `cov^-1`.
    pub fn precision(&self) -> Result<DMatrix<f64>> {
        Ok(self.cholesky()?.inverse())
    }

    pub fn logpdf(&self, x: &[f64]) -> Result<f64> {
        gaussian_logpdf(self, x)
    }

    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        Ok(self.logpdf(x)?.exp())
    }

    /// Squared Mahalanobis distance of `x` from the mean.
    pub fn mahalanobis_sq(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let chol = self.cholesky()?;
        let diff = DVector::from_column_slice(x) - &self.mean;
        let w = chol
            .l()
            .solve_lower_triangular(&diff)
            .ok_or_else(|| Error::numeric("singular Cholesky factor"))?;
        Ok(w.norm_squared())
    }

    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Result<Vec<Genome>> {
        sample_gaussian(self, n, rng)
    }

    /// Factorises once for repeated single draws.
    pub(crate) fn sampler(&self) -> Result<Sampler<'_>> {
        Ok(Sampler {
            mean: &self.mean,
            factor: self.cholesky()?.l(),
        })
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::arg(format!(
                "point has length {}, model has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// Maximum-likelihood Gaussian (covariance divided by `n`) plus
/// `regularize * I`.
pub fn fit_gaussian<G: AsRef<[f64]>>(samples: &[G], regularize: f64) -> Result<GaussianModel> {
    let first = samples
        .first()
        .ok_or_else(|| Error::arg("cannot fit a Gaussian to zero samples"))?;
    let d = first.as_ref().len();
    if d == 0 || samples.iter().any(|s| s.as_ref().len() != d) {
        return Err(Error::arg("samples must share a positive dimension"));
    }
    if !(regularize >= 0.0) {
        return Err(Error::arg("regularization must be non-negative"));
    }
    let n = samples.len() as f64;
    let mut mean = DVector::zeros(d);
    for s in samples {
        mean += DVector::from_column_slice(s.as_ref());
    }
    mean /= n;
    let mut cov = DMatrix::zeros(d, d);
    for s in samples {
        let diff = DVector::from_column_slice(s.as_ref()) - &mean;
        cov.ger(1.0, &diff, &diff, 1.0);
    }
    cov /= n;
    for i in 0..d {
        cov[(i, i)] += regularize;
    }
    // exact symmetry despite rounding in the rank-one updates
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianModel::new(mean.iter().copied().collect(), cov)
}

pub fn gaussian_logpdf(model: &GaussianModel, x: &[f64]) -> Result<f64> {
    model.check_dim(x)?;
    let chol = model.cholesky()?;
    let diff = DVector::from_column_slice(x) - &model.mean;
    let w = chol
        .l()
        .solve_lower_triangular(&diff)
        .ok_or_else(|| Error::numeric("singular Cholesky factor"))?;
    let log_det: f64 = chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
    let d = model.dim() as f64;
    Ok(-0.5 * (d * (2.0 * std::f64::consts::PI).ln() + log_det + w.norm_squared()))
}

/// `n` independent draws `mean + L z` with `L` the Cholesky factor of the
/// covariance.
pub fn sample_gaussian(model: &GaussianModel, n: usize, rng: &mut RngStream) -> Result<Vec<Genome>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let sampler = model.sampler()?;
    Ok((0..n).map(|_| sampler.draw(rng)).collect())
}

pub(crate) struct Sampler<'a> {
    mean: &'a DVector<f64>,
    factor: DMatrix<f64>,
}

impl Sampler<'_> {
    pub(crate) fn draw(&self, rng: &mut RngStream) -> Genome {
        let d = self.mean.len();
        let z = DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let x = self.mean + &self.factor * z;
        x.iter().copied().collect()
    }
}
