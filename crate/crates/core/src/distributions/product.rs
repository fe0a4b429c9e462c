use nalgebra::{DMatrix, DVector};

use super::GaussianModel;
use crate::{Error, Result};

/// Two or more Gaussian experts of a common dimension whose densities are
/// multiplied together.
#[derive(Clone, Debug)]
pub struct ProductSpec {
    factors: Vec<GaussianModel>,
}

impl ProductSpec {
    pub fn new(factors: Vec<GaussianModel>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::arg("a product needs at least two factors"));
        }
        let dim = factors[0].dim();
        if factors.iter().any(|f| f.dim() != dim) {
            return Err(Error::arg("product factors differ in dimension"));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[GaussianModel] {
        &self.factors
    }
}

/// Normalised product of Gaussian densities.
///
/// Precisions and precision-weighted means are accumulated over all factors
/// and inverted once: `Sigma = (sum Sigma_k^-1)^-1`,
/// `mu = Sigma * sum Sigma_k^-1 mu_k`. The normalising constant of the raw
/// product is dropped.
pub fn product_of_gaussians(spec: &ProductSpec) -> Result<GaussianModel> {
    let d = spec.factors[0].dim();
    let mut precision = DMatrix::zeros(d, d);
    let mut info = DVector::zeros(d);
    for f in &spec.factors {
        let p = f.precision()?;
        info += &p * f.mean();
        precision += p;
    }
    from_information(precision, info)
}

/// Two-factor product in the textbook form
/// `Sigma = (Sigma_a^-1 + Sigma_b^-1)^-1`.
pub fn product_pair(a: &GaussianModel, b: &GaussianModel) -> Result<GaussianModel> {
    product_of_gaussians(&ProductSpec::new(vec![a.clone(), b.clone()])?)
}

fn from_information(precision: DMatrix<f64>, info: DVector<f64>) -> Result<GaussianModel> {
    let precision = (&precision + precision.transpose()) * 0.5;
    let chol = precision
        .cholesky()
        .ok_or_else(|| Error::numeric("summed precision is not positive definite"))?;
    let cov = chol.inverse();
    let cov = (&cov + cov.transpose()) * 0.5;
    let mean = &cov * info;
    Ok(GaussianModel::from_parts(mean, cov))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(mean: [f64; 2], var: [f64; 2]) -> GaussianModel {
        GaussianModel::diagonal(mean.to_vec(), &var).unwrap()
    }

    #[test]
    fn identical_factors_halve_the_covariance() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5]);
        let f = GaussianModel::new(vec![1.0, -4.0], cov.clone()).unwrap();
        let p = product_pair(&f, &f).unwrap();
        assert!((p.mean() - f.mean()).amax() < 1e-12);
        assert!((p.cov() - cov * 0.5).amax() < 1e-12);
    }

    #[test]
    fn anisotropic_pair_fuses_to_three_three() {
        let p = product_pair(&g([2.0, 8.0], [0.2, 1.0]), &g([8.0, 2.0], [1.0, 0.2])).unwrap();
        assert!((p.mean()[0] - 3.0).abs() < 1e-12);
        assert!((p.mean()[1] - 3.0).abs() < 1e-12);
        let expected = DMatrix::identity(2, 2) / 6.0;
        assert!((p.cov() - expected).amax() < 1e-12);
    }

    #[test]
    fn dominant_traits_limit() {
        let s = 1e-8;
        let p = product_pair(&g([2.0, 8.0], [s, 1.0]), &g([8.0, 2.0], [1.0, s])).unwrap();
        assert!((p.mean()[0] - 2.0).abs() < 1e-3);
        assert!((p.mean()[1] - 2.0).abs() < 1e-3);
    }

    #[test]
    fn singular_factor_is_numeric_error() {
        let bad = g([0.0, 0.0], [1.0, 0.0]);
        let ok = g([0.0, 0.0], [1.0, 1.0]);
        assert!(matches!(product_pair(&bad, &ok), Err(Error::Numeric(_))));
    }

    #[test]
    fn needs_two_factors_of_equal_dimension() {
        assert!(ProductSpec::new(vec![g([0.0, 0.0], [1.0, 1.0])]).is_err());
        let one_d = GaussianModel::diagonal(vec![0.0], &[1.0]).unwrap();
        assert!(ProductSpec::new(vec![g([0.0, 0.0], [1.0, 1.0]), one_d]).is_err());
    }

    #[test]
    fn fold_order_does_not_matter() {
        let a = GaussianModel::new(vec![1.0, 2.0], DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.7])).unwrap();
        let b = g([-1.0, 3.0], [0.4, 2.0]);
        let c = GaussianModel::new(vec![0.5, 0.0], DMatrix::from_row_slice(2, 2, &[3.0, -0.5, -0.5, 1.0])).unwrap();
        let all = product_of_gaussians(&ProductSpec::new(vec![a.clone(), b.clone(), c.clone()]).unwrap()).unwrap();
        let left = product_pair(&product_pair(&a, &b).unwrap(), &c).unwrap();
        let right = product_pair(&a, &product_pair(&c, &b).unwrap()).unwrap();
        for m in [&left, &right] {
            assert!((m.mean() - all.mean()).amax() < 1e-10);
            assert!((m.cov() - all.cov()).amax() < 1e-10);
        }
    }
}
