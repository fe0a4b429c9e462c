use crate::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Bandwidth choice for a one-dimensional Gaussian KDE.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Bandwidth {
    /// `h = std * n^(-1/5)`, with the sample standard deviation. Falls back
    /// to `h = 1` for a single point or zero spread.
    #[default]
    Scott,
    Fixed(f64),
}

/// One-dimensional Gaussian kernel density estimate.
#[derive(Clone, Debug)]
pub struct Kde {
    points: Vec<f64>,
    bandwidth: f64,
}

impl Kde {
    pub fn new(points: Vec<f64>, rule: Bandwidth) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::arg("KDE needs at least one point"));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::arg("KDE points must be finite"));
        }
        let bandwidth = match rule {
            Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
            Bandwidth::Fixed(h) => {
                return Err(Error::arg(format!("KDE bandwidth must be positive, got {h}")))
            }
            Bandwidth::Scott => scott_bandwidth(&points),
        };
        Ok(Self { points, bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn density(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self
            .points
            .iter()
            .map(|p| {
                let z = (x - p) / h;
                (-0.5 * z * z).exp()
            })
            .sum();
        sum * INV_SQRT_2PI / (self.points.len() as f64 * h)
    }
}

/// Convenience constructor mirroring [`Kde::new`].
pub fn kde1d(points: &[f64], rule: Bandwidth) -> Result<Kde> {
    Kde::new(points.to_vec(), rule)
}

fn scott_bandwidth(points: &[f64]) -> f64 {
    let n = points.len();
    if n < 2 {
        return 1.0;
    }
    let mean = points.iter().sum::<f64>() / n as f64;
    let var = points.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let std = var.sqrt();
    if std > 0.0 {
        std * (n as f64).powf(-0.2)
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi(z: f64) -> f64 {
        (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    #[test]
    fn single_point_peak() {
        let k = kde1d(&[2.5], Bandwidth::Fixed(1.0)).unwrap();
        assert!((k.density(2.5) - phi(0.0)).abs() < 1e-16);
        // Scott falls back to unit bandwidth
        assert_eq!(kde1d(&[2.5], Bandwidth::Scott).unwrap().bandwidth(), 1.0);
    }

    #[test]
    fn two_points_midpoint() {
        let k = kde1d(&[-1.0, 1.0], Bandwidth::Fixed(1.0)).unwrap();
        assert!((k.density(0.0) - phi(1.0)).abs() < 1e-16);
    }

    #[test]
    fn integrates_to_one() {
        let k = kde1d(&[-3.0, 0.1, 0.2, 4.0, 4.5], Bandwidth::Scott).unwrap();
        let (lo, hi, steps) = (-20.0, 25.0, 45_000);
        let dx = (hi - lo) / steps as f64;
        let mass: f64 = (0..=steps).map(|i| k.density(lo + i as f64 * dx)).sum::<f64>() * dx;
        assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    }

    #[test]
    fn scott_rule_value() {
        let pts = [1.0, 2.0, 3.0, 4.0];
        let std = (5.0f64 / 3.0).sqrt();
        let k = kde1d(&pts, Bandwidth::Scott).unwrap();
        assert!((k.bandwidth() - std * 4f64.powf(-0.2)).abs() < 1e-15);
        assert_eq!(kde1d(&[3.0, 3.0, 3.0], Bandwidth::Scott).unwrap().bandwidth(), 1.0);
    }

    #[test]
    fn mirrored_context_gives_mirrored_density() {
        let pts = [-2.0, -0.5, 0.3, 1.1, -1.1, -0.3, 0.5, 2.0];
        let k = kde1d(&pts, Bandwidth::Scott).unwrap();
        for x in [0.1, 0.7, 1.9, 3.3] {
            assert!((k.density(x) - k.density(-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(kde1d(&[], Bandwidth::Scott).is_err());
        assert!(kde1d(&[1.0], Bandwidth::Fixed(0.0)).is_err());
        assert!(kde1d(&[1.0], Bandwidth::Fixed(-2.0)).is_err());
    }
}
