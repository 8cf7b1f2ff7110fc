//! Least-squares fits of exponential decay and power laws.

use crate::error::{Error, Result};

/// `ln y ≈ intercept + slope x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogLinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of `ln y`.
    pub residual: f64,
    pub samples: usize,
}

/// Fits `ln y` against `x`. Needs two distinct `x` values and positive,
/// not-all-equal `y`.
pub fn fit_log_linear(x: &[f64], y: &[f64]) -> Result<LogLinearFit> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} samples", x.len())));
    }
    if let Some(bad) = y.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateFit(format!("non-positive sample {bad}")));
    }
    let first = y[0];
    if y.iter().all(|v| *v == first) {
        return Err(Error::DegenerateFit("constant series".into()));
    }
    let n = x.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae equal".into()));
    }
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(LogLinearFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        samples: x.len(),
    })
}

/// Exponential decay `y ≈ A e^{-r t}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
    pub residual: f64,
    pub samples: usize,
}

pub fn fit_decay(t: &[f64], y: &[f64]) -> Result<DecayFit> {
    let f = fit_log_linear(t, y)?;
    Ok(DecayFit {
        rate: -f.slope,
        amplitude: f.intercept.exp(),
        residual: f.residual,
        samples: f.samples,
    })
}

/// Power law `y ≈ C x^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub residual: f64,
    pub samples: usize,
}

pub fn fit_power(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    if let Some(bad) = x.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::DegenerateFit(format!("non-positive abscissa {bad}")));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let f = fit_log_linear(&lx, y)?;
    Ok(PowerFit {
        exponent: f.slope,
        prefactor: f.intercept.exp(),
        residual: f.residual,
        samples: f.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_exponential() {
        let t: Vec<f64> = (0..10).map(|i| 0.3 * i as f64).collect();
        let y: Vec<f64> = t.iter().map(|s| 2.5 * (-1.7 * s).exp()).collect();
        let f = fit_decay(&t, &y).unwrap();
        assert!((f.rate - 1.7).abs() < 1e-12);
        assert!((f.amplitude - 2.5).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert_eq!(f.samples, 10);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_decay(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).is_err());
        assert!(fit_decay(&[0.0], &[1.0]).is_err());
        assert!(fit_decay(&[0.0, 1.0], &[1.0, 0.0]).is_err());
        assert!(fit_decay(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn power_law() {
        let x = [0.25, 0.125, 0.0625];
        let y: Vec<f64> = x.iter().map(|d: &f64| 3.0 * d.powf(1.2)).collect();
        let f = fit_power(&x, &y).unwrap();
        assert!((f.exponent - 1.2).abs() < 1e-12);
    }
}
