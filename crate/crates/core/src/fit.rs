//! Least-squares line fits for error-exponent estimation.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LineFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }

    /// Root-mean-square residual over the given points.
    pub fn rms_residual(&self, xs: &[f64], ys: &[f64]) -> f64 {
        let ss: f64 = xs.iter().zip(ys).map(|(&x, &y)| (y - self.eval(x)).powi(2)).sum();
        (ss / xs.len() as f64).sqrt()
    }
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    assert_eq!(xs.len(), ys.len());
    let count = xs.len();
    if count < 2 {
        return Err(Error::TooFewPoints(count));
    }
    let nf = count as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewPoints(1));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: my - slope * mx,
    })
}
