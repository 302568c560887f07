use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Least-squares line `log y = intercept + slope log x` with a 95% interval on the slope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    /// `(lo, hi)`; absent with only two points
    pub ci95: Option<(f64, f64)>,
    pub points: usize,
}

pub fn log_fit(x: &[f64], y: &[f64]) -> Result<LogFit> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} ordinates", x.len()),
            got: y.len().to_string(),
        });
    }
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} usable points, need 2")));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all abscissae coincide".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ci95 = if n > 2 {
        let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        let se = (rss / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0)
            .map_err(|e| Error::Degenerate(e.to_string()))?
            .inverse_cdf(0.975);
        Some((slope - t * se, slope + t * se))
    } else {
        None
    };
    Ok(LogFit {
        slope,
        intercept,
        ci95,
        points: n,
    })
}

/// Slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    log_fit(x, y).map(|f| f.slope)
}
