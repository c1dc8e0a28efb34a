//! Least-squares fits on log-log axes with a seeded bootstrap band.

use parabola_core::rng::Stream;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("log-log fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("x values must be positive and strictly increasing")]
    BadAbscissae,
    #[error("y values must be positive, got {0}")]
    NonPositive(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// 2.5% and 97.5% bootstrap quantiles of the slope.
    pub band: [f64; 2],
}

/// `(slope, intercept)` of the least-squares line through `(u, v)`, or
/// `None` when all `u` coincide.
fn least_squares(u: &[f64], v: &[f64]) -> Option<(f64, f64)> {
    let n = u.len() as f64;
    let mu = u.iter().sum::<f64>() / n;
    let mv = v.iter().sum::<f64>() / n;
    let sxx: f64 = u.iter().map(|x| (x - mu) * (x - mu)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = u.iter().zip(v).map(|(x, y)| (x - mu) * (y - mv)).sum();
    let slope = sxy / sxx;
    Some((slope, mv - slope * mu))
}

/// Fits `log y = slope · log x + intercept`. The band comes from
/// [`BOOTSTRAP_RESAMPLES`] resamples of the points drawn from `seed`;
/// resamples with a single distinct `x` are skipped.
pub fn fit_loglog(xs: &[f64], ys: &[f64], seed: u64) -> Result<LogLogFit, FitError> {
    let n = xs.len().min(ys.len());
    if n < 4 {
        return Err(FitError::TooFewPoints(n));
    }
    if xs[0] <= 0.0 || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FitError::BadAbscissae);
    }
    if let Some(&y) = ys.iter().find(|&&y| !(y > 0.0)) {
        return Err(FitError::NonPositive(y));
    }
    let u: Vec<f64> = xs[..n].iter().map(|&x| libm::log(x)).collect();
    let v: Vec<f64> = ys[..n].iter().map(|&y| libm::log(y)).collect();
    let (slope, intercept) = least_squares(&u, &v).expect("distinct abscissae");

    let mut rng = Stream::new(seed, "bootstrap");
    let mut slopes = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let (mut ru, mut rv) = (vec![0.0; n], vec![0.0; n]);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for k in 0..n {
            let i = rng.below(n as u64) as usize;
            ru[k] = u[i];
            rv[k] = v[i];
        }
        if let Some((b, _)) = least_squares(&ru, &rv) {
            slopes.push(b);
        }
    }
    slopes.sort_by(f64::total_cmp);
    let band = if slopes.is_empty() {
        [slope, slope]
    } else {
        let at = |q: f64| slopes[((slopes.len() - 1) as f64 * q).round() as usize];
        [at(0.025), at(0.975)]
    };
    Ok(LogLogFit { slope, intercept, band })
}
