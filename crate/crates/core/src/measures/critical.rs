use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::BallStats;

/// Least-squares slope of `ln N_R` against `R`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalExponentEstimate {
    pub estimate: f64,
    pub window: (usize, usize),
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
    /// The exact value, when the model family has one.
    pub analytic: Option<f64>,
}

/// Fits the growth rate of cumulative ball sizes over `R ∈ [max(2, R/2), R]`.
pub fn critical_exponent(
    stats: &BallStats,
    analytic: Option<f64>,
) -> Result<CriticalExponentEstimate> {
    let r = stats.radius;
    if r < 4 {
        return Err(Error::InvalidArgument(format!(
            "critical exponent fit needs R ≥ 4, got {r}"
        )));
    }
    let lo = (r / 2).max(2);
    let xs: Vec<f64> = (lo..=r).map(|x| x as f64).collect();
    let ys: Vec<f64> = (lo..=r)
        .map(|x| (stats.cumulative[x] as f64).ln())
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(CriticalExponentEstimate {
        estimate: slope,
        window: (lo, r),
        residual: (rss / n).sqrt(),
        analytic,
    })
}
