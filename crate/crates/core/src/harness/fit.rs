use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// What the fitted slope is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitAxis {
    /// `ln(error / (ln m)^κ)` against `ln m`.
    LogM,
    /// `log2(error / n^κ)` against the level `n`.
    Level,
}

/// Least-squares slope with a leave-one-out band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub axis: FitAxis,
    pub slope: f64,
    pub intercept: f64,
    /// Fixed power divided out before fitting.
    pub kappa: f64,
    /// Root mean square of the fit residuals.
    pub residual: f64,
    /// Smallest and largest slope over the leave-one-out refits.
    pub band: [f64; 2],
    /// `(x, error)` pairs as given.
    pub rows: Vec<[f64; 2]>,
}

impl RateFit {
    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.slope >= lo && self.slope <= hi
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 1e-300) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn fit(axis: FitAxis, kappa: f64, rows: &[[f64; 2]], xs: Vec<f64>, ys: Vec<f64>) -> Result<RateFit> {
    if rows.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 rows, got {}", rows.len())));
    }
    let (slope, intercept) =
        least_squares(&xs, &ys).ok_or_else(|| Error::DegenerateFit("all rows share one abscissa".into()))?;
    let residual =
        (xs.iter().zip(&ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
    let mut band = [slope, slope];
    for skip in 0..xs.len() {
        let (x1, y1): (Vec<f64>, Vec<f64>) = xs
            .iter()
            .zip(&ys)
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, (x, y))| (*x, *y))
            .unzip();
        if let Some((s, _)) = least_squares(&x1, &y1) {
            band[0] = band[0].min(s);
            band[1] = band[1].max(s);
        }
    }
    Ok(RateFit {
        axis,
        slope,
        intercept,
        kappa,
        residual,
        band,
        rows: rows.to_vec(),
    })
}

fn check_errors(rows: &[[f64; 2]]) -> Result<()> {
    if let Some(r) = rows.iter().find(|r| !(r[1] > 0.0 && r[1].is_finite())) {
        return Err(Error::DegenerateFit(format!("error {} is not positive and finite", r[1])));
    }
    Ok(())
}

/// Fits `ln(e / (ln m)^κ) = ρ̂ ln m + c` over `(m, e)` rows.
pub fn fit_rate(rows: &[[f64; 2]], kappa: f64) -> Result<RateFit> {
    check_errors(rows)?;
    if let Some(r) = rows.iter().find(|r| !(r[0] > 1.0 && r[0].is_finite())) {
        return Err(Error::DegenerateFit(format!("term count {} must exceed 1", r[0])));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r[0].ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r[1].ln() - kappa * r[0].ln().ln()).collect();
    fit(FitAxis::LogM, kappa, rows, xs, ys)
}

/// Fits `log2(e / n^κ) = ρ̂ n + c` over `(n, e)` rows; used where decay is
/// stated per dyadic level.
pub fn fit_level(rows: &[[f64; 2]], kappa: f64) -> Result<RateFit> {
    check_errors(rows)?;
    if let Some(r) = rows.iter().find(|r| !(r[0] >= 1.0 && r[0].is_finite())) {
        return Err(Error::DegenerateFit(format!("level {} must be at least 1", r[0])));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r[1].log2() - kappa * r[0].log2()).collect();
    fit(FitAxis::Level, kappa, rows, xs, ys)
}
