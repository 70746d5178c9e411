//! Power-law versus exponential model selection for decaying correlators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_BINS: usize = 6;
pub const MIN_BINS_AFTER_SHRINK: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    Power,
    Exponential,
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LineFit { slope, intercept, r2 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRecord {
    pub model: DecayModel,
    /// Power-law exponent `a` in `d^{-a}`, or decay length `ξ` in `e^{-d/ξ}`.
    pub exponent_or_length: f64,
    pub r2: f64,
    /// R² of the chosen model minus R² of the other.
    pub margin: f64,
    pub power: LineFit,
    pub exponential: LineFit,
    /// Inclusive distance window actually used.
    pub window: (usize, usize),
    pub bins: usize,
}

/// Fit `log|C|` against `log d` and against `d` over `window` and keep the
/// model with the larger R².
///
/// `values[i]` belongs to `distances[i]`. The window is cut at the first
/// non-positive value; fewer than 4 surviving bins is an error.
pub fn fit_decay(distances: &[usize], values: &[f64], window: (usize, usize)) -> Result<FitRecord> {
    if distances.len() != values.len() {
        return Err(Error::Dimension(format!("{} distances, {} values", distances.len(), values.len())));
    }
    let (lo, hi) = window;
    let inside: Vec<(usize, f64)> =
        distances.iter().zip(values).filter(|(d, _)| **d >= lo && **d <= hi).map(|(d, v)| (*d, *v)).collect();
    if inside.len() < MIN_FIT_BINS {
        return Err(Error::Fit(format!(
            "window [{lo}, {hi}] holds {} bins, need at least {MIN_FIT_BINS}",
            inside.len()
        )));
    }
    let kept: Vec<(usize, f64)> =
        inside.iter().copied().take_while(|(_, v)| *v > 0.0 && v.is_finite()).collect();
    if kept.len() < MIN_BINS_AFTER_SHRINK {
        return Err(Error::Fit(format!(
            "only {} positive bins before the first non-positive value",
            kept.len()
        )));
    }
    let d: Vec<f64> = kept.iter().map(|(d, _)| *d as f64).collect();
    let logd: Vec<f64> = d.iter().map(|x| x.ln()).collect();
    let logc: Vec<f64> = kept.iter().map(|(_, v)| v.ln()).collect();
    let power = line_fit(&logd, &logc);
    let exponential = line_fit(&d, &logc);
    let (model, r2, other, exponent_or_length) = if power.r2 >= exponential.r2 {
        (DecayModel::Power, power.r2, exponential.r2, -power.slope)
    } else {
        (DecayModel::Exponential, exponential.r2, power.r2, -1.0 / exponential.slope)
    };
    Ok(FitRecord {
        model,
        exponent_or_length,
        r2,
        margin: r2 - other,
        power,
        exponential,
        window: (kept[0].0, kept[kept.len() - 1].0),
        bins: kept.len(),
    })
}
