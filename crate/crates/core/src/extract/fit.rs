//! Linear pixel-to-value calibration from labelled axis ticks.

use serde::{Deserialize, Serialize};

use super::parse::ParsedTick;
use super::ExtractError;
use crate::number::{decimals_in, parse_number};

/// Fraction of the tick value range a tick may deviate from the fitted line.
pub const MAX_RESIDUAL_FRACTION: f64 = 0.02;

/// `value = slope * pixel + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    /// Most decimals shown by any tick label.
    pub decimals: usize,
}

impl AxisFit {
    pub fn value_at(&self, pixel: f64) -> f64 {
        self.slope * pixel + self.intercept
    }
}

/// Least-squares fit through the ticks whose labels parse as numbers.
/// Needs two numeric ticks at distinct pixels; rejects fits where a tick
/// misses the line by more than 2% of the tick value range.
pub fn fit_axis_scale(ticks: &[ParsedTick]) -> Result<AxisFit, ExtractError> {
    let mut pts: Vec<(f64, f64)> = ticks
        .iter()
        .filter_map(|t| parse_number(&t.label).map(|p| (t.pixel, p.value)))
        .collect();
    let decimals = ticks
        .iter()
        .filter(|t| parse_number(&t.label).is_some())
        .map(|t| decimals_in(&t.label))
        .max()
        .unwrap_or(0);
    // Summation order is fixed so the fit does not depend on tick order.
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let n = pts.len() as f64;
    let distinct_px = pts.windows(2).any(|w| (w[0].0 - w[1].0).abs() > 1e-9);
    if pts.len() < 2 || !distinct_px {
        return Err(ExtractError::InsufficientTicks { found: pts.len() });
    }
    let mean_p = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_p).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_p) * (p.1 - mean_v)).sum();
    let slope = sxy / sxx;
    let intercept = mean_v - slope * mean_p;
    let max_residual = pts
        .iter()
        .map(|(px, v)| (slope * px + intercept - v).abs())
        .fold(0.0, f64::max);
    let lo = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let limit = MAX_RESIDUAL_FRACTION * (hi - lo);
    if hi - lo <= 0.0 || max_residual > limit + 1e-9 {
        return Err(ExtractError::NonLinearAxis { max_residual, limit });
    }
    Ok(AxisFit {
        slope,
        intercept,
        max_residual,
        decimals,
    })
}
