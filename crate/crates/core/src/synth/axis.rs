//! Nice-number axis ticks (1, 2 or 5 times a power of ten, at most eight ticks).

use serde::{Deserialize, Serialize};

pub const MAX_TICKS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NiceAxis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
    pub ticks: Vec<f64>,
    /// Decimal places needed to print every tick exactly.
    pub decimals: usize,
}

/// Tick value `k * mantissa * 10^exp`, computed so that decimal steps such as
/// 0.05 come out as the nearest double to the printed value.
fn tick_value(k: i64, mantissa: i64, exp: i32) -> f64 {
    let units = (k * mantissa) as f64;
    if exp >= 0 {
        units * 10f64.powi(exp)
    } else {
        units / 10f64.powi(-exp)
    }
}

/// Chooses the finest 1-2-5 step that covers `[lo, hi]` with at most
/// [`MAX_TICKS`] ticks.
pub fn nice_axis(lo: f64, hi: f64) -> NiceAxis {
    assert!(lo.is_finite() && hi.is_finite(), "axis bounds must be finite");
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
        let half = if lo == 0.0 { 0.5 } else { lo.abs() * 0.1 };
        if lo == 0.0 {
            hi = 1.0;
        } else {
            lo -= half;
            hi += half;
        }
    }
    let span = hi - lo;
    let base = span.log10().floor() as i32;
    for exp in (base - 2)..=(base + 2) {
        for mantissa in [1i64, 2, 5] {
            let step = tick_value(1, mantissa, exp);
            let kmin = (lo / step + 1e-9).floor() as i64;
            let kmax = (hi / step - 1e-9).ceil() as i64;
            let count = (kmax - kmin + 1) as usize;
            if (2..=MAX_TICKS).contains(&count) {
                let ticks: Vec<f64> = (kmin..=kmax).map(|k| tick_value(k, mantissa, exp)).collect();
                return NiceAxis {
                    min: ticks[0],
                    max: *ticks.last().unwrap(),
                    step,
                    ticks,
                    decimals: (-exp).max(0) as usize,
                };
            }
        }
    }
    unreachable!("a 1-2-5 step always fits within five decades")
}
