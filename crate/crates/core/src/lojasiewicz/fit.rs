use serde::Serialize;

/// Power law `y ~ C * s^alpha` fitted by least squares on `(ln s, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub slope: f64,
    pub log_constant: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize)]
pub enum FitError {
    #[error("need at least {needed} scales, got {got}")]
    TooFewScales { needed: usize, got: usize },
    #[error("quantity vanishes on {zero} of {total} scales")]
    Vanishing { zero: usize, total: usize },
    #[error("fewer than two usable scales ({usable})")]
    InsufficientData { usable: usize },
}

pub const MIN_SCALES: usize = 4;

/// Ordinary least squares `y = a + b x`; returns `(b, a, r^2)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - a - b * x).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else if ss_res == 0.0 { 1.0 } else { 0.0 };
    (b, a, r2.clamp(0.0, 1.0))
}

/// Fits the exponent from `(scale, value)` pairs.
///
/// Entries with `value == None` are scales where the quantity was found to
/// vanish; more than half of those means no positive lower bound can hold.
pub fn fit_power_law(points: &[(f64, Option<f64>)]) -> Result<ExponentEstimate, FitError> {
    if points.len() < MIN_SCALES {
        return Err(FitError::TooFewScales {
            needed: MIN_SCALES,
            got: points.len(),
        });
    }
    let zero = points.iter().filter(|p| p.1.is_none()).count();
    if 2 * zero > points.len() {
        return Err(FitError::Vanishing {
            zero,
            total: points.len(),
        });
    }
    let mut pairs: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|&(s, v)| v.map(|v| (s.ln(), v.ln())))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pairs.len() < 2 {
        return Err(FitError::InsufficientData { usable: pairs.len() });
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (slope, log_constant, r_squared) = linear_fit(&xs, &ys);
    Ok(ExponentEstimate {
        slope,
        log_constant,
        r_squared,
        n_points: pairs.len(),
    })
}
