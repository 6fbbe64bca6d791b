//! Post-processing of scan tables: log–log power-law fits and zero-crossing
//! detection.

use anyhow::{bail, Result};

/// Least-squares slope of ln|value| against ln r with its standard error.
///
/// Refuses columns that change sign inside the window (oscillating data has
/// no power law) or contain zeros.
pub fn fit_slope(r: &[f64], value: &[f64], window: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = window;
    let pairs: Vec<(f64, f64)> = r
        .iter()
        .zip(value)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(x, y)| (*x, *y))
        .collect();
    if pairs.len() < 5 {
        bail!("need at least 5 points in the window, got {}", pairs.len());
    }
    if pairs.iter().any(|(_, y)| *y == 0.0 || !y.is_finite()) {
        bail!("column contains zeros or non-finite entries inside the window");
    }
    let first_sign = pairs[0].1.signum();
    if pairs.iter().any(|(_, y)| y.signum() != first_sign) {
        bail!("column changes sign inside the window; oscillating data cannot be slope-fit");
    }

    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|(_, y)| y.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        bail!("window degenerate: all radii equal");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let resid = y - (intercept + slope * x);
            resid * resid
        })
        .sum();
    let stderr = if pairs.len() > 2 { (ss_res / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok((slope, stderr))
}

/// Zero crossings of a sampled column.
#[derive(Debug, Clone)]
pub struct Oscillation {
    /// Linearly interpolated crossing positions.
    pub crossings: Vec<f64>,
    /// Mean distance between consecutive crossings.
    pub mean_spacing: f64,
    pub spacing_std: f64,
    /// One oscillation period = two consecutive crossings.
    pub period: f64,
}

/// Detect sign changes; fewer than two crossings is a none-detected result,
/// not an error.
pub fn detect_oscillation(r: &[f64], value: &[f64]) -> Option<Oscillation> {
    let mut crossings = Vec::new();
    for i in 1..r.len() {
        let (v0, v1) = (value[i - 1], value[i]);
        if v0.is_finite() && v1.is_finite() && v0 * v1 < 0.0 {
            crossings.push(r[i - 1] + (r[i] - r[i - 1]) * v0 / (v0 - v1));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    let spacings: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    let n = spacings.len() as f64;
    let mean = spacings.iter().sum::<f64>() / n;
    let var = spacings.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    Some(Oscillation {
        crossings,
        mean_spacing: mean,
        spacing_std: var.sqrt(),
        period: 2.0 * mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn exact_power_laws() {
        let r = grid(1e-3, 1e-1, 30);
        let v6: Vec<f64> = r.iter().map(|x| -3.0 / x.powi(6)).collect();
        let (slope, stderr) = fit_slope(&r, &v6, (0.0, 1.0)).unwrap();
        assert!((slope + 6.0).abs() < 1e-9, "slope {slope}");
        assert!(stderr < 1e-9);

        let v7: Vec<f64> = r.iter().map(|x| 2.0 / x.powi(7)).collect();
        let (slope, _) = fit_slope(&r, &v7, (0.0, 1.0)).unwrap();
        assert!((slope + 7.0).abs() < 1e-9);
    }

    #[test]
    fn refusals() {
        let r = grid(1.0, 10.0, 20);
        let osc: Vec<f64> = r.iter().map(|x| (2.0 * x).cos() / x).collect();
        let err = fit_slope(&r, &osc, (1.0, 10.0)).unwrap_err().to_string();
        assert!(err.contains("changes sign"), "got: {err}");

        let few = fit_slope(&r[..3], &osc[..3], (0.0, 100.0)).unwrap_err().to_string();
        assert!(few.contains("at least 5"));
    }

    #[test]
    fn cosine_crossings() {
        // cos(2kr)/r² with k = 1: consecutive crossings π/2 apart, period π.
        let r: Vec<f64> = (0..4000).map(|i| 1.0 + 30.0 * i as f64 / 3999.0).collect();
        let v: Vec<f64> = r.iter().map(|x| (2.0 * x).cos() / (x * x)).collect();
        let osc = detect_oscillation(&r, &v).unwrap();
        assert!((osc.mean_spacing - PI / 2.0).abs() < 1e-4, "spacing {}", osc.mean_spacing);
        assert!((osc.period - PI).abs() < 2e-4);
        assert!(osc.spacing_std < 1e-3);
    }

    #[test]
    fn monotone_data_detects_nothing() {
        let r = grid(1.0, 10.0, 50);
        let v: Vec<f64> = r.iter().map(|x| -1.0 / x).collect();
        assert!(detect_oscillation(&r, &v).is_none());
    }
}
