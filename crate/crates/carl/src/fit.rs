//! Power-law exponent fitting in log–log space.

use serde::{Deserialize, Serialize};

use crate::error::{CarlError, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitResult {
    /// Fitted exponent (slope in log–log space).
    pub exponent: f64,
    /// Prefactor A of y = A·x^exponent.
    pub prefactor: f64,
    /// Coefficient of determination of the log–log regression.
    pub r_squared: f64,
    /// (min, max) of the x values actually used.
    pub range: (f64, f64),
}

/// Least-squares line through (ln x, ln y). An optional range restricts the
/// fit to x ∈ [lo, hi]. Requires at least three strictly positive points.
pub fn fit_power_law(xs: &[f64], ys: &[f64], range: Option<(f64, f64)>) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(CarlError::FitDomain("xs and ys lengths differ".into()));
    }
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if let Some((lo, hi)) = range {
            if x < lo || x > hi {
                continue;
            }
        }
        if !(x > 0.0) || !(y > 0.0) {
            return Err(CarlError::FitDomain(format!(
                "non-positive data point ({x:e}, {y:e}) inside fit range"
            )));
        }
        pts.push((x.ln(), y.ln()));
    }
    if pts.len() < 3 {
        return Err(CarlError::InsufficientPoints { have: pts.len() });
    }

    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let mx = sx / n;
    let my = sy / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(CarlError::FitDomain("all x values identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };

    let xmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).exp();
    let xmax = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp();

    Ok(FitResult {
        exponent: slope,
        prefactor: intercept.exp(),
        r_squared,
        range: (xmin, xmax),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn exact_square_law() {
        let xs: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let fit = fit_power_law(&xs, &ys, None).unwrap();
        assert_relative_eq!(fit.exponent, 2.0, max_relative = 1e-12);
        assert_relative_eq!(fit.prefactor, 1.0, max_relative = 1e-10);
        assert_relative_eq!(fit.r_squared, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn noisy_four_thirds() {
        // y = 7·x^(4/3) with 1% multiplicative noise
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let xs: Vec<f64> = (0..30).map(|i| 10.0f64.powf(i as f64 / 29.0)).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 7.0 * x.powf(4.0 / 3.0) * (1.0 + noise.sample(&mut rng)))
            .collect();
        let fit = fit_power_law(&xs, &ys, None).unwrap();
        assert!((fit.exponent - 4.0 / 3.0).abs() < 0.05, "exponent {}", fit.exponent);
        assert!(fit.r_squared > 0.99);
    }

    #[test]
    fn range_restriction() {
        let xs = vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
        // square law above x = 4, flat below
        let ys: Vec<f64> = xs.iter().map(|&x| if x >= 4.0 { x * x } else { 9.0 }).collect();
        let fit = fit_power_law(&xs, &ys, Some((4.0, 32.0))).unwrap();
        assert_relative_eq!(fit.exponent, 2.0, max_relative = 1e-12);
        assert_eq!(fit.range, (4.0, 32.0));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            fit_power_law(&[1.0, 2.0], &[1.0, 4.0], None),
            Err(CarlError::InsufficientPoints { have: 2 })
        ));
        assert!(matches!(
            fit_power_law(&[1.0, 2.0, 3.0], &[1.0, 0.0, 9.0], None),
            Err(CarlError::FitDomain(_))
        ));
        assert!(matches!(
            fit_power_law(&[1.0, -2.0, 3.0], &[1.0, 4.0, 9.0], None),
            Err(CarlError::FitDomain(_))
        ));
    }
}
