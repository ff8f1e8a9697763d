//! Reference experiments on a small spin chain.
//!
//! * [`fig1`]: exact-channel Bernoulli statistics per level and their decay
//!   rates.
//! * [`fig2`]: sampled augmented-state shot noise per level.
//! * [`fig3`]: modelled gate counts of standard qDRIFT and MLMC over a
//!   precision grid, with the crossover and speedups.

mod config;
pub mod fig1;
pub mod fig2;
pub mod fig3;
mod output;

pub use config::{
    CostConvention, ExperimentConfig, Fig1Config, Fig2Config, Fig3Config, HamiltonianSpec,
    MlmcRunConfig, Problem, QDriftRunConfig,
};
pub use output::{write_csv, write_json, Summary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: Vec<(f64, f64)>,
    pub label: String,
}

impl FitResult {
    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn slope_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} point(s)", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite data".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(FitResult {
        slope,
        intercept: my - slope * mx,
        points_used: xs.iter().copied().zip(ys.iter().copied()).collect(),
        label: String::new(),
    })
}

/// Outcome statistics of `±1` measurements with `P(+1) = p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliStats {
    pub var_fine: f64,
    pub mean_fine: f64,
    pub var_diff: f64,
    pub mean_diff: f64,
}

/// Fine-level variance and `|mean|`, and the same for the difference of a
/// maximally coupled fine/coarse pair, which disagrees with probability
/// `Δ = |p_f − p_c|`.
pub fn bernoulli_stats(p_fine: f64, p_coarse: f64) -> Result<BernoulliStats> {
    for p in [p_fine, p_coarse] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
        }
    }
    let delta = (p_fine - p_coarse).abs();
    Ok(BernoulliStats {
        var_fine: 4.0 * p_fine * (1.0 - p_fine),
        mean_fine: (2.0 * p_fine - 1.0).abs(),
        var_diff: 4.0 * delta * (1.0 - delta),
        mean_diff: 2.0 * delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let f = slope_fit(&xs, &ys).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14 && (f.intercept - 1.0).abs() < 1e-14);
        assert_eq!(slope_fit(&xs, &[3.0; 4]).unwrap().slope, 0.0);
    }

    #[test]
    fn degenerate_fits() {
        assert!(matches!(slope_fit(&[1.0], &[1.0]), Err(Error::DegenerateFit(_))));
        assert!(matches!(slope_fit(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::DegenerateFit(_))));
        assert!(slope_fit(&[1.0, 2.0], &[f64::NEG_INFINITY, 2.0]).is_err());
    }

    #[test]
    fn bernoulli_corner_cases() {
        let s = bernoulli_stats(0.5, 0.5).unwrap();
        assert_eq!((s.var_fine, s.mean_fine, s.var_diff, s.mean_diff), (1.0, 0.0, 0.0, 0.0));
        let s = bernoulli_stats(1.0, 0.0).unwrap();
        assert_eq!((s.var_fine, s.mean_fine, s.var_diff, s.mean_diff), (0.0, 1.0, 0.0, 2.0));
        assert!((bernoulli_stats(0.7512, 0.7).unwrap().var_fine - 0.748).abs() < 1e-3);
        assert!(bernoulli_stats(1.1, 0.5).is_err());
        assert!(bernoulli_stats(0.5, -0.1).is_err());
    }
}
