//! Exact-channel level statistics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{bernoulli_stats, slope_fit, write_csv, ExperimentConfig, FitResult, Problem, Summary};
use crate::error::Result;
use crate::hamiltonian::exact_evolution;
use crate::parallel;
use crate::pauli::DensityMatrix;
use crate::qdrift::channel_probability;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub level: usize,
    #[serde(rename = "N")]
    pub gates: usize,
    pub p: f64,
    pub var_fine: f64,
    pub mean_fine: f64,
    pub var_diff: f64,
    pub mean_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Result {
    pub rows: Vec<Fig1Row>,
    pub n0: usize,
    /// `+1` probability under exact evolution.
    pub p_inf: f64,
    /// `β̂ = −slope` of `log₂ var_diff` vs `ℓ`.
    pub beta_fit: FitResult,
    /// `α̂ = −slope` of `log₂ mean_diff` vs `ℓ`.
    pub alpha_fit: FitResult,
    /// Levels `ℓ ≥ 3` whose distance to `p_∞` did not shrink.
    pub non_monotone_levels: Vec<usize>,
}

impl Fig1Result {
    pub fn beta_hat(&self) -> f64 {
        -self.beta_fit.slope
    }

    pub fn alpha_hat(&self) -> f64 {
        -self.alpha_fit.slope
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.p).collect()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_csv(&dir.join("fig1.csv"), &self.rows)
    }

    pub fn summarize(&self, s: &mut Summary) {
        s.alpha_hat = Some(self.alpha_hat());
        s.beta_hat = Some(self.beta_hat());
        s.fits.push(self.beta_fit.clone());
        s.fits.push(self.alpha_fit.clone());
        s.note("p_inf", self.p_inf);
        s.note("fig1_non_monotone_levels", &self.non_monotone_levels);
        s.notes.push(
            "p_ell is the +1 probability after N_ell steps of the standard averaged qDRIFT channel; \
             the coarse marginal of the index-sharing coupling is the same channel at level ell-1"
                .into(),
        );
        s.notes.push("level-0 row of fig1.csv reports the fine statistics in the diff columns (Y_0 = P_0)".into());
    }
}

/// `+1` probability of `O` under exact evolution to time `t`.
pub fn exact_probability(problem: &Problem) -> Result<f64> {
    let psi = exact_evolution(&problem.h, problem.t, &problem.psi0)?;
    Ok(((1.0 + problem.observable.expectation(&psi)?) / 2.0).clamp(0.0, 1.0))
}

/// `p_ℓ` for `N_ℓ = N₀·2^ℓ`, `ℓ = 0..levels`, one level per task.
pub fn level_probabilities(problem: &Problem, n0: usize, levels: usize) -> Result<Vec<f64>> {
    let rho0 = DensityMatrix::from_pure(&problem.psi0);
    parallel::map_indexed(levels, |l| {
        channel_probability(&problem.h, &problem.observable, &rho0, n0 << l, problem.t)
    })
    .into_iter()
    .collect()
}

/// Builds the table and fits from precomputed probabilities.
pub fn from_probabilities(p: &[f64], n0: usize, p_inf: f64, fit_min_level: usize) -> Result<Fig1Result> {
    let mut rows = Vec::with_capacity(p.len());
    for (l, &pl) in p.iter().enumerate() {
        let fine = bernoulli_stats(pl, pl)?;
        let (var_diff, mean_diff) = if l == 0 {
            (fine.var_fine, fine.mean_fine)
        } else {
            let s = bernoulli_stats(pl, p[l - 1])?;
            (s.var_diff, s.mean_diff)
        };
        rows.push(Fig1Row {
            level: l,
            gates: n0 << l,
            p: pl,
            var_fine: fine.var_fine,
            mean_fine: fine.mean_fine,
            var_diff,
            mean_diff,
        });
    }
    let fit_rows = &rows[fit_min_level.min(rows.len())..];
    let xs: Vec<f64> = fit_rows.iter().map(|r| r.level as f64).collect();
    let log2 = |v: f64| v.log2();
    let beta_fit = slope_fit(&xs, &fit_rows.iter().map(|r| log2(r.var_diff)).collect::<Vec<_>>())?
        .labelled("log2 var_diff vs level");
    let alpha_fit = slope_fit(&xs, &fit_rows.iter().map(|r| log2(r.mean_diff)).collect::<Vec<_>>())?
        .labelled("log2 mean_diff vs level");

    let non_monotone_levels: Vec<usize> = (3..p.len())
        .filter(|&l| (p[l] - p_inf).abs() > (p[l - 1] - p_inf).abs())
        .collect();
    for l in &non_monotone_levels {
        log::warn!("fig1: p at level {l} moved away from p_inf");
    }
    Ok(Fig1Result {
        rows,
        n0,
        p_inf,
        beta_fit,
        alpha_fit,
        non_monotone_levels,
    })
}

pub fn fig1_variance_mean_decay(cfg: &ExperimentConfig) -> Result<Fig1Result> {
    let problem = cfg.problem()?;
    let p_inf = exact_probability(&problem)?;
    let p = level_probabilities(&problem, cfg.n0, cfg.fig1.levels)?;
    log::info!("fig1: p = {p:?}, p_inf = {p_inf}");
    from_probabilities(&p, cfg.n0, p_inf, cfg.fig1.fit_min_level)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_probabilities_give_unit_rates() {
        // p_ℓ = p∞ − c/N_ℓ ⇒ Δ_ℓ = c/N_ℓ, both rates 1 up to the Δ² term.
        let p: Vec<f64> = (0..8).map(|l| 0.75 - 10.0 / (128 << l) as f64).collect();
        let r = from_probabilities(&p, 128, 0.75, 1).unwrap();
        assert!((r.alpha_hat() - 1.0).abs() < 1e-12);
        assert!((r.beta_hat() - 1.0).abs() < 0.03);
        assert!(r.non_monotone_levels.is_empty());
        assert_eq!(r.rows[7].gates, 16384);
        assert_eq!(r.rows[0].var_diff, r.rows[0].var_fine);
    }
}
