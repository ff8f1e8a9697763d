//! Sampled augmented-state shot noise per level.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{slope_fit, write_csv, ExperimentConfig, FitResult, Problem, Summary};
use crate::augmented::{self, BlockObservable};
use crate::error::Result;
use crate::mlmc::LevelHierarchy;
use crate::parallel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub level: usize,
    #[serde(rename = "N")]
    pub gates: usize,
    pub tau: f64,
    pub zeta: f64,
    pub n_samples: u64,
    pub mean_var_shot: f64,
    pub stderr_var_shot: f64,
}

/// Per-level quantities that do not go into the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2LevelDiagnostics {
    pub level: usize,
    pub mean_error_norm: f64,
    /// Mean of `‖e‖/τ`.
    pub mean_error_ratio: f64,
    pub max_squared_norm: f64,
    /// Mean of the worst case `S²‖Ô‖²`.
    pub mean_worst_case_var: f64,
    pub mean_y: f64,
    pub var_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Result {
    pub rows: Vec<Fig2Row>,
    /// `β̂_shot = −slope` of `log₂ mean_var_shot` vs `ℓ`.
    pub shot_fit: FitResult,
    /// Absent when some level has `‖e‖ = 0` throughout.
    pub error_norm_fit: Option<FitResult>,
    pub levels: Vec<Fig2LevelDiagnostics>,
}

impl Fig2Result {
    pub fn beta_shot_hat(&self) -> f64 {
        -self.shot_fit.slope
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_csv(&dir.join("fig2.csv"), &self.rows)
    }

    pub fn summarize(&self, s: &mut Summary) {
        s.beta_shot_hat = Some(self.beta_shot_hat());
        s.fits.push(self.shot_fit.clone());
        s.fits.extend(self.error_norm_fit.clone());
        s.note("fig2_levels", &self.levels);
    }
}

pub fn run_fig2(problem: &Problem, n0: usize, cfg: &super::Fig2Config, seed: u64) -> Result<Fig2Result> {
    let hier = LevelHierarchy::new(&problem.h, problem.t, n0, cfg.max_level)?;
    let schedule = cfg.schedule();
    let mut rows = Vec::new();
    let mut levels = Vec::new();
    for (level, &n) in (cfg.min_level..=cfg.max_level).zip(&schedule) {
        let samples = augmented::sample_level(
            &problem.h,
            &problem.observable,
            &problem.psi0,
            &hier,
            level,
            n,
            seed,
            cfg.zeta_scale,
        )?;
        let tau = hier.tau(level);
        let zeta = augmented::zeta(level, &hier, cfg.zeta_scale);
        let vs: Vec<f64> = samples.iter().map(|s| s.var_shot).collect();
        let (mean, var) = parallel::mean_and_variance(&vs);
        let norms: Vec<f64> = samples.iter().map(|s| s.error_norm).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.y).collect();
        let (mean_y, var_y) = parallel::mean_and_variance(&ys);
        let block_norm = BlockObservable::new(problem.observable.clone(), zeta).norm();
        let worst: Vec<f64> = samples
            .iter()
            .map(|s| (s.squared_norm * block_norm).powi(2))
            .collect();
        let mean_error_norm = parallel::mean_and_variance(&norms).0;
        rows.push(Fig2Row {
            level,
            gates: hier.gates(level),
            tau,
            zeta,
            n_samples: n,
            mean_var_shot: mean,
            stderr_var_shot: (var / n as f64).sqrt(),
        });
        levels.push(Fig2LevelDiagnostics {
            level,
            mean_error_norm,
            mean_error_ratio: mean_error_norm / tau,
            max_squared_norm: samples.iter().map(|s| s.squared_norm).fold(1.0, f64::max),
            mean_worst_case_var: parallel::mean_and_variance(&worst).0,
            mean_y,
            var_y,
        });
        log::info!("fig2: level {level}, n = {n}, mean Var_shot = {mean:.4e}");
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.level as f64).collect();
    let shot_fit = slope_fit(&xs, &rows.iter().map(|r| r.mean_var_shot.log2()).collect::<Vec<_>>())?
        .labelled("log2 mean_var_shot vs level");
    let error_norm_fit = slope_fit(&xs, &levels.iter().map(|d| d.mean_error_norm.log2()).collect::<Vec<_>>())
        .ok()
        .map(|f| f.labelled("log2 mean ||e|| vs level"));
    Ok(Fig2Result {
        rows,
        shot_fit,
        error_norm_fit,
        levels,
    })
}

pub fn fig2_shot_noise(cfg: &ExperimentConfig, seed: u64) -> Result<Fig2Result> {
    run_fig2(&cfg.problem()?, cfg.n0, &cfg.fig2, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::Fig2Config;
    use crate::hamiltonian::{Hamiltonian, Observable};
    use crate::pauli::StateVector;

    #[test]
    fn single_term_gives_tau_exactly() {
        let problem = Problem {
            h: Hamiltonian::from_pairs([(0.9, "XY")]).unwrap(),
            psi0: StateVector::zero_state(2),
            observable: Observable::z(2, 0).unwrap(),
            t: 1.0,
        };
        let cfg = Fig2Config {
            samples: vec![5, 5, 5],
            max_level: 3,
            ..Fig2Config::default()
        };
        let r = run_fig2(&problem, 4, &cfg, 1).unwrap();
        for row in &r.rows {
            assert!((row.mean_var_shot - row.tau).abs() < 1e-12);
        }
        assert!((r.beta_shot_hat() - 1.0).abs() < 1e-10);
    }
}
