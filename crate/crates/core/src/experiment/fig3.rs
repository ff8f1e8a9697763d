//! Modelled gate counts of standard qDRIFT and MLMC.
//!
//! Inputs are the exact-channel level probabilities from [`super::fig1`].
//! The bias constant comes from `|p_ℓ − p_∞| ≈ c_p/N_ℓ` with `B = 2c_p`,
//! the MLMC variances are the maximally-coupled Bernoulli ones, and the
//! standard-qDRIFT variance is `4p(1−p)` at the extrapolated `p_{N_L}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fig1::Fig1Result;
use super::{slope_fit, write_csv, CostConvention, Fig3Config, FitResult, Summary};
use crate::error::{Error, Result};
use crate::mlmc::{self, roots, ComplexityModel, CrossoverReport};
use crate::qdrift;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Row {
    pub eps: f64,
    #[serde(rename = "L")]
    pub levels: usize,
    pub std_gates: u64,
    pub mlmc_gates: f64,
    pub speedup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupPoint {
    pub eps: f64,
    pub levels: usize,
    pub std_gates: u64,
    pub mlmc_gates: f64,
    /// `Σ n_ℓ C_ℓ` after rounding the optimal allocation up.
    pub mlmc_gates_allocated: u128,
    pub speedup: f64,
    pub sigma2: f64,
}

/// The cost model distilled from the level probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateCostModel {
    pub n0: usize,
    pub c_p: f64,
    pub p_inf: f64,
    /// `+1` if the finest `p_ℓ` lies above `p_∞`, else `−1`.
    pub approach_sign: f64,
    pub bias_constant: f64,
    /// `V₀, V₁, …` at the measured levels.
    pub measured_variances: Vec<f64>,
    pub convention: CostConvention,
}

impl GateCostModel {
    pub fn levels(&self, eps: f64) -> Result<usize> {
        mlmc::choose_level_count(eps, self.bias_constant, self.n0)
    }

    /// `V_0..=V_L`. Past the finest measured level the variance halves per
    /// level, starting from the finest measured value.
    pub fn variances(&self, max_level: usize) -> Vec<f64> {
        let m = &self.measured_variances;
        let last = m.len() - 1;
        (0..=max_level)
            .map(|l| {
                if l <= last {
                    m[l]
                } else {
                    m[last] * 0.5f64.powi((l - last) as i32)
                }
            })
            .collect()
    }

    pub fn costs(&self, max_level: usize) -> Vec<u64> {
        (0..=max_level)
            .map(|l| {
                let n = (self.n0 as u64) << l;
                match self.convention {
                    CostConvention::FineOnly => n,
                    CostConvention::Coupled if l == 0 => n,
                    CostConvention::Coupled => n + n / 2,
                }
            })
            .collect()
    }

    /// `4p(1−p)` at `p_{N_L} = p_∞ ± c_p/N_L`.
    pub fn sigma2(&self, max_level: usize) -> f64 {
        let n_l = (self.n0 << max_level) as f64;
        let p = (self.p_inf + self.approach_sign * self.c_p / n_l).clamp(0.0, 1.0);
        4.0 * p * (1.0 - p)
    }

    pub fn evaluate(&self, eps: f64) -> Result<SpeedupPoint> {
        let l = self.levels(eps)?;
        let v = self.variances(l);
        let c = self.costs(l);
        let mlmc_gates = mlmc::mlmc_cost(&v, &c, eps)?;
        let plan = mlmc::optimal_allocation(&v, &c, eps)?;
        let sigma2 = self.sigma2(l);
        let std = qdrift::std_cost(eps, self.bias_constant, sigma2)?;
        let std_gates = u64::try_from(std.total_gates)
            .map_err(|_| Error::InvalidArgument(format!("standard cost overflows at ε = {eps}")))?;
        Ok(SpeedupPoint {
            eps,
            levels: l,
            std_gates,
            mlmc_gates,
            mlmc_gates_allocated: plan.predicted_total_gates,
            speedup: std_gates as f64 / mlmc_gates,
            sigma2,
        })
    }

    /// Largest `ε` on the grid at which MLMC becomes cheaper, refined by
    /// bisection in `log ε`.
    pub fn crossover(&self, grid: &[f64]) -> Option<f64> {
        let mut xs: Vec<f64> = grid.iter().map(|e| e.ln()).collect();
        xs.sort_by(|a, b| b.total_cmp(a));
        let gap = |x: f64| match self.evaluate(x.exp()) {
            Ok(p) => p.speedup.ln(),
            Err(_) => f64::NAN,
        };
        roots::first_crossing(gap, &xs, 1e-12).map(f64::exp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3Result {
    pub rows: Vec<Fig3Row>,
    pub model: GateCostModel,
    /// Intercept-only fit of `log₂|p_ℓ − p_∞|` against `−log₂ N_ℓ`.
    pub c_p_fit: FitResult,
    /// Same points with a free slope.
    pub c_p_free_fit: FitResult,
    pub eps_star: Option<f64>,
    pub speedups: Vec<SpeedupPoint>,
    /// Crossover of the worst-case analytic model, for comparison.
    pub analytic_crossover: Option<CrossoverReport>,
}

impl Fig3Result {
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_csv(&dir.join("fig3.csv"), &self.rows)
    }

    pub fn summarize(&self, s: &mut Summary) {
        s.c_p = Some(self.model.c_p);
        s.eps_star = self.eps_star;
        let at = self.eps_star.unwrap_or(self.rows.last().map(|r| r.eps).unwrap_or(f64::NAN));
        s.sigma2 = self.model.levels(at).ok().map(|l| self.model.sigma2(l));
        s.fits.push(self.c_p_fit.clone());
        s.fits.push(self.c_p_free_fit.clone());
        s.note("bias_constant", self.model.bias_constant);
        s.note("cost_convention", self.model.convention);
        s.note("speedups", &self.speedups);
        s.note("analytic_crossover", self.analytic_crossover);
        s.notes.push(
            "sigma2 is 4p(1-p) at the extrapolated p_{N_L} for the L chosen at eps_star".into(),
        );
    }
}

/// `c_p` from the levels `fit_min_level..`, slope fixed to `−1`.
pub fn fit_bias_constant(fig1: &Fig1Result, fit_min_level: usize) -> Result<(f64, FitResult, FitResult)> {
    let pts: Vec<(f64, f64)> = fig1
        .rows
        .iter()
        .skip(fit_min_level)
        .map(|r| ((r.gates as f64).log2(), (r.p - fig1.p_inf).abs().log2()))
        .filter(|(_, y)| y.is_finite())
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "{} usable level(s) for the bias fit",
            pts.len()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let log_cp = pts.iter().map(|(x, y)| y + x).sum::<f64>() / pts.len() as f64;
    let fixed = FitResult {
        slope: -1.0,
        intercept: log_cp,
        points_used: pts.clone(),
        label: "log2 |p - p_inf| vs log2 N (slope fixed to -1)".into(),
    };
    let free = slope_fit(&xs, &ys)?.labelled("log2 |p - p_inf| vs log2 N (free slope)");
    Ok((2f64.powf(log_cp), fixed, free))
}

pub fn fig3_gate_complexity(fig1: &Fig1Result, cfg: &Fig3Config, t: f64, lambda: f64) -> Result<Fig3Result> {
    let (c_p, c_p_fit, c_p_free_fit) = fit_bias_constant(fig1, cfg.fit_min_level)?;
    let last = fig1.rows.last().expect("fig1 has rows");
    let mut measured = vec![fig1.rows[0].var_fine];
    measured.extend(fig1.rows.iter().skip(1).map(|r| r.var_diff));
    let model = GateCostModel {
        n0: fig1.n0,
        c_p,
        p_inf: fig1.p_inf,
        approach_sign: if last.p >= fig1.p_inf { 1.0 } else { -1.0 },
        bias_constant: 2.0 * c_p,
        measured_variances: measured,
        convention: cfg.cost_convention,
    };
    let grid = cfg.eps_grid();
    let rows = grid
        .iter()
        .map(|&eps| {
            let p = model.evaluate(eps)?;
            Ok(Fig3Row {
                eps,
                levels: p.levels,
                std_gates: p.std_gates,
                mlmc_gates: p.mlmc_gates,
                speedup: p.speedup,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eps_star = model.crossover(&grid);
    let speedups = cfg
        .speedup_eps
        .iter()
        .map(|&e| model.evaluate(e))
        .collect::<Result<Vec<_>>>()?;

    // Worst-case comparison model: same B and σ², A = 8t²λ².
    let analytic = ComplexityModel {
        bias_constant: model.bias_constant,
        ..ComplexityModel::analytic(
            t,
            lambda,
            fig1.n0,
            4.0 * fig1.p_inf * (1.0 - fig1.p_inf),
            model.measured_variances[0],
        )
    };
    let analytic_crossover = mlmc::crossover_solve(&analytic).ok();

    if let Some(e) = eps_star {
        log::info!("fig3: c_p = {c_p:.4}, crossover at ε* = {e:.4e}");
    } else {
        log::warn!("fig3: costs do not cross on the ε grid");
    }
    Ok(Fig3Result {
        rows,
        model,
        c_p_fit,
        c_p_free_fit,
        eps_star,
        speedups,
        analytic_crossover,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::fig1::from_probabilities;

    fn synthetic() -> Fig1Result {
        let p: Vec<f64> = (0..8).map(|l| 0.75 - 10.0 / (128 << l) as f64).collect();
        from_probabilities(&p, 128, 0.75, 1).unwrap()
    }

    #[test]
    fn recovers_bias_constant() {
        let (c_p, fixed, free) = fit_bias_constant(&synthetic(), 3).unwrap();
        assert!((c_p - 10.0).abs() < 1e-9);
        assert_eq!(fixed.points_used.len(), 5);
        assert!((free.slope + 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_bias_fit() {
        let f = synthetic();
        assert!(matches!(fit_bias_constant(&f, 7), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn table_is_consistent() {
        let r = fig3_gate_complexity(&synthetic(), &Fig3Config::default(), 1.0, 11.5).unwrap();
        assert_eq!(r.rows.len(), 60);
        for row in &r.rows {
            assert!((row.speedup - row.std_gates as f64 / row.mlmc_gates).abs() <= 1e-12 * row.speedup);
            let l = r.model.levels(row.eps).unwrap();
            assert_eq!(row.levels, l);
            let v = r.model.variances(l);
            let c = r.model.costs(l);
            assert_eq!(row.mlmc_gates, mlmc::mlmc_cost(&v, &c, row.eps).unwrap());
        }
        let v = r.model.variances(10);
        assert!((v[10] / v[9] - 0.5).abs() < 1e-15);
    }
}
