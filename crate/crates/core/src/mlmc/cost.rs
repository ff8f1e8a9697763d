use serde::{Deserialize, Serialize};

use super::roots;
use crate::error::{Error, Result};
use crate::qdrift;

/// `S = Σ_ℓ √(V_ℓ C_ℓ)`.
pub fn giles_sum(variances: &[f64], costs: &[u64]) -> f64 {
    variances
        .iter()
        .zip(costs)
        .map(|(&v, &c)| (v.max(0.0) * c as f64).sqrt())
        .sum()
}

/// Total MLMC cost at the optimal allocation, `2S²/ε²`.
pub fn mlmc_cost(variances: &[f64], costs: &[u64], eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    let s = giles_sum(variances, costs);
    Ok(2.0 * s * s / (eps * eps))
}

/// Upper bound on `√(V_ℓ C_ℓ)` for a correction level when `V_ℓ ≤ A/N_ℓ`
/// and `C_ℓ = 1.5 N_ℓ`: `√(3A/2)`, the same at every level.
pub fn per_level_cost_bound(variance_constant: f64) -> f64 {
    (1.5 * variance_constant).sqrt()
}

/// `V_ℓ ≤ c₁ 2^{−ℓ}` with `c₁ = 8t²λ²/N₀`.
pub fn correction_variance_bound(level: usize, t: f64, lambda: f64, n0: usize) -> f64 {
    8.0 * t * t * lambda * lambda / n0 as f64 * 0.5f64.powi(level as i32)
}

/// `C₁ ε⁻² log₂²(1/ε)` with `C₁ = 64 t²λ²`, valid for `0 < ε < 1/e`.
pub fn theorem_cost_bound(t: f64, lambda: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0) || eps >= (-1.0f64).exp() {
        return Err(Error::InvalidArgument(format!(
            "the cost bound needs 0 < ε < 1/e, got {eps}"
        )));
    }
    let log = (1.0 / eps).log2();
    Ok(64.0 * t * t * lambda * lambda * log * log / (eps * eps))
}

/// `L = max(0, ⌈log₂(√2 B/(ε N₀))⌉)`, the smallest `L` with `B/N_L ≤ ε/√2`.
pub fn choose_level_count(eps: f64, bias_constant: f64, n0: usize) -> Result<usize> {
    if !(eps > 0.0) || !(bias_constant > 0.0) || n0 == 0 {
        return Err(Error::InvalidArgument(format!(
            "need ε > 0, B > 0, N₀ ≥ 1 (got {eps}, {bias_constant}, {n0})"
        )));
    }
    let x = (std::f64::consts::SQRT_2 * bias_constant / (eps * n0 as f64)).log2().ceil();
    let mut l = if x > 0.0 { x as usize } else { 0 };
    // Guard against rounding in log₂.
    while l < 62 && bias_constant / (n0 as f64 * (1u64 << l) as f64) > eps / std::f64::consts::SQRT_2 {
        l += 1;
    }
    Ok(l)
}

/// Rate constants and prefactors of the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityModel {
    /// Bias decay `|E[P_ℓ] − E[P]| ≈ B 2^{−αℓ}`.
    pub alpha: f64,
    /// Variance decay `V_ℓ ≈ c 2^{−βℓ}`.
    pub beta: f64,
    /// Cost growth `C_ℓ ∝ 2^{γℓ}`.
    pub gamma: f64,
    /// Bias constant `B` in `|bias| ≤ B/N`.
    pub bias_constant: f64,
    /// `A` in `V_ℓ ≤ A/N_ℓ`.
    pub variance_constant: f64,
    /// Single-level sample variance.
    pub sigma2: f64,
    /// Level-0 variance.
    pub v0: f64,
    pub n0: usize,
}

impl ComplexityModel {
    /// Model from the worst-case constants: `B = 2λ²t²`, `A = 8t²λ²`.
    pub fn analytic(t: f64, lambda: f64, n0: usize, sigma2: f64, v0: f64) -> Self {
        let lt2 = lambda * lambda * t * t;
        Self {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            bias_constant: 2.0 * lt2,
            variance_constant: 8.0 * lt2,
            sigma2,
            v0,
            n0,
        }
    }

    pub fn levels(&self, eps: f64) -> Result<usize> {
        choose_level_count(eps, self.bias_constant, self.n0)
    }

    /// `2(√(V₀N₀) + L√(3A/2))²/ε²`.
    pub fn mlmc_cost(&self, eps: f64) -> Result<f64> {
        let l = self.levels(eps)? as f64;
        let s = (self.v0 * self.n0 as f64).sqrt() + l * per_level_cost_bound(self.variance_constant);
        Ok(2.0 * s * s / (eps * eps))
    }

    pub fn std_cost(&self, eps: f64) -> Result<f64> {
        Ok(qdrift::std_cost(eps, self.bias_constant, self.sigma2)?.total_gates as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverRegime {
    /// The level-0 term `√(V₀N₀)` dominates `S` at the crossover.
    OverheadDominated,
    /// The `L√(3A/2)` correction terms dominate.
    LogDominated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossoverReport {
    /// Largest `ε` below which MLMC is cheaper, if the costs cross on
    /// `[1e−8, 1]`.
    pub eps_star: Option<f64>,
    pub regime: Option<CrossoverRegime>,
    /// `√2 B σ²/(V₀N₀)`.
    pub eps_overhead: f64,
    /// `√2 B/(N₀ 2^x)` where `σ²N₀2^x = (3A/2)x²`, if that has a root.
    pub eps_log: Option<f64>,
}

/// Crossover of the modelled standard and MLMC costs.
pub fn crossover_solve(model: &ComplexityModel) -> Result<CrossoverReport> {
    let b = model.bias_constant;
    let n0 = model.n0 as f64;
    if !(model.v0 > 0.0) || !(model.sigma2 > 0.0) {
        return Err(Error::InvalidArgument("crossover needs V₀ > 0 and σ² > 0".into()));
    }
    let eps_overhead = std::f64::consts::SQRT_2 * b * model.sigma2 / (model.v0 * n0);

    let a15 = 1.5 * model.variance_constant;
    let g = |x: f64| (model.sigma2 * n0).ln() + x * std::f64::consts::LN_2 - (a15 * x * x).ln();
    // Largest root: beyond it the exponential side wins for good.
    let grid: Vec<f64> = (1..=400).rev().map(|k| k as f64 * 0.25).collect();
    let eps_log = roots::first_crossing(g, &grid, 1e-12)
        .map(|x| std::f64::consts::SQRT_2 * b / (n0 * 2f64.powf(x)));

    let log_gap = |x: f64| -> f64 {
        let eps = x.exp();
        match (model.std_cost(eps), model.mlmc_cost(eps)) {
            (Ok(s), Ok(m)) => s.ln() - m.ln(),
            _ => f64::NAN,
        }
    };
    let grid: Vec<f64> = (0..=400).map(|k| -(k as f64) * 8.0 * std::f64::consts::LN_10 / 400.0).collect();
    let eps_star = roots::first_crossing(log_gap, &grid, 1e-12).map(f64::exp);
    let regime = match eps_star {
        Some(e) => {
            let l = model.levels(e)? as f64;
            Some(if (model.v0 * n0).sqrt() >= l * per_level_cost_bound(model.variance_constant) {
                CrossoverRegime::OverheadDominated
            } else {
                CrossoverRegime::LogDominated
            })
        }
        None => None,
    };
    Ok(CrossoverReport {
        eps_star,
        regime,
        eps_overhead,
        eps_log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theorem_bound_value() {
        let c = theorem_cost_bound(1.0, 1.0, 1.0 / 16.0).unwrap();
        assert!((c - 262_144.0).abs() < 1e-6);
        assert!(theorem_cost_bound(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn level_count_meets_bias_target() {
        for &(eps, b, n0) in &[(1e-2, 21.0, 128), (1e-4, 21.0, 128), (1.0, 0.1, 128), (3e-3, 5.0, 7)] {
            let l = choose_level_count(eps, b, n0).unwrap();
            assert!(b / (n0 as f64 * 2f64.powi(l as i32)) <= eps / std::f64::consts::SQRT_2);
            if l > 0 {
                assert!(b / (n0 as f64 * 2f64.powi(l as i32 - 1)) > eps / std::f64::consts::SQRT_2);
            }
        }
        assert_eq!(choose_level_count(1.0, 0.1, 128).unwrap(), 0);
    }

    #[test]
    fn variance_bound_halves() {
        let c1 = correction_variance_bound(0, 1.0, 11.5, 128);
        assert!((c1 - 8.0 * 11.5 * 11.5 / 128.0).abs() < 1e-12);
        assert!((correction_variance_bound(3, 1.0, 11.5, 128) - c1 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn mlmc_cost_matches_formula() {
        let c = mlmc_cost(&[1.0, 0.25], &[4, 16], 0.5).unwrap();
        // S = 2 + 2
        assert!((c - 2.0 * 16.0 / 0.25).abs() < 1e-12);
    }

    #[test]
    fn crossover_brackets() {
        let m = ComplexityModel {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            bias_constant: 21.0,
            variance_constant: 0.5,
            sigma2: 0.75,
            v0: 0.87,
            n0: 128,
        };
        let r = crossover_solve(&m).unwrap();
        let e = r.eps_star.expect("costs cross");
        assert!(m.std_cost(e * 1.1).unwrap() <= m.mlmc_cost(e * 1.1).unwrap() * 1.5);
        assert!(m.std_cost(e * 0.5).unwrap() > m.mlmc_cost(e * 0.5).unwrap());
    }
}
