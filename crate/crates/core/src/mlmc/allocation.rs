use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan {
    pub eps: f64,
    pub n_per_level: Vec<u64>,
    /// `S = Σ_ℓ √(V_ℓ C_ℓ)`.
    pub giles_sum: f64,
    /// `Σ_ℓ n_ℓ C_ℓ`, exact.
    pub predicted_total_gates: u128,
}

impl AllocationPlan {
    /// `Σ_ℓ V_ℓ / n_ℓ`.
    pub fn variance(&self, variances: &[f64]) -> f64 {
        variances
            .iter()
            .zip(&self.n_per_level)
            .map(|(v, &n)| v / n as f64)
            .sum()
    }
}

/// Cost-optimal sample sizes `n_ℓ = ⌈(2/ε²)·√(V_ℓ/C_ℓ)·S⌉`, which keep
/// `Σ V_ℓ/n_ℓ ≤ ε²/2`. Levels with zero variance get one sample.
pub fn optimal_allocation(variances: &[f64], costs: &[u64], eps: f64) -> Result<AllocationPlan> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {eps}")));
    }
    if variances.len() != costs.len() || variances.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: costs.len(),
            actual: variances.len(),
        });
    }
    if let Some(v) = variances.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("variance {v} is not a finite non-negative number")));
    }
    if costs.contains(&0) {
        return Err(Error::InvalidArgument("level costs must be positive".into()));
    }
    let s = super::giles_sum(variances, costs);
    let scale = 2.0 / (eps * eps) * s;
    let mut n: Vec<u64> = variances
        .iter()
        .zip(costs)
        .map(|(&v, &c)| {
            if v == 0.0 {
                1
            } else {
                ((scale * (v / c as f64).sqrt()).ceil() as u64).max(1)
            }
        })
        .collect();
    // The ceiling guarantees the budget in exact arithmetic; absorb any
    // rounding shortfall by topping up the worst level.
    let budget = 0.5 * eps * eps;
    for _ in 0..64 {
        let total: f64 = variances.iter().zip(&n).map(|(v, &k)| v / k as f64).sum();
        if total <= budget {
            break;
        }
        let worst = (0..n.len())
            .max_by(|&a, &b| (variances[a] / n[a] as f64).total_cmp(&(variances[b] / n[b] as f64)))
            .unwrap();
        n[worst] += 1;
    }
    let predicted_total_gates = n.iter().zip(costs).map(|(&k, &c)| k as u128 * c as u128).sum();
    Ok(AllocationPlan {
        eps,
        n_per_level: n,
        giles_sum: s,
        predicted_total_gates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_levels_get_one_sample() {
        let plan = optimal_allocation(&[0.0, 0.0], &[4, 12], 0.1).unwrap();
        assert_eq!(plan.n_per_level, vec![1, 1]);
        assert_eq!(plan.predicted_total_gates, 16);
    }

    #[test]
    fn single_level_reduces_to_plain_monte_carlo() {
        let plan = optimal_allocation(&[1.0], &[10], 0.1).unwrap();
        assert_eq!(plan.n_per_level, vec![200]);
    }

    #[test]
    fn rejects_nonpositive_eps() {
        assert!(optimal_allocation(&[1.0], &[1], 0.0).is_err());
        assert!(optimal_allocation(&[1.0], &[1], -1.0).is_err());
        assert!(optimal_allocation(&[1.0, 2.0], &[1], 0.1).is_err());
    }

    #[test]
    fn meets_variance_budget() {
        let v = [0.9, 0.2, 0.1, 0.05];
        let c = [128, 384, 768, 1536];
        let plan = optimal_allocation(&v, &c, 0.01).unwrap();
        assert!(plan.variance(&v) <= 0.5e-4);
    }
}
