use serde::{Deserialize, Serialize};

use super::{
    choose_level_count, correction_variance_bound, optimal_allocation, pilot_variances, run_mlmc,
    AllocationPlan, LevelHierarchy, MlmcResult,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Observable};
use crate::pauli::StateVector;
use crate::qdrift::Readout;

/// Where the per-level variances used for allocation come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    /// Sample variances from a pilot run (discarded afterwards).
    #[default]
    Pilot,
    /// `V₀ = ‖O‖²`, `V_ℓ = c₁ 2^{−ℓ}`.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlmcSettings {
    pub t: f64,
    pub eps: f64,
    pub n0: usize,
    /// `B` in `|bias| ≤ B/N`; `2λ²t²` when absent.
    #[serde(default)]
    pub bias_constant: Option<f64>,
    /// Overrides the `L` chosen from `ε`.
    #[serde(default)]
    pub max_level: Option<usize>,
    #[serde(default = "default_pilot")]
    pub pilot: u64,
    #[serde(default)]
    pub variance_mode: VarianceMode,
    #[serde(default)]
    pub readout: Readout,
}

fn default_pilot() -> u64 {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlmcReport {
    pub max_level: usize,
    pub bias_constant: f64,
    pub variances: Vec<f64>,
    pub plan: AllocationPlan,
    pub result: MlmcResult,
}

/// Picks `L`, estimates variances, allocates samples and runs the estimator.
pub fn plan_and_run(
    h: &Hamiltonian,
    o: &Observable,
    psi0: &StateVector,
    settings: &MlmcSettings,
    seed: u64,
) -> Result<MlmcReport> {
    let lambda = h.one_norm();
    let b = settings
        .bias_constant
        .unwrap_or(2.0 * lambda * lambda * settings.t * settings.t);
    if !(b > 0.0) {
        return Err(Error::InvalidArgument(format!("bias constant must be positive, got {b}")));
    }
    let max_level = match settings.max_level {
        Some(l) => l,
        None => choose_level_count(settings.eps, b, settings.n0)?,
    };
    let hier = LevelHierarchy::new(h, settings.t, settings.n0, max_level)?;
    let variances = match settings.variance_mode {
        VarianceMode::Pilot => pilot_variances(h, o, psi0, &hier, settings.pilot, seed, settings.readout)?,
        VarianceMode::Analytic => (0..=max_level)
            .map(|l| {
                if l == 0 {
                    o.norm_bound().powi(2)
                } else {
                    correction_variance_bound(l, settings.t, lambda, settings.n0)
                }
            })
            .collect(),
    };
    let plan = optimal_allocation(&variances, &hier.costs(), settings.eps)?;
    let result = run_mlmc(h, o, psi0, &hier, &plan.n_per_level, seed, settings.readout)?;
    log::info!(
        "mlmc: L={max_level}, estimate={:.6}, total gates={}",
        result.estimate,
        result.total_gates
    );
    Ok(MlmcReport {
        max_level,
        bias_constant: b,
        variances,
        plan,
        result,
    })
}
