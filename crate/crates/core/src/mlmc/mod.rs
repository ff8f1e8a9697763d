//! Index-sharing multilevel Monte Carlo over qDRIFT circuits.
//!
//! Level `ℓ` runs circuits of `N_ℓ = N₀·2^ℓ` gates with step `τ_ℓ = λt/N_ℓ`.
//! A correction sample at `ℓ ≥ 1` draws one sequence of `N_ℓ` indices; the
//! fine path applies all of them at `τ_ℓ`, the coarse path applies only the
//! odd-position ones at `2τ_ℓ`. The coarse subsequence is itself an i.i.d.
//! draw of length `N_{ℓ−1}`, so the telescoping sum stays unbiased.

mod allocation;
mod coupled;
mod cost;
mod driver;
mod hierarchy;
pub mod roots;

pub use allocation::{optimal_allocation, AllocationPlan};
pub use coupled::{
    coupled_pair_states, coupled_sample, level_samples, pilot_variances, run_mlmc,
    CoupledSample, LevelStats, MlmcResult,
};
pub use cost::{
    choose_level_count, correction_variance_bound, crossover_solve, giles_sum, mlmc_cost,
    per_level_cost_bound, theorem_cost_bound, ComplexityModel, CrossoverRegime,
    CrossoverReport,
};
pub use driver::{plan_and_run, MlmcReport, MlmcSettings, VarianceMode};
pub use hierarchy::LevelHierarchy;
