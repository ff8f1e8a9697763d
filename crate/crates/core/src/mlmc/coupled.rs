use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hierarchy::LevelHierarchy;
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Observable};
use crate::parallel;
use crate::pauli::StateVector;
use crate::qdrift::{self, IndexSequence, Readout, TermSampler};
use crate::rng::{RngStream, StreamPurpose};

/// Fine and coarse readouts of one index-shared pair and their difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledSample {
    pub p_fine: f64,
    pub p_coarse: f64,
    pub y: f64,
}

/// Fine and coarse final states for a shared sequence of `N_ℓ` indices.
pub fn coupled_pair_states(
    h: &Hamiltonian,
    hier: &LevelHierarchy,
    level: usize,
    seq: &IndexSequence,
    psi0: &StateVector,
) -> Result<(StateVector, StateVector)> {
    if level == 0 {
        return Err(Error::InvalidArgument("level 0 has no coarse path".into()));
    }
    hier.check_level(level)?;
    if seq.len() != hier.gates(level) {
        return Err(Error::InvalidArgument(format!(
            "level {level} needs {} indices, got {}",
            hier.gates(level),
            seq.len()
        )));
    }
    let tau = hier.tau(level);
    let fine = qdrift::run_trajectory(h, seq, tau, psi0)?;
    let coarse = qdrift::run_trajectory(h, &seq.odd_positions(), 2.0 * tau, psi0)?;
    Ok((fine, coarse))
}

/// One correction sample `Y_ℓ = P_ℓ − P_{ℓ−1}` at `ℓ ≥ 1`, with the exact
/// pathwise readout.
pub fn coupled_sample(
    h: &Hamiltonian,
    o: &Observable,
    psi0: &StateVector,
    hier: &LevelHierarchy,
    level: usize,
    stream: &RngStream,
) -> Result<CoupledSample> {
    if level == 0 {
        return Err(Error::InvalidArgument("level 0 has no coarse path".into()));
    }
    let seq = qdrift::sample_sequence(stream, h, hier.gates(level));
    let (fine, coarse) = coupled_pair_states(h, hier, level, &seq, psi0)?;
    let p_fine = o.expectation(&fine)?;
    let p_coarse = o.expectation(&coarse)?;
    Ok(CoupledSample {
        p_fine,
        p_coarse,
        y: p_fine - p_coarse,
    })
}

fn one_sample(
    h: &Hamiltonian,
    sampler: &TermSampler,
    o: &Observable,
    psi0: &StateVector,
    hier: &LevelHierarchy,
    level: usize,
    stream: RngStream,
    readout: Readout,
) -> Result<f64> {
    let mut rng = stream.rng();
    let seq = sampler.sample_many(&mut rng, hier.gates(level));
    let tau = hier.tau(level);
    let mut fine = psi0.clone();
    qdrift::evolve_in_place(h, &seq, tau, fine.amplitudes_mut())?;
    let e_fine = o.expectation(&fine)?;
    if level == 0 {
        return Ok(match readout {
            Readout::Expectation => e_fine,
            Readout::SingleShot => qdrift::shot_outcome(e_fine, rng.random()),
        });
    }
    let coarse_seq: Vec<usize> = seq.iter().step_by(2).copied().collect();
    let mut coarse = psi0.clone();
    qdrift::evolve_in_place(h, &coarse_seq, 2.0 * tau, coarse.amplitudes_mut())?;
    let e_coarse = o.expectation(&coarse)?;
    Ok(match readout {
        Readout::Expectation => e_fine - e_coarse,
        Readout::SingleShot => {
            let u: f64 = rng.random();
            qdrift::shot_outcome(e_fine, u) - qdrift::shot_outcome(e_coarse, u)
        }
    })
}

/// `n` independent level-`ℓ` samples (`P₀` at level 0, `Y_ℓ` above), in
/// sample-index order.
pub fn level_samples(
    h: &Hamiltonian,
    o: &Observable,
    psi0: &StateVector,
    hier: &LevelHierarchy,
    level: usize,
    n: u64,
    seed: u64,
    purpose: StreamPurpose,
    readout: Readout,
) -> Result<Vec<f64>> {
    hier.check_level(level)?;
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    let sampler = TermSampler::new(h);
    parallel::map_indexed(n as usize, |i| {
        let stream = RngStream::for_sample(seed, purpose, level, i as u64);
        one_sample(h, &sampler, o, psi0, hier, level, stream, readout)
    })
    .into_iter()
    .collect()
}

/// Sample variance of each level from `n_pilot` throw-away samples.
pub fn pilot_variances(
    h: &Hamiltonian,
    o: &Observable,
    psi0: &StateVector,
    hier: &LevelHierarchy,
    n_pilot: u64,
    seed: u64,
    readout: Readout,
) -> Result<Vec<f64>> {
    if n_pilot < 2 {
        return Err(Error::InvalidArgument(format!(
            "pilot needs at least 2 samples per level, got {n_pilot}"
        )));
    }
    (0..hier.num_levels())
        .map(|l| {
            let ys = level_samples(h, o, psi0, hier, l, n_pilot, seed, StreamPurpose::Pilot, readout)?;
            Ok(parallel::mean_and_variance(&ys).1)
        })
        .collect()
}

/// Per-level summary of a production run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    pub gates: usize,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub cost_per_sample: u64,
    pub cumulative_gates: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlmcResult {
    pub estimate: f64,
    /// `Σ_ℓ V̂_ℓ / n_ℓ`.
    pub estimator_variance: f64,
    pub total_gates: u128,
    pub levels: Vec<LevelStats>,
}

impl MlmcResult {
    /// `level,N_ell,n_ell,mean_Y,var_Y,cost_per_sample,cumulative_gates`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,N_ell,n_ell,mean_Y,var_Y,cost_per_sample,cumulative_gates\n");
        for s in &self.levels {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                s.level, s.gates, s.samples, s.mean, s.variance, s.cost_per_sample, s.cumulative_gates
            ));
        }
        out
    }
}

/// Telescoping estimator `Σ_ℓ mean(Y_ℓ)` with `n_ℓ` fresh samples per level.
pub fn run_mlmc(
    h: &Hamiltonian,
    o: &Observable,
    psi0: &StateVector,
    hier: &LevelHierarchy,
    samples: &[u64],
    seed: u64,
    readout: Readout,
) -> Result<MlmcResult> {
    if samples.len() != hier.num_levels() {
        return Err(Error::DimensionMismatch {
            expected: hier.num_levels(),
            actual: samples.len(),
        });
    }
    if let Some(l) = samples.iter().position(|&n| n == 0) {
        return Err(Error::InvalidArgument(format!("level {l} has no samples")));
    }
    let mut levels = Vec::with_capacity(samples.len());
    let mut estimate = 0.0;
    let mut estimator_variance = 0.0;
    let mut cumulative: u128 = 0;
    for (l, &n) in samples.iter().enumerate() {
        let ys = level_samples(h, o, psi0, hier, l, n, seed, StreamPurpose::Production, readout)?;
        let (mean, variance) = parallel::mean_and_variance(&ys);
        estimate += mean;
        estimator_variance += variance / n as f64;
        let cost = hier.cost(l);
        cumulative += n as u128 * cost as u128;
        levels.push(LevelStats {
            level: l,
            gates: hier.gates(l),
            samples: n,
            mean,
            variance,
            cost_per_sample: cost,
            cumulative_gates: cumulative,
        });
    }
    Ok(MlmcResult {
        estimate,
        estimator_variance,
        total_gates: cumulative,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_heisenberg_xyz;

    fn setup() -> (Hamiltonian, Observable, StateVector) {
        (
            build_heisenberg_xyz(3, 1.0, 0.5, 0.8).unwrap(),
            Observable::z(3, 0).unwrap(),
            StateVector::zero_state(3),
        )
    }

    #[test]
    fn level_zero_has_no_coupling() {
        let (h, o, psi) = setup();
        let hier = LevelHierarchy::new(&h, 1.0, 4, 2).unwrap();
        assert!(coupled_sample(&h, &o, &psi, &hier, 0, &RngStream::new(1, 1)).is_err());
    }

    #[test]
    fn level_samples_match_coupled_sample() {
        let (h, o, psi) = setup();
        let hier = LevelHierarchy::new(&h, 1.0, 4, 2).unwrap();
        let ys = level_samples(&h, &o, &psi, &hier, 2, 5, 11, StreamPurpose::Production, Readout::Expectation)
            .unwrap();
        for (i, y) in ys.iter().enumerate() {
            let s = RngStream::for_sample(11, StreamPurpose::Production, 2, i as u64);
            let c = coupled_sample(&h, &o, &psi, &hier, 2, &s).unwrap();
            assert!((c.y - y).abs() < 1e-14);
        }
    }

    #[test]
    fn shot_differences_are_in_range() {
        let (h, o, psi) = setup();
        let hier = LevelHierarchy::new(&h, 1.0, 4, 1).unwrap();
        let ys = level_samples(&h, &o, &psi, &hier, 1, 200, 3, StreamPurpose::Production, Readout::SingleShot)
            .unwrap();
        assert!(ys.iter().all(|&y| y == 0.0 || y == 2.0 || y == -2.0));
    }

    #[test]
    fn cost_bookkeeping_is_exact() {
        let (h, o, psi) = setup();
        let hier = LevelHierarchy::new(&h, 1.0, 4, 2).unwrap();
        let r = run_mlmc(&h, &o, &psi, &hier, &[10, 5, 3], 7, Readout::Expectation).unwrap();
        assert_eq!(r.total_gates, 10 * 4 + 5 * 12 + 3 * 24);
        assert_eq!(r.levels.last().unwrap().cumulative_gates, r.total_gates);
        let sum: f64 = r.levels.iter().map(|s| s.mean).sum();
        assert_eq!(sum, r.estimate);
        assert!(r.to_csv().starts_with("level,N_ell,n_ell,mean_Y,var_Y,cost_per_sample,cumulative_gates\n"));
    }
}
