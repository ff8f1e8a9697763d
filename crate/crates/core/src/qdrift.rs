//! Single-level qDRIFT.
//!
//! A trajectory draws `N` term indices i.i.d. from `p_j = |h_j|/λ` and applies
//! `exp(−i sign(h_j) τ H_j)` for each, with `τ = λt/N`. Its average over all
//! sequences is the `N`-fold composition of the averaged channel
//! `𝓔(ρ) = Σ_j p_j e^{−iτH_j} ρ e^{iτH_j}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Observable};
use crate::parallel;
use crate::pauli::{self, DensityMatrix, StateVector};
use crate::rng::{RngStream, StreamPurpose};

/// Sampled term indices `(j_1, …, j_N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSequence {
    indices: Vec<usize>,
}

impl IndexSequence {
    pub fn new(indices: Vec<usize>, num_terms: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&j| j >= num_terms) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                terms: num_terms,
            });
        }
        Ok(Self { indices })
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    /// The 1st, 3rd, 5th, … entries: the coarse path of an index-shared pair.
    pub fn odd_positions(&self) -> IndexSequence {
        IndexSequence {
            indices: self.indices.iter().step_by(2).copied().collect(),
        }
    }
}

/// Evolution time, gate count and the step `τ = λt/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QDriftConfig {
    pub t: f64,
    pub gates: usize,
    pub tau: f64,
}

impl QDriftConfig {
    pub fn new(h: &Hamiltonian, t: f64, gates: usize) -> Result<Self> {
        if gates == 0 {
            return Err(Error::InvalidArgument("gate count must be at least 1".into()));
        }
        Ok(Self {
            t,
            gates,
            tau: h.one_norm() * t / gates as f64,
        })
    }
}

/// Inverse-CDF sampler over the term distribution.
#[derive(Debug, Clone)]
pub struct TermSampler {
    cumulative: Vec<f64>,
}

impl TermSampler {
    pub fn new(h: &Hamiltonian) -> Self {
        let mut acc = 0.0;
        let cumulative = h
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cumulative }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let j = self.cumulative.partition_point(|&c| c <= u);
        // u can exceed the last partial sum by rounding
        j.min(self.cumulative.len() - 1)
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// Draws `n` i.i.d. indices from the stream.
pub fn sample_sequence(rng: &RngStream, h: &Hamiltonian, n: usize) -> IndexSequence {
    let sampler = TermSampler::new(h);
    IndexSequence {
        indices: sampler.sample_many(&mut rng.rng(), n),
    }
}

/// Applies `exp(−i sign(h_j) τ H_j)` for each index in order, in place.
pub fn evolve_in_place(
    h: &Hamiltonian,
    indices: &[usize],
    tau: f64,
    amps: &mut [num_complex::Complex64],
) -> Result<()> {
    let terms = h.terms();
    for &j in indices {
        let term = terms.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            terms: terms.len(),
        })?;
        pauli::exp_pauli_in_place(&term.pauli, term.sign() * tau, amps)?;
    }
    Ok(())
}

/// `V_{j_N} ⋯ V_{j_1} |ψ₀⟩`.
pub fn run_trajectory(
    h: &Hamiltonian,
    seq: &IndexSequence,
    tau: f64,
    psi0: &StateVector,
) -> Result<StateVector> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    let mut psi = psi0.clone();
    evolve_in_place(h, seq.as_slice(), tau, psi.amplitudes_mut())?;
    Ok(psi)
}

/// One application of the averaged channel.
pub fn averaged_channel_step(h: &Hamiltonian, tau: f64, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let mut out = rho.zeros_like();
    channel_step_into(h, tau, rho, &mut out)?;
    Ok(out)
}

fn channel_step_into(
    h: &Hamiltonian,
    tau: f64,
    rho: &DensityMatrix,
    out: &mut DensityMatrix,
) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: rho.dim(),
        });
    }
    let (_, c) = tau.sin_cos();
    // cos² is even in the angle, so Σ_j p_j cos²(±τ) ρ = cos²τ ρ.
    out.scale_from(rho, c * c);
    for (term, &p) in h.terms().iter().zip(h.probs()) {
        let s = (term.sign() * tau).sin();
        pauli::accumulate_rotation_terms(&term.pauli, p, s, c, rho, out)?;
    }
    Ok(())
}

/// `𝓔^N(ρ₀)` with `τ = λt/N`.
pub fn channel_evolve(h: &Hamiltonian, rho0: &DensityMatrix, n: usize, t: f64) -> Result<DensityMatrix> {
    let cfg = QDriftConfig::new(h, t, n)?;
    let mut cur = rho0.clone();
    let mut next = rho0.zeros_like();
    for _ in 0..n {
        channel_step_into(h, cfg.tau, &cur, &mut next)?;
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// Probability of the `+1` outcome of `O` after `N` averaged-channel steps,
/// `Tr(Π₊ 𝓔^N(ρ₀))` with `Π₊ = (I + O)/2`.
pub fn channel_probability(
    h: &Hamiltonian,
    o: &Observable,
    rho0: &DensityMatrix,
    n: usize,
    t: f64,
) -> Result<f64> {
    let rho = channel_evolve(h, rho0, n, t)?;
    let expect = rho.pauli_expectation(&o.pauli)?;
    let trace = rho.trace().re;
    Ok(((trace + expect) / 2.0).clamp(0.0, 1.0))
}

/// Diamond-norm bias bound `2λ²t²/N`.
pub fn bias_bound(lambda: f64, t: f64, n: usize) -> f64 {
    2.0 * lambda * lambda * t * t / n as f64
}

/// Depth, repetitions and total gates for single-level qDRIFT at RMSE `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StdCost {
    pub depth: u64,
    pub samples: u64,
    pub total_gates: u128,
}

/// `N = ⌈√2 B/ε⌉`, `n = ⌈2σ²/ε²⌉`, total `N·n`.
pub fn std_cost(eps: f64, bias_constant: f64, sigma2: f64) -> Result<StdCost> {
    if !(eps > 0.0) || !(bias_constant > 0.0) || !(sigma2 >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "std_cost needs ε > 0, B > 0, σ² ≥ 0 (got {eps}, {bias_constant}, {sigma2})"
        )));
    }
    let depth = (std::f64::consts::SQRT_2 * bias_constant / eps).ceil() as u64;
    let samples = (2.0 * sigma2 / (eps * eps)).ceil() as u64;
    Ok(StdCost {
        depth,
        samples,
        total_gates: depth as u128 * samples as u128,
    })
}

/// How a sampled circuit is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Readout {
    /// The exact pathwise expectation `⟨ψ|O|ψ⟩`.
    #[default]
    Expectation,
    /// One projective measurement of the Pauli observable, a `±1` outcome.
    /// Fine and coarse outcomes of a coupled pair share one uniform draw.
    SingleShot,
}

/// `+1` if `u < (1 + ⟨O⟩)/2`, else `−1`.
#[inline]
pub fn shot_outcome(expectation: f64, u: f64) -> f64 {
    if u < 0.5 * (1.0 + expectation) {
        1.0
    } else {
        -1.0
    }
}

/// Result of a single-level qDRIFT run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QDriftEstimate {
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub samples: usize,
    pub depth: usize,
    pub total_gates: u128,
}

/// Plain Monte Carlo over `samples` independent trajectories of depth `depth`.
pub fn run_qdrift(
    h: &Hamiltonian,
    o: &Observable,
    psi0: &StateVector,
    t: f64,
    depth: usize,
    samples: usize,
    seed: u64,
    readout: Readout,
) -> Result<QDriftEstimate> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let cfg = QDriftConfig::new(h, t, depth)?;
    let sampler = TermSampler::new(h);
    let values = parallel::map_indexed(samples, |i| -> Result<f64> {
        let mut rng = RngStream::for_sample(seed, StreamPurpose::Trajectory, 0, i as u64).rng();
        let seq = sampler.sample_many(&mut rng, depth);
        let mut psi = psi0.clone();
        evolve_in_place(h, &seq, cfg.tau, psi.amplitudes_mut())?;
        let e = o.expectation(&psi)?;
        Ok(match readout {
            Readout::Expectation => e,
            Readout::SingleShot => shot_outcome(e, rng.random()),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let (mean, variance) = parallel::mean_and_variance(&values);
    Ok(QDriftEstimate {
        mean,
        variance,
        stderr: (variance / samples as f64).sqrt(),
        samples,
        depth,
        total_gates: depth as u128 * samples as u128,
    })
}
