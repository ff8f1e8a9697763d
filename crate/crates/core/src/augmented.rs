//! Augmented-state readout of a coupled pair.
//!
//! With `e = ψ_fine − ψ_coarse` the correction is
//! `Y = ⟨e|O|e⟩ + 2 Re⟨e|O|ψ_c⟩`, a single expectation of the block observable
//! `Ô = [[ζ⁻²O, ζ⁻¹O], [ζ⁻¹O, 0]]` in `χ = (ζe, ψ_c)`. Scaling by
//! `ζ = c/√τ` keeps `‖χ‖² = S` bounded while shrinking `Ô`, so measuring
//! `Ô` on `χ/√S` has shot noise `O(τ)`.
//!
//! Production code propagates the two `d`-dimensional states directly; the
//! `2d × 2d` block map below exists as a cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{self, DenseMatrix, DENSE_QUBIT_CAP};
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Observable};
use crate::mlmc::{coupled_pair_states, LevelHierarchy};
use crate::parallel;
use crate::pauli::{PauliString, StateVector};
use crate::qdrift::{self, IndexSequence};
use crate::rng::{RngStream, StreamPurpose};

/// `ζ_ℓ = c/√τ_ℓ`.
pub fn zeta(level: usize, hier: &LevelHierarchy, c: f64) -> f64 {
    c / hier.tau(level).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    /// `ζe`.
    pub error_block: StateVector,
    /// `ψ_coarse`.
    pub coarse_block: StateVector,
    pub zeta: f64,
    /// `S = 1 + ‖ζe‖²`.
    pub squared_norm: f64,
}

impl AugmentedState {
    pub fn from_pair(fine: &StateVector, coarse: StateVector, zeta: f64) -> Result<Self> {
        let error_block = fine.sub(&coarse)?.scaled(zeta);
        let squared_norm = 1.0 + error_block.norm_sqr();
        Ok(Self {
            error_block,
            coarse_block: coarse,
            zeta,
            squared_norm,
        })
    }

    /// `e`, unscaled.
    pub fn difference(&self) -> StateVector {
        self.error_block.scaled(1.0 / self.zeta)
    }

    /// `‖e‖`.
    pub fn difference_norm(&self) -> f64 {
        self.error_block.norm() / self.zeta
    }

    /// `χ` as one `2d` vector, error block on top.
    pub fn stacked(&self) -> Vec<Complex64> {
        let mut v = self.error_block.amplitudes().to_vec();
        v.extend_from_slice(self.coarse_block.amplitudes());
        v
    }
}

/// Propagates the index-shared pair for `seq` and assembles `χ`.
pub fn evolve_augmented(
    h: &Hamiltonian,
    hier: &LevelHierarchy,
    level: usize,
    seq: &IndexSequence,
    psi0: &StateVector,
    c: f64,
) -> Result<AugmentedState> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("ζ scale must be positive, got {c}")));
    }
    let (fine, coarse) = coupled_pair_states(h, hier, level, seq, psi0)?;
    AugmentedState::from_pair(&fine, coarse, zeta(level, hier, c))
}

/// `ζ⁻²⟨ζe|O|ζe⟩ + 2ζ⁻¹Re⟨ζe|O|ψ_c⟩`.
pub fn block_expectation(chi: &AugmentedState, o: &Observable) -> Result<f64> {
    let z = chi.zeta;
    let ee = o.bilinear(&chi.error_block, &chi.error_block)?.re;
    let ec = o.bilinear(&chi.error_block, &chi.coarse_block)?.re;
    Ok(ee / (z * z) + 2.0 * ec / z)
}

/// `S·⟨χ|Ô²|χ⟩ − Y²`, using `⟨χ|Ô²|χ⟩ = ‖e‖² + ζ⁻²` for a Pauli `O`.
pub fn shot_noise_variance(chi: &AugmentedState, o: &Observable) -> Result<f64> {
    let y = block_expectation(chi, o)?;
    let e2 = chi.difference_norm().powi(2);
    let second = e2 + 1.0 / (chi.zeta * chi.zeta);
    Ok(clamp_variance(chi.squared_norm * second - y * y))
}

/// Same quantity for an arbitrary Hermitian `O`, via the dense `Ô²`.
pub fn shot_noise_variance_dense(chi: &AugmentedState, o: &DenseMatrix) -> Result<f64> {
    let obs = block_observable_dense(o, chi.zeta);
    let v = nalgebra::DVector::from_vec(chi.stacked());
    if v.len() != obs.nrows() {
        return Err(Error::DimensionMismatch {
            expected: obs.nrows(),
            actual: v.len(),
        });
    }
    let ov = &obs * &v;
    let y = v.dotc(&ov).re;
    let second = ov.norm_squared();
    Ok(clamp_variance(chi.squared_norm * second - y * y))
}

fn clamp_variance(v: f64) -> f64 {
    if v < 0.0 {
        if v < -1e-10 {
            log::warn!("shot-noise variance {v:e} clamped to 0");
        }
        0.0
    } else {
        v
    }
}

/// The block observable `Ô`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockObservable {
    pub base: Observable,
    pub zeta: f64,
}

impl BlockObservable {
    pub fn new(base: Observable, zeta: f64) -> Self {
        Self { base, zeta }
    }

    /// `(ζ⁻¹ + ζ⁻²)‖O‖`.
    pub fn norm_bound(&self) -> f64 {
        (1.0 / self.zeta + 1.0 / (self.zeta * self.zeta)) * self.base.norm_bound()
    }

    /// Exact `‖Ô‖ = ‖[[ζ⁻², ζ⁻¹], [ζ⁻¹, 0]]‖·‖O‖`.
    pub fn norm(&self) -> f64 {
        let a = 1.0 / (self.zeta * self.zeta);
        let b = 1.0 / self.zeta;
        (0.5 * a + (0.25 * a * a + b * b).sqrt()) * self.base.norm_bound()
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        Ok(block_observable_dense(&self.base.pauli.to_dense()?, self.zeta))
    }
}

fn block_observable_dense(o: &DenseMatrix, zeta: f64) -> DenseMatrix {
    let zi = Complex64::new(1.0 / zeta, 0.0);
    let zero = DenseMatrix::zeros(o.nrows(), o.ncols());
    dense::block2x2(&(o * zi * zi), &(o * zi), &(o * zi), &zero)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormDiagnostics {
    pub squared_norm: f64,
    pub s_lower_ok: bool,
    /// `S ≤ 1 + c²C_e²τ`.
    pub s_upper_ok: bool,
    pub observable_bound: f64,
    /// Dense `‖Ô‖`, when the register is small enough.
    pub observable_norm: Option<f64>,
    pub observable_ok: Option<bool>,
    /// `‖e‖/τ`.
    pub error_ratio: f64,
}

pub fn check_norm_bounds(
    chi: &AugmentedState,
    o: &Observable,
    c_e: f64,
    tau: f64,
    c: f64,
) -> NormDiagnostics {
    let s = chi.squared_norm;
    let block = BlockObservable::new(o.clone(), chi.zeta);
    let bound = block.norm_bound();
    let observable_norm = block.to_dense().ok().map(|m| dense::hermitian_norm(&m));
    NormDiagnostics {
        squared_norm: s,
        s_lower_ok: s >= 1.0 - 1e-12,
        s_upper_ok: s <= 1.0 + c * c * c_e * c_e * tau + 1e-12,
        observable_bound: bound,
        observable_norm,
        observable_ok: observable_norm.map(|n| n <= bound + 1e-12),
        error_ratio: chi.difference_norm() / tau,
    }
}

fn rotation_dense(p: &PauliString, theta: f64) -> Result<DenseMatrix> {
    let pd = p.to_dense_capped(DENSE_QUBIT_CAP)?;
    let id = DenseMatrix::identity(pd.nrows(), pd.ncols());
    let (s, c) = theta.sin_cos();
    Ok(id * Complex64::new(c, 0.0) - pd * Complex64::new(0.0, s))
}

/// `𝒲 = [[U_f, ζ(U_f − U_c)], [0, U_c]]` with `U_f = e^{−iτb}e^{−iτa}`,
/// `U_c = e^{−2iτa}`.
pub fn build_block_step(a: &PauliString, b: &PauliString, tau: f64, zeta: f64) -> Result<DenseMatrix> {
    build_block_step_angles(a, tau, b, tau, zeta)
}

/// Block step for a pair of signed Hamiltonian terms `(j_a, j_b)`.
pub fn build_block_step_terms(
    h: &Hamiltonian,
    ja: usize,
    jb: usize,
    tau: f64,
    zeta: f64,
) -> Result<DenseMatrix> {
    let terms = h.terms();
    let get = |j: usize| {
        terms.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            terms: terms.len(),
        })
    };
    let (ta, tb) = (get(ja)?, get(jb)?);
    build_block_step_angles(&ta.pauli, ta.sign() * tau, &tb.pauli, tb.sign() * tau, zeta)
}

fn build_block_step_angles(
    a: &PauliString,
    theta_a: f64,
    b: &PauliString,
    theta_b: f64,
    zeta: f64,
) -> Result<DenseMatrix> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.num_qubits(),
            actual: b.num_qubits(),
        });
    }
    let ua = rotation_dense(a, theta_a)?;
    let uf = rotation_dense(b, theta_b)? * &ua;
    let uc = &ua * &ua;
    let off = (&uf - &uc) * Complex64::new(zeta, 0.0);
    let zero = DenseMatrix::zeros(uf.nrows(), uf.ncols());
    Ok(dense::block2x2(&uf, &off, &zero, &uc))
}

/// `𝓗`, `𝓚` and their norms for the second half-step of a block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGenerators {
    pub a: PauliString,
    pub b: PauliString,
    pub tau: f64,
    pub zeta: f64,
    pub hermitian: DenseMatrix,
    pub antihermitian: DenseMatrix,
    pub hermitian_norm: f64,
    pub antihermitian_norm: f64,
    /// `‖H_b − H_a‖`.
    pub delta_norm: f64,
    /// `‖(−i𝓗 + 𝓚) − (−iτ[[H_b, ζΔH], [0, H_a]])‖_max`.
    pub reconstruction_error: f64,
}

impl BlockGenerators {
    /// `‖𝓚‖ ≤ τζ`.
    pub fn antihermitian_bound_holds(&self) -> bool {
        self.antihermitian_norm <= self.tau * self.zeta + 1e-12
    }
}

pub fn block_generator_norms(a: &PauliString, b: &PauliString, tau: f64, zeta: f64) -> Result<BlockGenerators> {
    let ha = a.to_dense_capped(DENSE_QUBIT_CAP)?;
    let hb = b.to_dense_capped(DENSE_QUBIT_CAP)?;
    if ha.nrows() != hb.nrows() {
        return Err(Error::DimensionMismatch {
            expected: ha.nrows(),
            actual: hb.nrows(),
        });
    }
    let d = ha.nrows();
    let zero = DenseMatrix::zeros(d, d);
    let delta = &hb - &ha;
    let re = |x: f64| Complex64::new(x, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let half = &delta * re(0.5 * zeta);
    let hermitian = dense::block2x2(&hb, &half, &half, &ha) * re(tau);
    let antihermitian = dense::block2x2(&zero, &(&delta * (-i)), &(&delta * i), &zero) * re(0.5 * tau * zeta);
    let raw = dense::block2x2(&hb, &(&delta * re(zeta)), &zero, &ha) * (-i * tau);
    let rebuilt = &hermitian * (-i) + &antihermitian;
    Ok(BlockGenerators {
        a: a.clone(),
        b: b.clone(),
        tau,
        zeta,
        hermitian_norm: dense::hermitian_norm(&hermitian),
        antihermitian_norm: dense::operator_norm(&antihermitian),
        delta_norm: dense::hermitian_norm(&delta),
        reconstruction_error: dense::max_abs_diff(&rebuilt, &raw),
        hermitian,
        antihermitian,
    })
}

/// Applies the block map for a shared sequence to `(0, ψ₀)`; dense oracle for
/// [`evolve_augmented`].
pub fn iterate_block_map(
    h: &Hamiltonian,
    seq: &IndexSequence,
    tau: f64,
    zeta: f64,
    psi0: &StateVector,
) -> Result<Vec<Complex64>> {
    if seq.len() % 2 != 0 {
        return Err(Error::InvalidArgument("block map needs an even sequence".into()));
    }
    let d = psi0.dim();
    let mut v = nalgebra::DVector::<Complex64>::zeros(2 * d);
    for (k, a) in psi0.amplitudes().iter().enumerate() {
        v[d + k] = *a;
    }
    for pair in seq.as_slice().chunks(2) {
        let w = build_block_step_terms(h, pair[0], pair[1], tau, zeta)?;
        v = w * v;
    }
    Ok(v.iter().copied().collect())
}

/// Per-sequence augmented-state statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentedSample {
    pub y: f64,
    pub var_shot: f64,
    pub error_norm: f64,
    pub squared_norm: f64,
}

/// `n` independent sequences at `level`, each reduced to its shot-noise
/// variance and difference norm.
pub fn sample_level(
    h: &Hamiltonian,
    o: &Observable,
    psi0: &StateVector,
    hier: &LevelHierarchy,
    level: usize,
    n: u64,
    seed: u64,
    c: f64,
) -> Result<Vec<AugmentedSample>> {
    parallel::map_indexed(n as usize, |i| {
        let stream = RngStream::for_sample(seed, StreamPurpose::ShotNoise, level, i as u64);
        let seq = qdrift::sample_sequence(&stream, h, hier.gates(level));
        let chi = evolve_augmented(h, hier, level, &seq, psi0, c)?;
        Ok(AugmentedSample {
            y: block_expectation(&chi, o)?,
            var_shot: shot_noise_variance(&chi, o)?,
            error_norm: chi.difference_norm(),
            squared_norm: chi.squared_norm,
        })
    })
    .into_iter()
    .collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_heisenberg_xyz;

    #[test]
    fn zeta_values() {
        let hier = LevelHierarchy::from_lambda_t(11.5, 128, 5).unwrap();
        assert!((zeta(1, &hier, 1.0) - (256.0f64 / 11.5).sqrt()).abs() < 1e-12);
        assert!((zeta(1, &hier, 1.0) - 4.718).abs() < 1e-3);
        assert!((zeta(3, &hier, 1.0) / zeta(2, &hier, 1.0) - 2f64.sqrt()).abs() < 1e-12);
        let unit = LevelHierarchy::from_lambda_t(4.0, 4, 1).unwrap();
        assert!((zeta(0, &unit, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_term_has_no_difference() {
        let h = Hamiltonian::from_pairs([(0.4, "XY")]).unwrap();
        let o = Observable::z(2, 1).unwrap();
        let hier = LevelHierarchy::new(&h, 1.0, 4, 2).unwrap();
        let seq = qdrift::sample_sequence(&RngStream::new(1, 1), &h, 16);
        let chi = evolve_augmented(&h, &hier, 2, &seq, &StateVector::zero_state(2), 1.0).unwrap();
        assert!(chi.error_block.norm() < 1e-12);
        assert!((chi.squared_norm - 1.0).abs() < 1e-12);
        assert!(block_expectation(&chi, &o).unwrap().abs() < 1e-12);
        let v = shot_noise_variance(&chi, &o).unwrap();
        assert!((v - hier.tau(2)).abs() < 1e-12);
    }

    #[test]
    fn block_step_trivial_cases() {
        let a: PauliString = "XZ".parse().unwrap();
        let b: PauliString = "YY".parse().unwrap();
        let w = build_block_step(&a, &b, 0.0, 3.0).unwrap();
        assert!(dense::max_abs_diff(&w, &DenseMatrix::identity(8, 8)) < 1e-15);
        let w = build_block_step(&a, &a, 0.3, 3.0).unwrap();
        assert!(w.view((0, 4), (4, 4)).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn generator_split() {
        let a: PauliString = "XZ".parse().unwrap();
        let b: PauliString = "ZY".parse().unwrap();
        let g = block_generator_norms(&a, &b, 0.1, 4.0).unwrap();
        assert!(g.reconstruction_error < 1e-12);
        assert!(g.antihermitian_bound_holds());
        assert!((g.antihermitian_norm - 0.5 * 0.1 * 4.0 * g.delta_norm).abs() < 1e-10);
        let same = block_generator_norms(&a, &a, 0.1, 4.0).unwrap();
        assert!(same.antihermitian_norm < 1e-14);
    }

    #[test]
    fn block_observable_norm() {
        let o = Observable::z(1, 0).unwrap();
        let b = BlockObservable::new(o, 1.0);
        assert_eq!(b.norm_bound(), 2.0);
        let dense_norm = dense::hermitian_norm(&b.to_dense().unwrap());
        assert!(dense_norm <= 2.0);
        assert!((dense_norm - b.norm()).abs() < 1e-12);
    }

    #[test]
    fn pathwise_identity_and_scale_invariance() {
        let h = build_heisenberg_xyz(3, 1.0, 0.5, 0.8).unwrap();
        let o = Observable::z(3, 0).unwrap();
        let psi = StateVector::zero_state(3);
        let hier = LevelHierarchy::new(&h, 1.0, 8, 3).unwrap();
        let seq = qdrift::sample_sequence(&RngStream::new(5, 5), &h, hier.gates(3));
        let (f, c) = coupled_pair_states(&h, &hier, 3, &seq, &psi).unwrap();
        let y = o.expectation(&f).unwrap() - o.expectation(&c).unwrap();
        for scale in [0.5, 1.0, 2.0] {
            let chi = evolve_augmented(&h, &hier, 3, &seq, &psi, scale).unwrap();
            assert!((block_expectation(&chi, &o).unwrap() - y).abs() < 1e-12);
            assert!((chi.squared_norm - 1.0 - chi.error_block.norm_sqr()).abs() < 1e-12);
            let dense_v = shot_noise_variance_dense(&chi, &o.pauli.to_dense().unwrap()).unwrap();
            assert!((dense_v - shot_noise_variance(&chi, &o).unwrap()).abs() < 1e-10);
        }
    }
}
