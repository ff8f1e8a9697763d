//! Pauli strings and the elementary rotation kernels.
//!
//! Basis convention: qubit 0 is the leftmost letter of a Pauli string and the
//! most significant bit of a computational-basis index, so that
//! [`PauliString::to_dense`] is the Kronecker product `P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}`.
//!
//! A Pauli string acts on a basis state as `P|x⟩ = φ(x)|x ⊕ m⟩`, where `m` is
//! the mask of X/Y letters and `φ(x) = i^{#Y}(−1)^{|x ∧ z|}` with `z` the mask
//! of Z/Y letters. Every kernel here is a permutation plus phase lookup; no
//! matrix is materialised.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dense::DENSE_QUBIT_CAP;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// The 2×2 matrix of this letter.
    pub fn matrix(self) -> DMatrix<Complex64> {
        let entries = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        DMatrix::from_row_slice(2, 2, &entries)
    }
}

/// A tensor product of single-qubit Pauli operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    x_mask: usize,
    z_mask: usize,
    y_phase: YPhase,
}

// i^{#Y} only takes four values; store the exponent so the string stays Eq + Hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct YPhase(u8);

impl YPhase {
    fn value(self) -> Complex64 {
        match self.0 & 3 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        }
    }
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidPauli(String::new()));
        }
        if letters.len() >= usize::BITS as usize {
            return Err(Error::InvalidPauli(format!("{} qubits", letters.len())));
        }
        let n = letters.len();
        let mut x_mask = 0usize;
        let mut z_mask = 0usize;
        let mut n_y = 0u8;
        for (q, &p) in letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x_mask |= bit,
                Pauli::Z => z_mask |= bit,
                Pauli::Y => {
                    x_mask |= bit;
                    z_mask |= bit;
                    n_y = n_y.wrapping_add(1);
                }
            }
        }
        Ok(Self {
            letters,
            x_mask,
            z_mask,
            y_phase: YPhase(n_y & 3),
        })
    }

    pub fn identity(num_qubits: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; num_qubits])
    }

    /// A string with `letter` on each qubit of `sites` and identity elsewhere.
    pub fn with_sites(num_qubits: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; num_qubits];
        for &(q, p) in sites {
            if q >= num_qubits {
                return Err(Error::InvalidPauli(format!(
                    "site {q} out of range for {num_qubits} qubits"
                )));
            }
            letters[q] = p;
        }
        Self::new(letters)
    }

    pub fn num_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Bit-flip mask `m` in `P|x⟩ = φ(x)|x ⊕ m⟩`.
    #[inline]
    pub fn flip_mask(&self) -> usize {
        self.x_mask
    }

    /// Phase `φ(x)` in `P|x⟩ = φ(x)|x ⊕ m⟩`.
    #[inline]
    pub fn phase(&self, x: usize) -> Complex64 {
        let base = self.y_phase.value();
        if (x & self.z_mask).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    /// Dense `2^n × 2^n` matrix, for oracles on at most [`DENSE_QUBIT_CAP`] qubits.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.to_dense_capped(DENSE_QUBIT_CAP)
    }

    pub fn to_dense_capped(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.num_qubits() > cap {
            return Err(Error::DenseCapExceeded {
                qubits: self.num_qubits(),
                cap,
            });
        }
        let mut out = DMatrix::from_element(1, 1, ONE);
        for p in &self.letters {
            out = out.kronecker(&p.matrix());
        }
        Ok(out)
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: dim,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .trim()
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::InvalidPauli(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A pure state (or, for difference states, an arbitrary vector) on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "statevector length {len} is not a power of two"
            )));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn zero_state(num_qubits: usize) -> Self {
        Self::basis(num_qubits, 0).expect("index 0 is always valid")
    }

    /// Basis state from a bitstring such as `"000000"`, qubit 0 leftmost.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let n = bits.len();
        let mut index = 0usize;
        for c in bits.chars() {
            index <<= 1;
            match c {
                '0' => {}
                '1' => index |= 1,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid bitstring {bits:?}"
                    )))
                }
            }
        }
        Self::basis(n, index)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amplitudes.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn sub(&self, other: &StateVector) -> Result<StateVector> {
        self.check_same(other)?;
        Ok(StateVector {
            num_qubits: self.num_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scaled(&self, factor: f64) -> StateVector {
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn to_dvector(&self) -> nalgebra::DVector<Complex64> {
        nalgebra::DVector::from_column_slice(&self.amplitudes)
    }

    fn check_same(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

/// A `d × d` density matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> Self {
        let dim = psi.dim();
        let a = psi.amplitudes();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(a[i] * a[j].conj());
            }
        }
        Self {
            num_qubits: psi.num_qubits(),
            dim,
            entries,
        }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut entries = vec![ZERO; dim * dim];
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            entries[i * dim + i] = w;
        }
        Self {
            num_qubits,
            dim,
            entries,
        }
    }

    pub fn from_dense(m: &DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "density matrix must be square with power-of-two size, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(m[(i, j)]);
            }
        }
        Ok(Self {
            num_qubits: dim.trailing_zeros() as usize,
            dim,
            entries,
        })
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `Tr(Pρ)` for a Pauli string, real because both are Hermitian.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        p.check_dim(self.dim)?;
        let m = p.flip_mask();
        // Tr(Pρ) = Σ_a (Pρ)_{aa} = Σ_a φ(a⊕m) ρ_{a⊕m, a}
        let tr: Complex64 = (0..self.dim)
            .map(|a| {
                let src = a ^ m;
                p.phase(src) * self.get(src, a)
            })
            .sum();
        Ok(tr.re)
    }

    fn check_same(&self, other: &DensityMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        Ok(())
    }
}

/// `P|ψ⟩`.
pub fn apply_pauli(p: &PauliString, psi: &StateVector) -> Result<StateVector> {
    p.check_dim(psi.dim())?;
    let m = p.flip_mask();
    let src = psi.amplitudes();
    let mut out = vec![ZERO; src.len()];
    for (x, &a) in src.iter().enumerate() {
        out[x ^ m] = p.phase(x) * a;
    }
    Ok(StateVector {
        num_qubits: psi.num_qubits(),
        amplitudes: out,
    })
}

/// `exp(−iθP)|ψ⟩ = cos θ |ψ⟩ − i sin θ P|ψ⟩`.
pub fn apply_exp_pauli(p: &PauliString, theta: f64, psi: &StateVector) -> Result<StateVector> {
    let mut out = psi.clone();
    exp_pauli_in_place(p, theta, out.amplitudes_mut())?;
    Ok(out)
}

/// In-place `exp(−iθP)` on raw amplitudes; the trajectory hot loop.
pub fn exp_pauli_in_place(p: &PauliString, theta: f64, amps: &mut [Complex64]) -> Result<()> {
    p.check_dim(amps.len())?;
    let (s, c) = theta.sin_cos();
    let m = p.flip_mask();
    // -i sin θ
    let mis = Complex64::new(0.0, -s);
    if m == 0 {
        for (x, a) in amps.iter_mut().enumerate() {
            *a *= c + mis * p.phase(x);
        }
    } else {
        for x in 0..amps.len() {
            let y = x ^ m;
            if x < y {
                let a = amps[x];
                let b = amps[y];
                // (Pψ)[x] = φ(y)ψ[y], (Pψ)[y] = φ(x)ψ[x]
                amps[x] = a * c + mis * p.phase(y) * b;
                amps[y] = b * c + mis * p.phase(x) * a;
            }
        }
    }
    Ok(())
}

/// `exp(−iθP) ρ exp(iθP) = cos²θ ρ − i sinθ cosθ [P, ρ] + sin²θ PρP`.
pub fn conjugate_exp_pauli(
    p: &PauliString,
    theta: f64,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    p.check_dim(rho.dim())?;
    let mut out = DensityMatrix {
        num_qubits: rho.num_qubits,
        dim: rho.dim,
        entries: vec![ZERO; rho.entries.len()],
    };
    let (s, c) = theta.sin_cos();
    let cc = c * c;
    for (o, r) in out.entries.iter_mut().zip(&rho.entries) {
        *o = r * cc;
    }
    accumulate_rotation_terms(p, 1.0, s, c, rho, &mut out)?;
    Ok(out)
}

/// Adds `weight · (−i s c [P, ρ] + s² PρP)` to `out`.
///
/// The `cos²θ ρ` part is left to the caller so that a mixture over terms with
/// equal `|θ|` can add it once.
pub(crate) fn accumulate_rotation_terms(
    p: &PauliString,
    weight: f64,
    s: f64,
    c: f64,
    rho: &DensityMatrix,
    out: &mut DensityMatrix,
) -> Result<()> {
    p.check_dim(rho.dim())?;
    rho.check_same(out)?;
    let d = rho.dim;
    let m = p.flip_mask();
    let comm = Complex64::new(0.0, -weight * s * c);
    let sandwich = weight * s * s;
    let src = &rho.entries;
    for a in 0..d {
        let a_f = a ^ m;
        let phase_af = p.phase(a_f);
        let row_a = &src[a * d..(a + 1) * d];
        let row_af = &src[a_f * d..(a_f + 1) * d];
        let dst = &mut out.entries[a * d..(a + 1) * d];
        for b in 0..d {
            let b_f = b ^ m;
            let phase_b = p.phase(b);
            let p_rho = phase_af * row_af[b];
            let rho_p = row_a[b_f] * phase_b;
            let p_rho_p = phase_af * phase_b * row_af[b_f];
            dst[b] += comm * (p_rho - rho_p) + p_rho_p * sandwich;
        }
    }
    Ok(())
}

impl DensityMatrix {
    pub(crate) fn zeros_like(&self) -> DensityMatrix {
        DensityMatrix {
            num_qubits: self.num_qubits,
            dim: self.dim,
            entries: vec![ZERO; self.entries.len()],
        }
    }

    pub(crate) fn scale_from(&mut self, other: &DensityMatrix, factor: f64) {
        for (o, r) in self.entries.iter_mut().zip(&other.entries) {
            *o = r * factor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parses_and_prints() {
        let p: PauliString = "XXIIII".parse().unwrap();
        assert_eq!(p.num_qubits(), 6);
        assert_eq!(p.to_string(), "XXIIII");
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn identity_leaves_state_alone() {
        let p = PauliString::identity(3).unwrap();
        let psi = StateVector::from_amplitudes((0..8).map(|k| c(k as f64, -(k as f64))).collect())
            .unwrap();
        assert_eq!(apply_pauli(&p, &psi).unwrap(), psi);
    }

    #[test]
    fn x_flips_the_bit() {
        let p: PauliString = "X".parse().unwrap();
        let out = apply_pauli(&p, &StateVector::zero_state(1)).unwrap();
        assert_eq!(out.amplitudes(), &[ZERO, ONE]);
    }

    #[test]
    fn z_rotation_by_half_pi_on_zero() {
        let p: PauliString = "Z".parse().unwrap();
        let out = apply_exp_pauli(&p, FRAC_PI_2, &StateVector::zero_state(1)).unwrap();
        assert!((out.amplitudes()[0] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(out.amplitudes()[1].norm() < 1e-15);
    }

    #[test]
    fn zero_angle_is_identity() {
        let p: PauliString = "XYZ".parse().unwrap();
        let psi = StateVector::from_amplitudes((0..8).map(|k| c(0.1 * k as f64, 0.3)).collect())
            .unwrap();
        assert_eq!(apply_exp_pauli(&p, 0.0, &psi).unwrap(), psi);
        let rho = DensityMatrix::from_pure(&psi);
        assert_eq!(conjugate_exp_pauli(&p, 0.0, &rho).unwrap(), rho);
    }

    #[test]
    fn maximally_mixed_is_invariant() {
        let p: PauliString = "YX".parse().unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let out = conjugate_exp_pauli(&p, 0.77, &rho).unwrap();
        for (a, b) in out.entries().iter().zip(rho.entries()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn dense_forms() {
        let i1 = PauliString::identity(1).unwrap().to_dense().unwrap();
        assert_eq!(i1, DMatrix::identity(2, 2));
        let z = "Z".parse::<PauliString>().unwrap().to_dense().unwrap();
        assert_eq!(z, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, -ONE])));
        let xx = "XX".parse::<PauliString>().unwrap().to_dense().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i + j == 3 { ONE } else { ZERO };
                assert_eq!(xx[(i, j)], want);
            }
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let p = PauliString::identity(9).unwrap();
        assert!(matches!(
            p.to_dense(),
            Err(Error::DenseCapExceeded { qubits: 9, cap: 8 })
        ));
        assert!(p.to_dense_capped(9).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p: PauliString = "XX".parse().unwrap();
        let psi = StateVector::zero_state(3);
        assert!(matches!(
            apply_pauli(&p, &psi),
            Err(Error::DimensionMismatch { expected: 4, actual: 8 })
        ));
        assert!(apply_exp_pauli(&p, 0.1, &psi).is_err());
        assert!(conjugate_exp_pauli(&p, 0.1, &DensityMatrix::from_pure(&psi)).is_err());
    }

    #[test]
    fn y_on_basis_states() {
        let y: PauliString = "Y".parse().unwrap();
        let up = apply_pauli(&y, &StateVector::basis(1, 0).unwrap()).unwrap();
        assert_eq!(up.amplitudes(), &[ZERO, I]);
        let down = apply_pauli(&y, &StateVector::basis(1, 1).unwrap()).unwrap();
        assert_eq!(down.amplitudes(), &[-I, ZERO]);
    }

    #[test]
    fn pauli_expectation_on_density_matrix() {
        let z0: PauliString = "ZI".parse().unwrap();
        let rho = DensityMatrix::from_pure(&StateVector::from_bitstring("10").unwrap());
        assert_eq!(rho.pauli_expectation(&z0).unwrap(), -1.0);
        let dense = dense::expectation_dense(&z0.to_dense().unwrap(), &rho.to_dense());
        assert_eq!(dense, -1.0);
    }
}
