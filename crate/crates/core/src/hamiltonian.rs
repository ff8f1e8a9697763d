//! Weighted Pauli-sum Hamiltonians and observables.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{self, DenseMatrix};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, StateVector};

/// One term `h_j H_j` with a signed coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerm {
    pub coeff: f64,
    pub pauli: PauliString,
}

impl HamiltonianTerm {
    pub fn new(coeff: f64, pauli: PauliString) -> Self {
        Self { coeff, pauli }
    }

    /// `+1` or `−1`; the sign is absorbed into the rotation angle.
    #[inline]
    pub fn sign(&self) -> f64 {
        if self.coeff < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

/// `H = Σ_j h_j H_j` together with its one-norm and qDRIFT sampling weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    num_qubits: usize,
    terms: Vec<HamiltonianTerm>,
    one_norm: f64,
    probs: Vec<f64>,
}

impl Hamiltonian {
    /// Zero-coefficient terms are dropped; identity strings and non-finite
    /// coefficients are rejected.
    pub fn new(terms: Vec<HamiltonianTerm>) -> Result<Self> {
        let mut kept = Vec::with_capacity(terms.len());
        let mut num_qubits = None;
        for term in terms {
            if !term.coeff.is_finite() {
                return Err(Error::InvalidHamiltonian(format!(
                    "non-finite coefficient on {}",
                    term.pauli
                )));
            }
            match num_qubits {
                None => num_qubits = Some(term.pauli.num_qubits()),
                Some(n) if n != term.pauli.num_qubits() => {
                    return Err(Error::InvalidHamiltonian(format!(
                        "term {} acts on {} qubits, expected {n}",
                        term.pauli,
                        term.pauli.num_qubits()
                    )))
                }
                Some(_) => {}
            }
            if term.coeff == 0.0 {
                continue;
            }
            if term.pauli.is_identity() {
                return Err(Error::InvalidHamiltonian(
                    "identity terms only contribute a global phase".into(),
                ));
            }
            kept.push(term);
        }
        let num_qubits = num_qubits
            .ok_or_else(|| Error::InvalidHamiltonian("no terms".into()))?;
        if kept.is_empty() {
            return Err(Error::InvalidHamiltonian(
                "all coefficients are zero".into(),
            ));
        }
        let one_norm: f64 = kept.iter().map(|t| t.coeff.abs()).sum();
        let probs = kept.iter().map(|t| t.coeff.abs() / one_norm).collect();
        Ok(Self {
            num_qubits,
            terms: kept,
            one_norm,
            probs,
        })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (f64, &'a str)>) -> Result<Self> {
        let terms = pairs
            .into_iter()
            .map(|(c, s)| Ok(HamiltonianTerm::new(c, s.parse()?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `λ = Σ_j |h_j|`.
    pub fn one_norm(&self) -> f64 {
        self.one_norm
    }

    /// `p_j = |h_j| / λ`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Joins two term lists acting on the same register.
    pub fn concat(&self, other: &Hamiltonian) -> Result<Hamiltonian> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Hamiltonian::new(terms)
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let d = self.dim();
        let mut h = DMatrix::<Complex64>::zeros(d, d);
        for term in &self.terms {
            h += term.pauli.to_dense()? * Complex64::new(term.coeff, 0.0);
        }
        Ok(h)
    }
}

/// `p_j = |h_j| / λ` for each term.
pub fn sampling_distribution(h: &Hamiltonian) -> Vec<f64> {
    h.probs().to_vec()
}

/// Nearest-neighbour Heisenberg XYZ chain on `n` qubits:
/// `Σ_j Jx X_jX_{j+1} + Jy Y_jY_{j+1} + Jz Z_jZ_{j+1}`.
pub fn build_heisenberg_xyz(n: usize, jx: f64, jy: f64, jz: f64) -> Result<Hamiltonian> {
    if n < 2 {
        return Err(Error::InvalidHamiltonian(format!(
            "Heisenberg chain needs at least 2 qubits, got {n}"
        )));
    }
    let mut terms = Vec::with_capacity(3 * (n - 1));
    for j in 0..n - 1 {
        for (coupling, letter) in [(jx, Pauli::X), (jy, Pauli::Y), (jz, Pauli::Z)] {
            let pauli = PauliString::with_sites(n, &[(j, letter), (j + 1, letter)])?;
            terms.push(HamiltonianTerm::new(coupling, pauli));
        }
    }
    Hamiltonian::new(terms)
}

/// `e^{−iHt}|ψ₀⟩` by dense eigendecomposition.
pub fn exact_evolution(h: &Hamiltonian, t: f64, psi0: &StateVector) -> Result<StateVector> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            actual: psi0.dim(),
        });
    }
    let u = dense::hermitian_expm(&h.to_dense()?, t);
    let out = u * psi0.to_dvector();
    StateVector::from_amplitudes(out.iter().copied().collect())
}

/// A Pauli observable `O` with `‖O‖ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub pauli: PauliString,
}

impl Observable {
    pub fn new(pauli: PauliString) -> Self {
        Self { pauli }
    }

    /// `Z` on qubit `q` of an `n`-qubit register.
    pub fn z(num_qubits: usize, q: usize) -> Result<Self> {
        Ok(Self::new(PauliString::with_sites(num_qubits, &[(q, Pauli::Z)])?))
    }

    pub fn norm_bound(&self) -> f64 {
        1.0
    }

    /// Raw quadratic form `⟨ψ|O|ψ⟩`, with no normalisation.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.bilinear(psi, psi)?.re)
    }

    /// `⟨φ|O|ψ⟩`.
    pub fn bilinear(&self, phi: &StateVector, psi: &StateVector) -> Result<Complex64> {
        let p = &self.pauli;
        if phi.dim() != p.dim() || psi.dim() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                actual: if phi.dim() != p.dim() { phi.dim() } else { psi.dim() },
            });
        }
        let m = p.flip_mask();
        let a = phi.amplitudes();
        let b = psi.amplitudes();
        // ⟨φ|P|ψ⟩ = Σ_x conj(φ[x⊕m]) φ(x) ψ[x]
        Ok((0..b.len())
            .map(|x| a[x ^ m].conj() * p.phase(x) * b[x])
            .sum())
    }
}

/// `⟨O⟩` on a state; see [`Observable::expectation`].
pub fn expectation(o: &Observable, psi: &StateVector) -> Result<f64> {
    o.expectation(psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_six_sites() {
        let h = build_heisenberg_xyz(6, 1.0, 0.5, 0.8).unwrap();
        assert_eq!(h.num_terms(), 15);
        assert!((h.one_norm() - 11.5).abs() < 1e-12);
        let p = sampling_distribution(&h);
        for bond in 0..5 {
            assert!((p[3 * bond] - 1.0 / 11.5).abs() < 1e-15);
            assert!((p[3 * bond + 1] - 0.5 / 11.5).abs() < 1e-15);
            assert!((p[3 * bond + 2] - 0.8 / 11.5).abs() < 1e-15);
        }
        assert_eq!(h.terms()[0].pauli.to_string(), "XXIIII");
        assert_eq!(h.terms()[14].pauli.to_string(), "IIIIZZ");
    }

    #[test]
    fn heisenberg_drops_zero_couplings() {
        let h = build_heisenberg_xyz(2, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(h.num_terms(), 1);
        assert_eq!(h.one_norm(), 1.0);
        let h = build_heisenberg_xyz(3, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(h.num_terms(), 6);
        assert_eq!(h.one_norm(), 6.0);
        assert!(build_heisenberg_xyz(1, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn sampling_probabilities() {
        let h = Hamiltonian::from_pairs([(2.0, "X")]).unwrap();
        assert_eq!(sampling_distribution(&h), vec![1.0]);
        let h = Hamiltonian::from_pairs([(1.0, "X"), (-3.0, "Z")]).unwrap();
        assert_eq!(sampling_distribution(&h), vec![0.25, 0.75]);
        assert_eq!(h.terms()[1].sign(), -1.0);
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(Hamiltonian::from_pairs([(1.0, "II")]).is_err());
        assert!(Hamiltonian::from_pairs([(0.0, "XX")]).is_err());
        assert!(Hamiltonian::from_pairs([(1.0, "XX"), (1.0, "X")]).is_err());
        assert!(Hamiltonian::from_pairs([(f64::NAN, "X")]).is_err());
        assert!(Hamiltonian::new(vec![]).is_err());
    }

    #[test]
    fn one_norm_is_additive() {
        let a = Hamiltonian::from_pairs([(1.0, "XI"), (-0.5, "ZZ")]).unwrap();
        let b = Hamiltonian::from_pairs([(2.0, "YY")]).unwrap();
        let ab = a.concat(&b).unwrap();
        assert!((ab.one_norm() - (a.one_norm() + b.one_norm())).abs() < 1e-15);
        let total: f64 = ab.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_evolution_of_eigenstate() {
        let h = Hamiltonian::from_pairs([(1.0, "Z")]).unwrap();
        let psi0 = StateVector::zero_state(1);
        let z = Observable::z(1, 0).unwrap();
        for t in [0.0, 0.4, 2.5] {
            let psi = exact_evolution(&h, t, &psi0).unwrap();
            let want = Complex64::from_polar(1.0, -t);
            assert!((psi.amplitudes()[0] - want).norm() < 1e-12);
            assert!((z.expectation(&psi).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_evolution_is_identity_at_zero() {
        let h = build_heisenberg_xyz(3, 1.0, 0.5, 0.8).unwrap();
        let psi0 = StateVector::from_bitstring("010").unwrap();
        let psi = exact_evolution(&h, 0.0, &psi0).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(psi0.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn z_expectation_on_basis_states() {
        let z0 = Observable::z(6, 0).unwrap();
        let up = StateVector::from_bitstring("000000").unwrap();
        let down = StateVector::from_bitstring("100000").unwrap();
        assert_eq!(z0.expectation(&up).unwrap(), 1.0);
        assert_eq!(z0.expectation(&down).unwrap(), -1.0);
        assert!(z0.expectation(&StateVector::zero_state(5)).is_err());
    }
}
