//! qDRIFT randomized Hamiltonian simulation with an index-sharing multilevel
//! Monte Carlo estimator.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`] — Pauli strings and the `exp(-iθP)` kernels on statevectors
//!   and density matrices.
//! * [`hamiltonian`] — weighted Pauli sums, the sampling distribution and the
//!   dense reference evolution.
//! * [`qdrift`] — single-level qDRIFT: sequence sampling, trajectories, the
//!   averaged channel and the standard cost model.
//! * [`mlmc`] — level hierarchy, coupled fine/coarse sampling, optimal sample
//!   allocation and the cost/crossover models.
//! * [`augmented`] — the scaled difference-state construction that recovers a
//!   level correction from a single block observable.
//! * [`experiment`] — pipelines reproducing the variance-decay, shot-noise and
//!   gate-complexity studies on the Heisenberg XYZ chain.

pub mod augmented;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod mlmc;
pub mod parallel;
pub mod pauli;
pub mod qdrift;
pub mod rng;

pub use error::{Error, Result};
pub use hamiltonian::{Hamiltonian, HamiltonianTerm, Observable};
pub use pauli::{DensityMatrix, Pauli, PauliString, StateVector};
pub use rng::RngStream;

pub use num_complex::Complex64;
