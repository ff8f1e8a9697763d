use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{build_heisenberg_xyz, Hamiltonian, Observable};
use crate::mlmc::VarianceMode;
use crate::pauli::{PauliString, StateVector};
use crate::qdrift::Readout;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HamiltonianSpec {
    HeisenbergXyz {
        num_qubits: usize,
        jx: f64,
        jy: f64,
        jz: f64,
    },
    /// Explicit `(coefficient, Pauli string)` pairs.
    PauliSum { terms: Vec<(f64, String)> },
}

impl HamiltonianSpec {
    pub fn build(&self) -> Result<Hamiltonian> {
        match self {
            Self::HeisenbergXyz { num_qubits, jx, jy, jz } => build_heisenberg_xyz(*num_qubits, *jx, *jy, *jz),
            Self::PauliSum { terms } => Hamiltonian::from_pairs(terms.iter().map(|(c, s)| (*c, s.as_str()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig1Config {
    /// Levels `0..levels`.
    pub levels: usize,
    /// First level used in the slope fits.
    pub fit_min_level: usize,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self {
            levels: 8,
            fit_min_level: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Config {
    pub min_level: usize,
    pub max_level: usize,
    /// Per-level sample counts; empty means a linear ramp from
    /// `samples_first` down to `samples_last`.
    pub samples: Vec<u64>,
    pub samples_first: u64,
    pub samples_last: u64,
    /// `c` in `ζ = c/√τ`.
    pub zeta_scale: f64,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self {
            min_level: 1,
            max_level: 5,
            samples: Vec::new(),
            samples_first: 300,
            samples_last: 80,
            zeta_scale: 1.0,
        }
    }
}

impl Fig2Config {
    pub fn schedule(&self) -> Vec<u64> {
        if !self.samples.is_empty() {
            return self.samples.clone();
        }
        let k = self.max_level.saturating_sub(self.min_level);
        (0..=k)
            .map(|i| {
                if k == 0 {
                    self.samples_first
                } else {
                    let f = i as f64 / k as f64;
                    let v = self.samples_first as f64 + f * (self.samples_last as f64 - self.samples_first as f64);
                    v.round() as u64
                }
            })
            .collect()
    }
}

/// Per-level sample cost used in the modelled MLMC gate count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostConvention {
    /// `C₀ = N₀`, `C_ℓ = N_ℓ + N_{ℓ−1}`.
    #[default]
    Coupled,
    /// `C_ℓ = N_ℓ`, charging only the fine circuit. Diagnostic.
    FineOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig3Config {
    /// Levels `fit_min_level..` enter the `c_p` fit.
    pub fit_min_level: usize,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_points: usize,
    pub speedup_eps: Vec<f64>,
    pub cost_convention: CostConvention,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Self {
            fit_min_level: 3,
            eps_min: 1e-5,
            eps_max: 1e-1,
            eps_points: 60,
            speedup_eps: vec![1e-2, 1e-3, 1e-4],
            cost_convention: CostConvention::Coupled,
        }
    }
}

impl Fig3Config {
    /// Log-spaced, ascending.
    pub fn eps_grid(&self) -> Vec<f64> {
        let n = self.eps_points;
        let (a, b) = (self.eps_min.log10(), self.eps_max.log10());
        (0..n)
            .map(|k| {
                if n == 1 {
                    self.eps_min
                } else {
                    10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlmcRunConfig {
    pub eps: f64,
    pub pilot: u64,
    pub variance_mode: VarianceMode,
    pub readout: Readout,
    pub max_level: Option<usize>,
    pub bias_constant: Option<f64>,
}

impl Default for MlmcRunConfig {
    fn default() -> Self {
        Self {
            eps: 0.05,
            pilot: 200,
            variance_mode: VarianceMode::Pilot,
            readout: Readout::Expectation,
            max_level: None,
            bias_constant: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QDriftRunConfig {
    pub depth: usize,
    pub samples: usize,
    pub readout: Readout,
}

impl Default for QDriftRunConfig {
    fn default() -> Self {
        Self {
            depth: 1024,
            samples: 1000,
            readout: Readout::Expectation,
        }
    }
}

/// Everything the figure pipelines and run commands need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub hamiltonian: HamiltonianSpec,
    pub t: f64,
    pub n0: usize,
    /// Computational-basis bitstring, qubit 0 first. All zeros if absent.
    #[serde(default)]
    pub initial_state: Option<String>,
    /// Pauli observable; `Z` on qubit 0 if absent.
    #[serde(default)]
    pub observable: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub fig1: Fig1Config,
    #[serde(default)]
    pub fig2: Fig2Config,
    #[serde(default)]
    pub fig3: Fig3Config,
    #[serde(default)]
    pub mlmc: MlmcRunConfig,
    #[serde(default)]
    pub qdrift: QDriftRunConfig,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    /// The six-site chain of the reference experiments.
    pub fn heisenberg6() -> Self {
        Self {
            hamiltonian: HamiltonianSpec::HeisenbergXyz {
                num_qubits: 6,
                jx: 1.0,
                jy: 0.5,
                jz: 0.8,
            },
            t: 1.0,
            n0: 128,
            initial_state: None,
            observable: None,
            seed: 42,
            output_dir: default_out(),
            fig1: Fig1Config::default(),
            fig2: Fig2Config::default(),
            fig3: Fig3Config::default(),
            mlmc: MlmcRunConfig::default(),
            qdrift: QDriftRunConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.t > 0.0) || !self.t.is_finite() {
            return bad(format!("t must be positive, got {}", self.t));
        }
        if self.n0 == 0 {
            return bad("n0 must be at least 1".into());
        }
        if self.fig1.levels < 2 || self.fig1.fit_min_level + 2 > self.fig1.levels {
            return bad("fig1 needs at least two levels to fit".into());
        }
        let f2 = &self.fig2;
        if f2.min_level == 0 || f2.max_level < f2.min_level {
            return bad("fig2 levels must satisfy 1 ≤ min_level ≤ max_level".into());
        }
        let sched = f2.schedule();
        if sched.len() != f2.max_level - f2.min_level + 1 || sched.contains(&0) {
            return bad("fig2 sample schedule must list one positive count per level".into());
        }
        if !(f2.zeta_scale > 0.0) {
            return bad("fig2 zeta_scale must be positive".into());
        }
        let f3 = &self.fig3;
        if !(f3.eps_min > 0.0 && f3.eps_max > f3.eps_min) || f3.eps_points < 2 {
            return bad("fig3 ε grid must satisfy 0 < eps_min < eps_max with ≥ 2 points".into());
        }
        if f3.fit_min_level >= self.fig1.levels {
            return bad("fig3 fit_min_level exceeds the fig1 levels".into());
        }
        if !(self.mlmc.eps > 0.0) || self.mlmc.pilot < 2 {
            return bad("mlmc needs eps > 0 and pilot ≥ 2".into());
        }
        if self.qdrift.depth == 0 || self.qdrift.samples == 0 {
            return bad("qdrift depth and samples must be positive".into());
        }
        Ok(())
    }

    pub fn build_hamiltonian(&self) -> Result<Hamiltonian> {
        self.hamiltonian.build()
    }

    pub fn build_initial_state(&self, num_qubits: usize) -> Result<StateVector> {
        match &self.initial_state {
            Some(bits) => {
                let psi = StateVector::from_bitstring(bits)?;
                if psi.num_qubits() != num_qubits {
                    return Err(Error::Config(format!(
                        "initial state has {} qubits, Hamiltonian has {num_qubits}",
                        psi.num_qubits()
                    )));
                }
                Ok(psi)
            }
            None => Ok(StateVector::zero_state(num_qubits)),
        }
    }

    pub fn build_observable(&self, num_qubits: usize) -> Result<Observable> {
        match &self.observable {
            Some(s) => {
                let p: PauliString = s.parse()?;
                if p.num_qubits() != num_qubits {
                    return Err(Error::Config(format!(
                        "observable has {} qubits, Hamiltonian has {num_qubits}",
                        p.num_qubits()
                    )));
                }
                if p.is_identity() {
                    return Err(Error::Config("observable must not be the identity".into()));
                }
                Ok(Observable::new(p))
            }
            None => Observable::z(num_qubits, 0),
        }
    }

    /// Hamiltonian, initial state and observable together.
    pub fn problem(&self) -> Result<Problem> {
        let h = self.build_hamiltonian()?;
        let n = h.num_qubits();
        Ok(Problem {
            psi0: self.build_initial_state(n)?,
            observable: self.build_observable(n)?,
            t: self.t,
            h,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub h: Hamiltonian,
    pub psi0: StateVector,
    pub observable: Observable,
    pub t: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_is_linear() {
        assert_eq!(Fig2Config::default().schedule(), vec![300, 245, 190, 135, 80]);
    }

    #[test]
    fn grid_endpoints() {
        let g = Fig3Config::default().eps_grid();
        assert_eq!(g.len(), 60);
        assert!((g[0] - 1e-5).abs() < 1e-18);
        assert!((g[59] - 1e-1).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let cfg = ExperimentConfig::heisenberg6();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        let min = r#"{"hamiltonian":{"kind":"pauli_sum","terms":[[0.5,"XX"],[-0.2,"ZI"]]},"t":1.0,"n0":4}"#;
        let cfg = ExperimentConfig::from_json(min).unwrap();
        assert_eq!(cfg.problem().unwrap().h.num_terms(), 2);
    }

    #[test]
    fn rejects_unknown_and_missing_fields() {
        assert!(ExperimentConfig::from_json(r#"{"t":1.0,"n0":4}"#).is_err());
        let extra = r#"{"hamiltonian":{"kind":"pauli_sum","terms":[[1.0,"X"]]},"t":1.0,"n0":4,"bogus":1}"#;
        assert!(ExperimentConfig::from_json(extra).is_err());
    }
}
