//! JSON experiment configuration with explicit validation and defaulting.
//!
//! Unknown keys are rejected so typos in protocol parameters fail loudly
//! instead of silently running the wrong experiment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ObservableSpec;
use crate::hamiltonian::{build_tfim, Hamiltonian, HermitianTerm};
use crate::linalg::HermitianMatrix;
use crate::pauli::{weighted_sum, PauliString};

/// Full experiment description: model, observable, protocol, time grid,
/// evaluation mode, and the seed recorded in every output file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub observable: ObservableConfig,
    pub seed: u64,
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub t_grid: TGridConfig,
    #[serde(default)]
    pub mode: ModeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Transverse-field Ising chain, open boundaries, L = 2 grouping.
    Tfim { n: usize, j: f64, h: f64 },
    /// Explicit grouped terms given as unit-coefficient Pauli summands.
    Terms {
        n_qubits: usize,
        terms: Vec<TermConfig>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub label: String,
    pub weight: f64,
    pub paulis: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObservableConfig {
    /// Σ_i Z_i (the benchmark observable).
    #[default]
    SumZ,
    /// Explicit weighted Pauli strings.
    Paulis { paulis: Vec<(String, f64)> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolConfig {
    Exact,
    Trotter {
        order: u8,
        #[serde(default = "default_folds")]
        folds: usize,
    },
    Qdrift {
        n: usize,
    },
    Qshift {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        schedule: Option<Vec<usize>>,
    },
}

fn default_folds() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TGridConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub log_spaced: bool,
}

impl Default for TGridConfig {
    /// The benchmark window: 12 log-spaced points in [0.02, 0.4], chosen
    /// to stay inside the small-t asymptotic regime (λt ≤ 0.44 for the
    /// benchmark weights) while keeping all protocols above the round-off
    /// noise floor.
    fn default() -> Self {
        Self {
            min: 0.02,
            max: 0.4,
            count: 12,
            log_spaced: true,
        }
    }
}

impl TGridConfig {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = self.count as f64 - 1.0;
        (0..self.count)
            .map(|i| {
                let frac = i as f64 / n;
                if self.log_spaced {
                    (self.min.ln() + frac * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + frac * (self.max - self.min)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    #[default]
    Ensemble,
    MonteCarlo {
        samples: usize,
        #[serde(default)]
        measurement: MeasurementConfig,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementConfig {
    #[default]
    Exact,
    Shots {
        k: usize,
    },
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match &self.model {
            ModelConfig::Tfim { n, j, h } => {
                if !(2..=12).contains(n) {
                    return Err(Error::Config(format!(
                        "tfim n must be in 2..=12, got {n}"
                    )));
                }
                if !(*j > 0.0) || !(*h > 0.0) {
                    return Err(Error::Config("tfim couplings must be positive".into()));
                }
            }
            ModelConfig::Terms { n_qubits, terms } => {
                if !(1..=12).contains(n_qubits) {
                    return Err(Error::Config(format!(
                        "n_qubits must be in 1..=12, got {n_qubits}"
                    )));
                }
                if terms.is_empty() {
                    return Err(Error::Config("term list must be nonempty".into()));
                }
            }
        }
        match &self.protocol {
            ProtocolConfig::Trotter { order, folds } => {
                if *order != 1 && *order != 2 {
                    return Err(Error::Config(format!(
                        "trotter order must be 1 or 2, got {order}"
                    )));
                }
                if *folds == 0 {
                    return Err(Error::Config("trotter folds must be at least 1".into()));
                }
            }
            ProtocolConfig::Qdrift { n } => {
                if *n == 0 {
                    return Err(Error::Config("qdrift N must be at least 1".into()));
                }
            }
            ProtocolConfig::Qshift { n, r, schedule } => match (n, r, schedule) {
                (Some(n), Some(r), None) => {
                    if *r == 0 || *n == 0 || n % r != 0 {
                        return Err(Error::Config(format!(
                            "qshift needs positive N divisible by r, got N={n}, r={r}"
                        )));
                    }
                }
                (None, None, Some(s)) => {
                    if s.is_empty() || s.iter().any(|&x| x == 0) {
                        return Err(Error::Config(
                            "qshift schedule entries must be positive".into(),
                        ));
                    }
                }
                _ => {
                    return Err(Error::Config(
                        "qshift takes either {n, r} or {schedule}, not both".into(),
                    ))
                }
            },
            ProtocolConfig::Exact => {}
        }
        let g = &self.t_grid;
        if g.count == 0 {
            return Err(Error::Config("t_grid count must be at least 1".into()));
        }
        if g.min > g.max {
            return Err(Error::Config("t_grid min must not exceed max".into()));
        }
        if g.log_spaced && !(g.min > 0.0) {
            return Err(Error::Config(
                "log-spaced t_grid needs min > 0 (use a linear grid to include t = 0)".into(),
            ));
        }
        if !g.log_spaced && g.min < 0.0 {
            return Err(Error::Config("t_grid min must be nonnegative".into()));
        }
        if let ModeConfig::MonteCarlo {
            samples,
            measurement,
        } = &self.mode
        {
            if *samples == 0 {
                return Err(Error::Config("samples must be at least 1".into()));
            }
            if let MeasurementConfig::Shots { k: 0 } = measurement {
                return Err(Error::Config("shot count must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Instantiate the Hamiltonian.
    pub fn build_hamiltonian(&self) -> Result<Hamiltonian> {
        match &self.model {
            ModelConfig::Tfim { n, j, h } => build_tfim(*n, *j, *h),
            ModelConfig::Terms { n_qubits, terms } => {
                let built = terms
                    .iter()
                    .map(|t| {
                        let summands = t
                            .paulis
                            .iter()
                            .map(|s| PauliString::parse(s))
                            .collect::<Result<Vec<_>>>()?;
                        HermitianTerm::from_pauli_summands(
                            t.label.clone(),
                            t.weight,
                            *n_qubits,
                            summands,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                Hamiltonian::new(built)
            }
        }
    }

    pub fn n_qubits(&self) -> usize {
        match &self.model {
            ModelConfig::Tfim { n, .. } => *n,
            ModelConfig::Terms { n_qubits, .. } => *n_qubits,
        }
    }

    /// Instantiate the observable.
    pub fn build_observable(&self) -> Result<ObservableSpec> {
        let n = self.n_qubits();
        match &self.observable {
            ObservableConfig::SumZ => ObservableSpec::sum_z(n),
            ObservableConfig::Paulis { paulis } => {
                let parsed = paulis
                    .iter()
                    .map(|(s, w)| PauliString::parse(s).map(|p| (p, *w)))
                    .collect::<Result<Vec<_>>>()?;
                let m = weighted_sum(n, &parsed)?;
                Ok(ObservableSpec::new("paulis", HermitianMatrix::new(m)?))
            }
        }
    }
}
