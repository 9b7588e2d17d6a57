use serde::{Deserialize, Serialize};

use crate::lattice::LatticeState;
use crate::quantum::{norm, real_amplitudes, train_pqc_from, AnsatzConfig, TrainMethod};
use crate::{Error, Result};

/// Classical handle on one encoded population field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableEncoding {
    pub theta: Vec<f64>,
    pub scale: f64,
    /// Verbatim field kept by the algebraic mode; when present it is what
    /// [`VariationalField::decode`] returns.
    pub exact: Option<Vec<f64>>,
}

impl VariableEncoding {
    pub fn decode(&self, ansatz: &AnsatzConfig) -> Result<Vec<f64>> {
        if let Some(exact) = &self.exact {
            return Ok(exact.clone());
        }
        Ok(real_amplitudes(&self.theta, ansatz)?
            .into_iter()
            .map(|a| self.scale * a)
            .collect())
    }
}

/// Nine encoded fields on an `nx` by `ny` grid with `nx * ny = 2^n_qubits`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalField {
    pub nx: usize,
    pub ny: usize,
    pub tau: f64,
    pub ansatz: AnsatzConfig,
    pub vars: Vec<VariableEncoding>,
}

impl VariationalField {
    /// Qubits needed for a grid, failing unless `nx * ny` is a power of two.
    pub fn qubits_for(nx: usize, ny: usize) -> Result<usize> {
        let n = nx * ny;
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        Ok(n.trailing_zeros() as usize)
    }

    /// Encodes every population field of `state` by training the ansatz.
    pub fn encode(state: &LatticeState, layers: usize, method: &TrainMethod) -> Result<Self> {
        let n_qubits = Self::qubits_for(state.nx(), state.ny())?;
        let ansatz = AnsatzConfig::new(n_qubits, layers)?;
        let vars = (0..9)
            .map(|v| {
                let fit = train_pqc_from(state.field(v), &ansatz, method, None)?;
                Ok(VariableEncoding {
                    scale: fit.scale * fit.overlap,
                    theta: fit.theta,
                    exact: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            nx: state.nx(),
            ny: state.ny(),
            tau: state.tau(),
            ansatz,
            vars,
        })
    }

    /// Stores the fields verbatim (algebraic mode) with zero angles.
    pub fn encode_exact(state: &LatticeState, layers: usize) -> Result<Self> {
        let n_qubits = Self::qubits_for(state.nx(), state.ny())?;
        let ansatz = AnsatzConfig::new(n_qubits, layers)?;
        let vars = (0..9)
            .map(|v| VariableEncoding {
                theta: vec![0.0; ansatz.n_params()],
                scale: norm(state.field(v)),
                exact: Some(state.field(v).to_vec()),
            })
            .collect();
        Ok(Self {
            nx: state.nx(),
            ny: state.ny(),
            tau: state.tau(),
            ansatz,
            vars,
        })
    }

    pub fn decode_field(&self, v: usize) -> Result<Vec<f64>> {
        self.vars[v].decode(&self.ansatz)
    }

    pub fn decode(&self) -> Result<LatticeState> {
        let fields: Vec<Vec<f64>> = (0..9)
            .map(|v| self.decode_field(v))
            .collect::<Result<_>>()?;
        let fields: [Vec<f64>; 9] = fields.try_into().expect("nine fields");
        LatticeState::from_fields(self.nx, self.ny, self.tau, fields)
    }

    /// Classical numbers carried per variable (angles plus scale), which
    /// grows with `log2(nx * ny)`.
    pub fn parameters_per_variable(&self) -> usize {
        self.ansatz.n_params() + 1
    }
}
