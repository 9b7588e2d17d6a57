use serde::{Deserialize, Serialize};

use super::fit::{CircuitTimeFit, UnitScale};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantumCostParams {
    /// Population fields (`N_v`).
    pub n_v: u32,
    pub n_shot: u64,
    /// Cost evaluations per optimiser iteration (`N_f`).
    pub n_f: u32,
    /// Small multi-product circuits.
    pub n_ps: u32,
    /// Large multi-product circuits.
    pub n_pl: u32,
    /// Mean iterations per qubit: `N_i = iter_slope * N_q`.
    pub iter_slope: f64,
    /// Reading of the published coefficients.
    pub unit_scale: UnitScale,
}

impl Default for QuantumCostParams {
    fn default() -> Self {
        Self {
            n_v: 9,
            n_shot: 10_000,
            n_f: 2,
            n_ps: 9,
            n_pl: 45,
            iter_slope: 125.0,
            unit_scale: UnitScale::Seconds,
        }
    }
}

impl QuantumCostParams {
    /// Multi-product circuits per cost evaluation (`N_p`).
    pub fn n_p(&self) -> u32 {
        self.n_ps + self.n_pl
    }

    pub fn mean_iterations(&self, n_q: u32) -> f64 {
        self.iter_slope * n_q as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_v == 0 || self.n_shot == 0 || self.n_f == 0 || !(self.iter_slope > 0.0) {
            return Err(Error::Config(
                "quantum cost parameters must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// IonQ small-circuit time in seconds.
pub fn ionq_small_time(n_q: u32) -> f64 {
    if n_q == 0 {
        log::warn!("ionq_small_time called with n_q = 0");
    }
    CircuitTimeFit::ionq_small().seconds(n_q as f64)
}

fn clamped_seconds(fit: &CircuitTimeFit, n_q: u32, label: &str) -> f64 {
    let t = fit.seconds(n_q as f64);
    if t < 0.0 {
        log::warn!("{label} circuit fit is negative ({t:e} s) at n_q = {n_q}; clamped to 0");
        0.0
    } else {
        t
    }
}

/// Quantum wall time per LBM step, in seconds.
pub fn tq_per_step(
    n_q: u32,
    params: &QuantumCostParams,
    small: &CircuitTimeFit,
    large: &CircuitTimeFit,
) -> f64 {
    let t_ps = clamped_seconds(small, n_q, "small");
    let t_pl = clamped_seconds(large, n_q, "large");
    params.n_v as f64
        * params.mean_iterations(n_q)
        * params.n_f as f64
        * params.n_shot as f64
        * (params.n_ps as f64 * t_ps + params.n_pl as f64 * t_pl)
}

/// [`tq_per_step`] with the published IBM coefficients read in `params.unit_scale`.
pub fn tq_published(n_q: u32, params: &QuantumCostParams) -> f64 {
    tq_per_step(
        n_q,
        params,
        &CircuitTimeFit::published_small(params.unit_scale),
        &CircuitTimeFit::published_large(params.unit_scale),
    )
}

/// Unsimplified form: `sum_v N_iv N_f sum_p N_shot t_pv`, with
/// `circuit_times[v][p]` in seconds.
pub fn tq_full_sum(
    iterations: &[f64],
    n_f: u32,
    n_shot: u64,
    circuit_times: &[Vec<f64>],
) -> Result<f64> {
    if iterations.len() != circuit_times.len() {
        return Err(Error::LengthMismatch {
            expected: iterations.len(),
            got: circuit_times.len(),
        });
    }
    Ok(iterations
        .iter()
        .zip(circuit_times)
        .map(|(n_i, times)| n_i * n_f as f64 * times.iter().map(|t| n_shot as f64 * t).sum::<f64>())
        .sum())
}
