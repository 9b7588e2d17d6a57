use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::engine::{
    oracle_budget, vqcfd_step, ConvergenceTrace, StartMode, StepMode, StepOptions,
};
use super::field::VariationalField;
use super::spsa::SpsaConfig;
use crate::lattice::{BoundarySpec, LatticeState, MacroFields};
use crate::quantum::{GradientBudget, ShotModel, TrainMethod};
use crate::{Error, Result};

/// Largest register the harness accepts per field.
const MAX_VERIFY_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Uniform density, fluid at rest.
    Rest,
    /// `u_x(y) = u0 sin(2 pi y / ny)` on a periodic box.
    Shear { u0: f64 },
}

impl InitialCondition {
    pub fn state(&self, nx: usize, ny: usize, tau: f64) -> Result<LatticeState> {
        let mut m = MacroFields::uniform(nx, ny, 1.0, [0.0, 0.0]);
        if let InitialCondition::Shear { u0 } = *self {
            for y in 0..ny {
                let u = u0 * (2.0 * std::f64::consts::PI * y as f64 / ny as f64).sin();
                for x in 0..nx {
                    let i = m.index(x, y);
                    m.ux[i] = u;
                }
            }
        }
        LatticeState::from_macros(&m, tau)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub nx: usize,
    pub ny: usize,
    pub tau: f64,
    pub steps: usize,
    pub layers: usize,
    pub initial: InitialCondition,
    pub mode: StepMode,
    pub start: StartMode,
    pub spsa_iters: usize,
    /// Perturbation size `c`.
    pub spsa_c: f64,
    /// Initial parameter step the gain calibration aims for, in radians.
    pub spsa_target_step: f64,
    pub shots: Option<u64>,
    pub seed: u64,
    /// Pass threshold on the gap metric; defaults to 0.05 without shot
    /// noise and 0.15 with it.
    pub max_gap: Option<f64>,
    /// Lower bound, allowing for the oracle being beaten slightly.
    pub min_gap: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            nx: 4,
            ny: 4,
            tau: 0.8,
            steps: 3,
            layers: 8,
            initial: InitialCondition::Shear { u0: 0.05 },
            mode: StepMode::Variational,
            start: StartMode::Cold,
            spsa_iters: 1000,
            spsa_c: 0.1,
            spsa_target_step: 0.05,
            shots: None,
            seed: 0,
            max_gap: None,
            min_gap: -0.01,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        let n_qubits = VariationalField::qubits_for(self.nx, self.ny)?;
        if n_qubits > MAX_VERIFY_QUBITS {
            return Err(Error::TooManyQubits {
                requested: n_qubits,
                limit: MAX_VERIFY_QUBITS,
            });
        }
        if self.layers == 0 {
            return Err(Error::Config("layers must be positive".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::Config("shots must be positive".into()));
        }
        if !(self.gap_threshold() >= self.min_gap) {
            return Err(Error::Config("max_gap must be at least min_gap".into()));
        }
        Ok(())
    }

    pub fn gap_threshold(&self) -> f64 {
        self.max_gap
            .unwrap_or(if self.shots.is_some() { 0.15 } else { 0.05 })
    }

    pub fn step_options(&self) -> Result<StepOptions> {
        let mut spsa = SpsaConfig::with_budget(self.spsa_iters, self.seed);
        spsa.c = self.spsa_c;
        spsa.validate()?;
        let shots = self
            .shots
            .map(|n| ShotModel::new(n, self.seed))
            .transpose()?;
        Ok(StepOptions {
            mode: self.mode,
            spsa,
            shots,
            start: self.start,
            target_step: self.spsa_target_step,
            oracle: Some(oracle_budget(self.spsa_iters, self.seed)),
            ..StepOptions::default()
        })
    }
}

/// Gap statistics for one trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub step: usize,
    pub variable: usize,
    pub iterations: usize,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub exact_min: f64,
    pub gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    /// `traces[step][variable]`, steps counted from 1.
    #[serde(skip)]
    pub traces: Vec<Vec<ConvergenceTrace>>,
    pub summaries: Vec<TraceSummary>,
    pub max_gap: f64,
    pub pass: bool,
    /// Largest deviation of the decoded fields from the classical run.
    pub max_field_error: f64,
}

impl VerifyReport {
    pub fn n_traces(&self) -> usize {
        self.traces.iter().map(Vec::len).sum()
    }
}

/// Runs `steps` encoded time steps and scores every per-variable trace
/// against the exact-minimum line.
pub fn verify_convergence(cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let boundary = BoundarySpec::periodic();
    let initial = cfg.initial.state(cfg.nx, cfg.ny, cfg.tau)?;
    let mut field = match cfg.mode {
        StepMode::Algebraic => VariationalField::encode_exact(&initial, cfg.layers)?,
        StepMode::Variational => VariationalField::encode(
            &initial,
            cfg.layers,
            &TrainMethod::Gradient(GradientBudget {
                seed: cfg.seed,
                ..GradientBudget::default()
            }),
        )?,
    };
    let mut opts = cfg.step_options()?;
    let mut classical = initial;
    let mut traces = Vec::with_capacity(cfg.steps);
    let mut summaries = Vec::new();
    let mut max_field_error: f64 = 0.0;

    for step in 1..=cfg.steps {
        opts.spsa.seed = cfg.seed.wrapping_add(step as u64);
        if let Some(shots) = opts.shots.as_mut() {
            *shots = shots.with_seed(cfg.seed.wrapping_add(step as u64));
        }
        let (next, step_traces) = vqcfd_step(&field, &boundary, &opts)?;
        field = next;
        classical = crate::lattice::step(&classical, &boundary)?;
        let decoded = field.decode()?;
        for v in 0..9 {
            for (a, b) in decoded.field(v).iter().zip(classical.field(v)) {
                max_field_error = max_field_error.max((a - b).abs());
            }
        }
        for t in &step_traces {
            let exact_min = t.exact_min.unwrap_or(0.0);
            let gap = t.gap().unwrap_or(0.0);
            log::debug!("step {step} v {}: gap {gap:.4}", t.variable);
            summaries.push(TraceSummary {
                step,
                variable: t.variable,
                iterations: t.costs.len(),
                initial_cost: t.initial_cost,
                final_cost: t.final_cost,
                exact_min,
                gap,
                pass: gap >= cfg.min_gap && gap <= cfg.gap_threshold(),
            });
        }
        traces.push(step_traces);
    }

    let max_gap = summaries
        .iter()
        .map(|s| s.gap)
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = summaries.iter().all(|s| s.pass);
    Ok(VerifyReport {
        config: cfg.clone(),
        traces,
        summaries,
        max_gap,
        pass,
        max_field_error,
    })
}

/// Writes `step,variable,iteration,cost,exact_min`.
pub fn write_trace_csv<W: Write>(report: &VerifyReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "variable", "iteration", "cost", "exact_min"])?;
    for (s, step_traces) in report.traces.iter().enumerate() {
        for t in step_traces {
            let exact_min = t.exact_min.unwrap_or(f64::NAN);
            for (k, c) in t.costs.iter().enumerate() {
                w.write_record(&[
                    (s + 1).to_string(),
                    t.variable.to_string(),
                    k.to_string(),
                    c.to_string(),
                    exact_min.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Convenience wrapper writing the trace CSV to a file.
pub fn write_trace_file(report: &VerifyReport, path: &Path) -> Result<()> {
    write_trace_csv(report, std::fs::File::create(path)?)
}
