//! Quantum-to-classical time ratio per LBM step, and grid sweeps of it.
//!
//! Both sides advance the same number of steps, so the per-step ratio is the
//! ratio of whole-simulation times.

use std::io::Write;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::cperf::{optimal_nodes, CollisionFormula, HardwareSpec};
use crate::qperf::{
    fit_linear, fit_quadratic, tq_per_step, CircuitTimeFit, QuantumCostParams, TimingRecord,
    UnitScale,
};
use crate::{Error, Result};

/// Grid size of the headline comparison.
pub const Q5E7_GRID: f64 = 5e7;

/// Qubits per field: `ceil(log2 grid)`, tolerant of the 3-digit rounding in
/// the timing tables (65,500 maps to 16).
pub fn n_qubits_for_grid(grid: f64) -> u32 {
    let l = grid.log2();
    let nearest = l.round();
    if (l - nearest).abs() < 1e-2 {
        nearest.max(0.0) as u32
    } else {
        l.ceil().max(0.0) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverModels {
    pub params: QuantumCostParams,
    pub small: CircuitTimeFit,
    pub large: CircuitTimeFit,
    pub hardware: HardwareSpec,
    pub formula: CollisionFormula,
    pub max_nodes: u32,
}

impl CrossoverModels {
    /// Published IBM coefficients read in `unit_scale`, default hardware.
    pub fn published(unit_scale: UnitScale) -> Self {
        let hardware = HardwareSpec::default();
        Self {
            params: QuantumCostParams {
                unit_scale,
                ..QuantumCostParams::default()
            },
            small: CircuitTimeFit::published_small(unit_scale),
            large: CircuitTimeFit::published_large(unit_scale),
            max_nodes: hardware.cluster.n_nodes_max,
            hardware,
            formula: CollisionFormula::Cohort,
        }
    }

    /// Same, with the circuit times refitted to the bundled tables.
    pub fn refit(small: &[TimingRecord], large: &[TimingRecord]) -> Result<Self> {
        Ok(Self {
            small: fit_linear(small)?,
            large: fit_quadratic(large)?,
            ..Self::published(UnitScale::TableUnits)
        })
    }

    pub fn node_range(&self) -> RangeInclusive<u32> {
        1..=self.max_nodes
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSource {
    Model,
    /// Measured small-circuit time for this run.
    SmallRun(u32),
    /// Measured large-circuit time for this run.
    LargeRun(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub source: RowSource,
    pub grid: f64,
    pub n_q: u32,
    pub t_quantum: f64,
    pub n_nodes_opt: u32,
    pub t_classical: f64,
    pub ratio: f64,
}

fn classical(grid: f64, models: &CrossoverModels) -> Result<(u32, f64)> {
    let best = optimal_nodes(grid, &models.hardware, models.formula, models.node_range())?;
    Ok((best.n_nodes, best.t_step))
}

fn row(
    source: RowSource,
    grid: f64,
    n_q: u32,
    t_quantum: f64,
    models: &CrossoverModels,
) -> Result<CrossoverRow> {
    let (n_nodes_opt, t_classical) = classical(grid, models)?;
    Ok(CrossoverRow {
        source,
        grid,
        n_q,
        t_quantum,
        n_nodes_opt,
        t_classical,
        ratio: t_quantum / t_classical,
    })
}

/// `t_q(n_q) / t_c*(grid)` at the classical optimum.
pub fn q_ratio(grid: f64, models: &CrossoverModels) -> Result<CrossoverRow> {
    if !(grid >= 1.0) {
        return Err(Error::Config(format!(
            "grid size {grid} must be at least 1"
        )));
    }
    let n_q = n_qubits_for_grid(grid);
    let t_q = tq_per_step(n_q, &models.params, &models.small, &models.large);
    row(RowSource::Model, grid, n_q, t_q, models)
}

/// Row for one measured circuit: that circuit class uses the measured time,
/// the other class its fit.
fn overlay(record: &TimingRecord, large: bool, models: &CrossoverModels) -> Result<CrossoverRow> {
    let measured = CircuitTimeFit {
        coefficients: vec![record.runtime_seconds(), 0.0],
        unit_scale: UnitScale::Seconds,
        ..CircuitTimeFit::published_small(UnitScale::Seconds)
    };
    let (small, big, source) = if large {
        (&models.small, &measured, RowSource::LargeRun(record.run_no))
    } else {
        (&measured, &models.large, RowSource::SmallRun(record.run_no))
    };
    let t_q = tq_per_step(record.n_q, &models.params, small, big);
    row(source, record.grid_size, record.n_q, t_q, models)
}

/// One model row per grid, then one overlay row per timing record.
pub fn sweep(
    grids: &[f64],
    models: &CrossoverModels,
    small_records: &[TimingRecord],
    large_records: &[TimingRecord],
) -> Result<Vec<CrossoverRow>> {
    let mut rows = grids
        .iter()
        .map(|&g| q_ratio(g, models))
        .collect::<Result<Vec<_>>>()?;
    if !grids.is_empty() {
        for r in small_records {
            rows.push(overlay(r, false, models)?);
        }
        for r in large_records {
            rows.push(overlay(r, true, models)?);
        }
    }
    Ok(rows)
}

pub const CROSSOVER_HEADER: [&str; 8] = [
    "source",
    "run_no",
    "grid",
    "n_q",
    "t_quantum",
    "n_nodes_opt",
    "t_classical",
    "ratio",
];

pub fn write_crossover_csv<W: Write>(rows: &[CrossoverRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CROSSOVER_HEADER)?;
    for r in rows {
        let (source, run) = match r.source {
            RowSource::Model => ("model", String::new()),
            RowSource::SmallRun(n) => ("small_run", n.to_string()),
            RowSource::LargeRun(n) => ("large_run", n.to_string()),
        };
        w.write_record([
            source.to_string(),
            run,
            r.grid.to_string(),
            r.n_q.to_string(),
            r.t_quantum.to_string(),
            r.n_nodes_opt.to_string(),
            r.t_classical.to_string(),
            r.ratio.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One reading of the quantum circuit-time fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Q5e7Reading {
    pub label: String,
    pub unit_scale: UnitScale,
    pub small_coefficients: Vec<f64>,
    pub large_coefficients: Vec<f64>,
    pub t_small: f64,
    pub t_large: f64,
    pub t_quantum: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Q5e7Report {
    pub grid: f64,
    pub n_q: u32,
    pub n_nodes_opt: u32,
    pub t_classical: f64,
    pub classical_mlups: f64,
    /// The reading selected by the configured unit scale.
    pub selected: String,
    pub ratio: f64,
    pub readings: Vec<Q5e7Reading>,
    pub upper_bound: bool,
    pub note: String,
}

fn reading(label: &str, models: &CrossoverModels, n_q: u32, t_classical: f64) -> Q5e7Reading {
    let t_quantum = tq_per_step(n_q, &models.params, &models.small, &models.large);
    Q5e7Reading {
        label: label.to_string(),
        unit_scale: models.small.unit_scale,
        small_coefficients: models.small.coefficients.clone(),
        large_coefficients: models.large.coefficients.clone(),
        t_small: models.small.seconds(n_q as f64),
        t_large: models.large.seconds(n_q as f64),
        t_quantum,
        ratio: t_quantum / t_classical,
    }
}

/// Ratio at fifty million points under both unit readings of the published
/// fits and under the refit. `base` supplies the hardware, parameters and
/// selected unit scale.
pub fn q5e7_report(
    base: &CrossoverModels,
    small_records: &[TimingRecord],
    large_records: &[TimingRecord],
) -> Result<Q5e7Report> {
    let n_q = n_qubits_for_grid(Q5E7_GRID);
    let (n_nodes_opt, t_classical) = classical(Q5E7_GRID, base)?;
    let variant = |unit: UnitScale| CrossoverModels {
        params: QuantumCostParams {
            unit_scale: unit,
            ..base.params
        },
        small: CircuitTimeFit::published_small(unit),
        large: CircuitTimeFit::published_large(unit),
        ..base.clone()
    };
    let mut readings = vec![
        reading(
            "published-seconds",
            &variant(UnitScale::Seconds),
            n_q,
            t_classical,
        ),
        reading(
            "published-table-units",
            &variant(UnitScale::TableUnits),
            n_q,
            t_classical,
        ),
    ];
    if !small_records.is_empty() && !large_records.is_empty() {
        let refit = CrossoverModels {
            small: fit_linear(small_records)?,
            large: fit_quadratic(large_records)?,
            ..base.clone()
        };
        readings.push(reading("refit-table-units", &refit, n_q, t_classical));
    }
    let selected = match base.params.unit_scale {
        UnitScale::Seconds => "published-seconds",
        UnitScale::TableUnits => "published-table-units",
    };
    let ratio = readings
        .iter()
        .find(|r| r.label == selected)
        .map(|r| r.ratio)
        .unwrap_or(f64::NAN);
    Ok(Q5e7Report {
        grid: Q5E7_GRID,
        n_q,
        n_nodes_opt,
        t_classical,
        classical_mlups: crate::cperf::mlups(Q5E7_GRID, t_classical),
        selected: selected.to_string(),
        ratio,
        readings,
        upper_bound: true,
        note: "Upper bound: unoptimised circuit timings against an optimised classical step \
               model; per-step ratio equals the whole-simulation ratio."
            .to_string(),
    })
}
