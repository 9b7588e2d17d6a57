use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hardware::{ClusterSpec, GpuSpec, HardwareSpec, KernelProfile};
use crate::{Error, Result};

pub const BYTES_PER_DOUBLE: f64 = 8.0;
const N_V: f64 = 9.0;
/// Neighbouring GPUs on a node.
const INTRA_NODE_LINKS: f64 = 7.0;

/// How the wavefront count enters the collision roofline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionFormula {
    /// `N_wave` batches of concurrently resident threads, roofline per batch.
    #[default]
    Cohort,
    /// `N_wave * sum max(B_k N_T/GPU / bw, F_k / flop)`, evaluated as written.
    Literal,
}

/// A grid split evenly over `n_nodes` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionState {
    pub grid: f64,
    pub n_nodes: u32,
    pub n_gpus: u64,
    /// Lattice points (threads) per GPU.
    pub threads_per_gpu: f64,
    /// Halo points per GPU, `sqrt(threads_per_gpu)` in 2D.
    pub n_bdr: f64,
}

impl DecompositionState {
    pub fn new(grid: f64, n_nodes: u32, cluster: &ClusterSpec) -> Result<Self> {
        if n_nodes == 0 || n_nodes > cluster.n_nodes_max {
            return Err(Error::Config(format!(
                "node count {n_nodes} outside 1..={}",
                cluster.n_nodes_max
            )));
        }
        let n_gpus = n_nodes as u64 * cluster.gpus_per_node as u64;
        if !(grid >= n_gpus as f64) {
            return Err(Error::Config(format!(
                "grid of {grid} points is smaller than {n_gpus} GPUs"
            )));
        }
        let threads_per_gpu = grid / n_gpus as f64;
        Ok(Self {
            grid,
            n_nodes,
            n_gpus,
            threads_per_gpu,
            n_bdr: threads_per_gpu.sqrt(),
        })
    }

    /// Batches of concurrently resident threads.
    pub fn n_wave(&self, gpu: &GpuSpec) -> f64 {
        (self.threads_per_gpu / gpu.concurrent_threads() as f64).ceil()
    }

    fn cohort(&self, gpu: &GpuSpec) -> f64 {
        self.threads_per_gpu.min(gpu.concurrent_threads() as f64)
    }
}

pub fn collision_time(
    dec: &DecompositionState,
    gpu: &GpuSpec,
    kp: &KernelProfile,
    formula: CollisionFormula,
) -> f64 {
    let (mem_threads, flop_threads) = match formula {
        CollisionFormula::Cohort => (dec.cohort(gpu), dec.cohort(gpu)),
        CollisionFormula::Literal => (dec.threads_per_gpu, 1.0),
    };
    let roof = |k: usize| {
        (kp.bytes[k] * mem_threads / gpu.bw_hbm).max(kp.flops[k] * flop_threads / gpu.flop_max)
    };
    let shared: f64 = (0..3).map(roof).sum();
    let per_population: f64 = (3..5).map(roof).sum();
    dec.n_wave(gpu) * (shared + N_V * per_population)
}

pub fn streaming_time(dec: &DecompositionState, gpu: &GpuSpec, cluster: &ClusterSpec) -> f64 {
    let hbm = 2.0 * BYTES_PER_DOUBLE * dec.threads_per_gpu / gpu.bw_hbm;
    let intra = INTRA_NODE_LINKS * BYTES_PER_DOUBLE * dec.n_bdr / cluster.bw_gpu;
    let inter = dec.n_nodes as f64 * BYTES_PER_DOUBLE * dec.n_bdr / cluster.bw_node;
    (N_V - 1.0) * hbm.max(intra).max(inter)
}

/// Million lattice updates per second.
pub fn mlups(grid: f64, t_step: f64) -> f64 {
    grid / (t_step * 1e6)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepTiming {
    pub grid: f64,
    pub n_nodes: u32,
    pub t_collision: f64,
    pub t_streaming: f64,
    pub t_step: f64,
    pub mlups: f64,
}

pub fn step_time(
    grid: f64,
    n_nodes: u32,
    spec: &HardwareSpec,
    formula: CollisionFormula,
) -> Result<StepTiming> {
    let dec = DecompositionState::new(grid, n_nodes, &spec.cluster)?;
    let needed = dec.threads_per_gpu * spec.kernels.state_bytes_per_point;
    if needed > spec.gpu.hbm_capacity {
        return Err(Error::HbmCapacity {
            needed,
            capacity: spec.gpu.hbm_capacity,
        });
    }
    let t_collision = collision_time(&dec, &spec.gpu, &spec.kernels, formula);
    let t_streaming = streaming_time(&dec, &spec.gpu, &spec.cluster);
    let t_step = t_collision + t_streaming;
    Ok(StepTiming {
        grid,
        n_nodes,
        t_collision,
        t_streaming,
        t_step,
        mlups: mlups(grid, t_step),
    })
}

/// Step times for every feasible node count in `range`, in range order.
pub fn sweep_nodes(
    grid: f64,
    spec: &HardwareSpec,
    formula: CollisionFormula,
    range: RangeInclusive<u32>,
) -> Vec<StepTiming> {
    range
        .into_par_iter()
        .filter_map(|n| step_time(grid, n, spec, formula).ok())
        .collect()
}

/// Exhaustive search for the fastest node count; ties go to fewer nodes.
pub fn optimal_nodes(
    grid: f64,
    spec: &HardwareSpec,
    formula: CollisionFormula,
    range: RangeInclusive<u32>,
) -> Result<StepTiming> {
    if *range.start() == 0 || *range.end() > spec.cluster.n_nodes_max || range.is_empty() {
        return Err(Error::Config(format!(
            "node range {range:?} outside 1..={}",
            spec.cluster.n_nodes_max
        )));
    }
    sweep_nodes(grid, spec, formula, range)
        .into_iter()
        .reduce(|best, t| if t.t_step < best.t_step { t } else { best })
        .ok_or_else(|| Error::Config(format!("no feasible node count for grid {grid}")))
}

/// Writes `grid,n_nodes,t_collision,t_streaming,t_step,mlups`.
pub fn write_sweep_csv<W: Write>(rows: &[StepTiming], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record([
            "grid",
            "n_nodes",
            "t_collision",
            "t_streaming",
            "t_step",
            "mlups",
        ])?;
    }
    w.flush()?;
    Ok(())
}
