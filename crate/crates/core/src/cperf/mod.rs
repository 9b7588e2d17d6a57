//! Runtime model of a classical LBM step on a GPU cluster: a roofline
//! estimate for the collision kernels plus a bandwidth-bound streaming
//! exchange, minimised over the node count.

mod hardware;
mod model;

pub use hardware::{ClusterSpec, GpuSpec, HardwareSpec, KernelProfile, ARITHMETIC_INTENSITY};
pub use model::{
    collision_time, mlups, optimal_nodes, step_time, streaming_time, sweep_nodes, write_sweep_csv,
    CollisionFormula, DecompositionState, StepTiming, BYTES_PER_DOUBLE,
};
