//! D2Q9 lattice-Boltzmann solver.
//!
//! Populations are stored structure-of-arrays: nine fields of `nx * ny`
//! values, row-major with `x` fastest. One time step is
//! collide (BGK) -> stream (pull, with half-way bounce-back) -> Zou-He closure
//! on inflow/outflow edges.

mod boundary;
mod d2q9;
mod simulation;
mod solver;
mod state;

pub use boundary::{BoundarySpec, Edge, EdgeCondition};
pub use d2q9::D2Q9;
pub use simulation::{
    run_simulation, write_snapshots_csv, EdgeKind, EdgeKinds, SimulationConfig, Snapshot,
};
pub use solver::{close_boundaries, collide, compute_macros, equilibrium, step, stream};
pub use state::{LatticeState, MacroFields};
