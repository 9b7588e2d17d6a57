//! Classical lattice-Boltzmann CFD, a desk-scale variational quantum CFD
//! emulator, and the quantum/classical runtime models used to estimate the
//! quantum-to-classical time ratio at industrial grid sizes.
//!
//! Module map:
//!
//! * [`lattice`]: D2Q9 BGK solver with periodic, moving-wall, mass-inflow and
//!   pressure-outflow edges.
//! * [`quantum`]: real-amplitude statevector ansatz, amplitude encoding,
//!   multi-products and shot-noise emulation.
//! * [`vqcfd`]: SPSA-driven variational time stepper and its verification
//!   harness.
//! * [`qperf`]: circuit-timing tables, regressions and the per-step quantum
//!   runtime model.
//! * [`cperf`]: roofline/communication model of a GPU cluster and the optimal
//!   node-count search.
//! * [`crossover`]: the quantum/classical ratio and grid sweeps.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cperf;
pub mod crossover;
mod error;
pub mod lattice;
pub mod qperf;
pub mod quantum;
pub mod vqcfd;

pub use error::{Error, Result};
