//! Variational time stepping of the lattice-Boltzmann update.
//!
//! Each of the nine population fields is carried as ansatz angles plus a
//! classical scale. A step builds the classical one-step target for every
//! field from the decoded current state and then either stores it directly
//! (algebraic mode) or minimises the squared distance between the scaled
//! ansatz state and the target with SPSA (variational mode). The cost is
//! assembled from multi-products only:
//!
//! ```text
//! C(theta, s) = s^2 - 2 s MP(psi(theta), t) + |t|^2 = |s psi(theta) - t|^2
//! ```

mod cost;
mod engine;
mod field;
pub mod spsa;
mod verify;

pub use cost::{cost, direct_cost, projected_cost};
pub use engine::{
    build_target, build_targets, exact_min_cost, oracle_budget, vqcfd_step, ConvergenceTrace,
    StartMode, StepMode, StepOptions,
};
pub use field::{VariableEncoding, VariationalField};
pub use spsa::{calibrate_gain, spsa_minimize, SpsaConfig, SpsaOutcome};
pub use verify::{
    verify_convergence, write_trace_csv, write_trace_file, InitialCondition, TraceSummary,
    VerifyConfig, VerifyReport,
};
