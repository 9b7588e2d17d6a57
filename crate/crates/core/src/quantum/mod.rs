//! Desk-scale statevector backend for the variational CFD encoding.
//!
//! A CFD field of `2^n` values is carried as a unit statevector produced by a
//! layered Ry + CZ-chain ansatz together with a classical scale factor. The
//! only quantity that crosses back to the classical side is the
//! multi-product, optionally perturbed by emulated shot noise.

mod ansatz;
mod encoding;
mod shots;
mod statevector;
mod train;

pub use ansatz::{
    build_state, overlap_and_gradient, real_amplitudes, AnsatzConfig, DEFAULT_MAX_QUBITS,
};
pub use encoding::{decode_field, multiproduct, norm, write_vector_csv};
pub use shots::{estimate_multiproduct, ShotModel, ShotNoise};
pub use statevector::StateVector;
pub use train::{train_pqc, train_pqc_from, GradientBudget, TrainMethod, TrainResult};
