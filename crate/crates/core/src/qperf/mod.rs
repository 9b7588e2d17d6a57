//! Runtime model of the quantum side: circuit-timing tables, their
//! regressions, and the per-time-step cost
//!
//! ```text
//! t_q = sum_v N_iv N_f sum_p N_shot t_pv
//!     ~ N_v N_i N_f N_shot (N_ps t_ps + N_pl t_pl),   N_i = 125 N_q
//! ```

mod fit;
mod model;
mod records;

pub use fit::{fit_linear, fit_polynomial, fit_quadratic, CircuitTimeFit, FitKind, UnitScale};
pub use model::{ionq_small_time, tq_full_sum, tq_per_step, tq_published, QuantumCostParams};
pub use records::{
    bundled_records, load_records, load_records_path, Table, TimingRecord, RECORD_HEADER,
};
