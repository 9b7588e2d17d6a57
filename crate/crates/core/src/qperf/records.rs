use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const RECORD_HEADER: [&str; 7] = [
    "run_no",
    "grid_size",
    "n_q",
    "qubits_per_circuit",
    "backend",
    "circuit_depth",
    "runtime_e4s",
];

const SMALL_CSV: &str = include_str!("../../data/table1.csv");
const LARGE_CSV: &str = include_str!("../../data/table2.csv");

/// One measured circuit run. `runtime_e4s` is in units of 1e-4 s, as tabulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub run_no: u32,
    pub grid_size: f64,
    pub n_q: u32,
    pub qubits_per_circuit: u32,
    pub backend: String,
    pub circuit_depth: u64,
    pub runtime_e4s: f64,
}

impl TimingRecord {
    pub fn runtime_seconds(&self) -> f64 {
        self.runtime_e4s * 1e-4
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    /// Small multi-product circuits.
    Small,
    /// Large multi-product circuits.
    Large,
}

impl std::str::FromStr for Table {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "small" => Ok(Table::Small),
            "large" => Ok(Table::Large),
            other => Err(Error::Config(format!(
                "unknown table `{other}` (small|large)"
            ))),
        }
    }
}

/// Parses a timing table. Row numbers in errors count data rows from 1.
pub fn load_records<R: Read>(source: R) -> Result<Vec<TimingRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        log::warn!("timing table is empty");
        return Ok(Vec::new());
    }
    if headers.iter().ne(RECORD_HEADER) {
        return Err(Error::Schema {
            row: 0,
            message: format!("expected header `{}`", RECORD_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<TimingRecord>().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Schema {
            row,
            message: e.to_string(),
        })?;
        if !(rec.runtime_e4s > 0.0) {
            return Err(Error::Schema {
                row,
                message: "runtime must be positive".into(),
            });
        }
        if !(rec.grid_size > 0.0) || rec.n_q == 0 {
            return Err(Error::Schema {
                row,
                message: "grid_size and n_q must be positive".into(),
            });
        }
        out.push(rec);
    }
    if out.is_empty() {
        log::warn!("timing table has no rows");
    }
    Ok(out)
}

pub fn load_records_path(path: &Path) -> Result<Vec<TimingRecord>> {
    load_records(std::fs::File::open(path)?)
}

/// The shipped tables (11 small-circuit rows, 9 large-circuit rows).
pub fn bundled_records(table: Table) -> Vec<TimingRecord> {
    let text = match table {
        Table::Small => SMALL_CSV,
        Table::Large => LARGE_CSV,
    };
    load_records(text.as_bytes()).expect("bundled table is well formed")
}
