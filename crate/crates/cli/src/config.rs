use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use vqcfd_core::cperf::HardwareSpec;
use vqcfd_core::lattice::{EdgeKind, EdgeKinds, SimulationConfig};
use vqcfd_core::qperf::{QuantumCostParams, UnitScale};
use vqcfd_core::vqcfd::VerifyConfig;

/// Contents of `--config`. Every section is optional; unknown keys fail.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub unit_scale: Option<UnitScale>,
    pub literal_formula: Option<bool>,
    /// Separate hardware file; mutually exclusive with `[hardware]`.
    pub hardware_file: Option<PathBuf>,
    pub hardware: Option<HardwareSpec>,
    pub quantum: Option<QuantumCostParams>,
    #[serde(default)]
    pub tables: TablePaths,
    pub lbm: Option<SimulationConfig>,
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub pqc: PqcConfig,
    #[serde(default)]
    pub cperf: CperfConfig,
    #[serde(default)]
    pub crossover: CrossoverConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablePaths {
    pub small: Option<PathBuf>,
    pub large: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PqcConfig {
    pub qubits: usize,
    pub layers: usize,
    pub target: String,
    pub method: String,
    pub iters: usize,
}

impl Default for PqcConfig {
    fn default() -> Self {
        Self {
            qubits: 4,
            layers: 8,
            target: "sine".into(),
            method: "gradient".into(),
            iters: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CperfConfig {
    pub grid: f64,
    pub max_nodes: Option<u32>,
    pub calibrated: bool,
}

impl Default for CperfConfig {
    fn default() -> Self {
        Self {
            grid: 1e7,
            max_nodes: None,
            calibrated: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossoverConfig {
    pub grids: Vec<f64>,
}

impl Default for CrossoverConfig {
    fn default() -> Self {
        // 2^16 .. 2^30 in factors of four
        Self {
            grids: (0..8).map(|i| 2f64.powi(16 + 2 * i)).collect(),
        }
    }
}

impl AppConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        if cfg.hardware.is_some() && cfg.hardware_file.is_some() {
            anyhow::bail!("config sets both `hardware` and `hardware_file`");
        }
        Ok(cfg)
    }

    /// Hardware constants: inline section, then separate file, then defaults.
    pub fn hardware_spec(&self, base: &Path) -> Result<HardwareSpec> {
        if let Some(h) = self.hardware {
            h.validate()?;
            return Ok(h);
        }
        if let Some(p) = &self.hardware_file {
            let p = resolve(base, p);
            let text = std::fs::read_to_string(&p)
                .with_context(|| format!("reading hardware file {}", p.display()))?;
            return Ok(HardwareSpec::from_toml_str(&text)?);
        }
        Ok(HardwareSpec::default())
    }
}

/// Relative paths in a config file are taken relative to that file.
pub fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Lid-driven cavity at Re = 100 on 64 x 64.
pub fn default_lbm() -> SimulationConfig {
    SimulationConfig {
        nx: 64,
        ny: 64,
        tau: 0.692,
        steps: 10_000,
        snapshot_every: 2_500,
        output_path: None,
        u_wall: 0.1,
        u_in: 0.0,
        rho_out: 1.0,
        boundary: EdgeKinds {
            north: EdgeKind::MovingWall,
            south: EdgeKind::Wall,
            east: EdgeKind::Wall,
            west: EdgeKind::Wall,
        },
    }
}
