use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// FLOP per byte of the five collision kernels.
pub const ARITHMETIC_INTENSITY: [f64; 5] = [0.1, 0.193, 0.193, 0.425, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GpuSpec {
    /// FLOP/s.
    pub flop_max: f64,
    /// Bytes/s.
    pub bw_hbm: f64,
    /// Bytes.
    pub hbm_capacity: f64,
    pub n_cu: u32,
    pub n_simd: u32,
    pub wavefront: u32,
}

impl Default for GpuSpec {
    fn default() -> Self {
        Self {
            flop_max: 23.9e12,
            bw_hbm: 1.6e12,
            hbm_capacity: 64e9,
            n_cu: 110,
            n_simd: 4,
            wavefront: 64,
        }
    }
}

impl GpuSpec {
    /// Threads resident at once: `wavefront * n_simd * n_cu`.
    pub fn concurrent_threads(&self) -> u64 {
        self.wavefront as u64 * self.n_simd as u64 * self.n_cu as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterSpec {
    pub n_nodes_max: u32,
    pub gpus_per_node: u32,
    /// GPU-to-GPU bandwidth within a node, bytes/s.
    pub bw_gpu: f64,
    /// Inter-node bandwidth, bytes/s.
    pub bw_node: f64,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        Self {
            n_nodes_max: 9408,
            gpus_per_node: 8,
            bw_gpu: 200e9,
            bw_node: 3e9,
        }
    }
}

impl ClusterSpec {
    pub fn total_gpus(&self) -> u64 {
        self.n_nodes_max as u64 * self.gpus_per_node as u64
    }
}

/// Bytes and FLOPs per thread for kernels 0..4. Kernels 3 and 4 run once
/// per population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelProfile {
    pub bytes: [f64; 5],
    pub flops: [f64; 5],
    /// Resident bytes per lattice point, for the HBM capacity check.
    #[serde(default = "default_state_bytes")]
    pub state_bytes_per_point: f64,
}

fn default_state_bytes() -> f64 {
    // two copies of nine doubles
    2.0 * 9.0 * 8.0
}

impl Default for KernelProfile {
    /// Fused-kernel D2Q9 byte counts: read nine populations and write the
    /// density (80), read populations and write a velocity component
    /// (88, 88), per-population equilibrium and relaxation (40), per-population
    /// store (16).
    fn default() -> Self {
        Self::from_bytes([80.0, 88.0, 88.0, 40.0, 16.0])
    }
}

impl KernelProfile {
    /// FLOP counts follow from the fixed arithmetic intensities.
    pub fn from_bytes(bytes: [f64; 5]) -> Self {
        let mut flops = [0.0; 5];
        for k in 0..5 {
            flops[k] = ARITHMETIC_INTENSITY[k] * bytes[k];
        }
        Self {
            bytes,
            flops,
            state_bytes_per_point: default_state_bytes(),
        }
    }

    /// Byte counts scaled by 7.5, which moves the optimum for a ten-million
    /// point grid to 52 nodes on the default hardware.
    pub fn calibrated() -> Self {
        Self::from_bytes([600.0, 660.0, 660.0, 300.0, 120.0])
    }

    pub fn zero() -> Self {
        Self {
            bytes: [0.0; 5],
            flops: [0.0; 5],
            state_bytes_per_point: default_state_bytes(),
        }
    }
}

/// Everything the classical model needs, as read from a hardware file.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HardwareSpec {
    pub gpu: GpuSpec,
    pub cluster: ClusterSpec,
    pub kernels: KernelProfile,
}

impl HardwareSpec {
    pub fn calibrated() -> Self {
        Self {
            kernels: KernelProfile::calibrated(),
            ..Self::default()
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.gpu;
        let c = &self.cluster;
        let positive = [g.flop_max, g.bw_hbm, g.hbm_capacity, c.bw_gpu, c.bw_node];
        if positive.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Config(
                "bandwidths, FLOP rate and HBM capacity must be positive".into(),
            ));
        }
        if g.n_cu == 0
            || g.n_simd == 0
            || g.wavefront == 0
            || c.n_nodes_max == 0
            || c.gpus_per_node == 0
        {
            return Err(Error::Config("unit counts must be positive".into()));
        }
        let k = &self.kernels;
        if k.bytes.iter().chain(&k.flops).any(|v| !(*v >= 0.0)) || !(k.state_bytes_per_point >= 0.0)
        {
            return Err(Error::Config(
                "kernel bytes and FLOPs must be non-negative".into(),
            ));
        }
        Ok(())
    }
}
