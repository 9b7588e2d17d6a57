use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "vqcfd",
    version,
    about = "Lattice-Boltzmann CFD, variational quantum CFD emulation and quantum/classical runtime models"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; unknown keys are an error.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for SPSA perturbations, shot noise and random targets (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Reading of the published circuit-time coefficients.
    #[arg(long, global = true, value_enum)]
    pub unit_scale: Option<UnitScaleArg>,
    /// Evaluate the collision-time equation exactly as printed instead of per
    /// thread cohort.
    #[arg(long, global = true)]
    pub literal_formula: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitScaleArg {
    Seconds,
    TableUnits,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Classical lattice-Boltzmann runs.
    Lbm {
        #[command(subcommand)]
        action: LbmAction,
    },
    /// Variational time stepping.
    Vqcfd {
        #[command(subcommand)]
        action: VqcfdAction,
    },
    /// Amplitude-encode a vector into the ansatz.
    Pqc {
        #[command(subcommand)]
        action: PqcAction,
    },
    /// Circuit-time regressions.
    Qperf {
        #[command(subcommand)]
        action: QperfAction,
    },
    /// Classical cluster model.
    Cperf {
        #[command(subcommand)]
        action: CperfAction,
    },
    /// Quantum/classical ratio over a range of grid sizes.
    Crossover(CrossoverArgs),
    /// Ratio at fifty million grid points.
    Q5e7,
}

#[derive(Debug, Clone, Subcommand)]
pub enum LbmAction {
    /// Run the `[lbm]` section of the config (lid-driven cavity if absent).
    Run(LbmRunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct LbmRunArgs {
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum VqcfdAction {
    /// Score SPSA traces against the exact-minimum line.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Grid as `NXxNY`, e.g. `4x4`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Time steps to verify.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Ansatz layers.
    #[arg(long)]
    pub layers: Option<usize>,
    /// SPSA iterations per variable and step.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Emulated shots per multi-product.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Start each step from the previous angles instead of zero.
    #[arg(long)]
    pub warm: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Algebraic,
    Variational,
}

#[derive(Debug, Clone, Subcommand)]
pub enum PqcAction {
    /// Train the ansatz on a target vector and report the recovery.
    Train(PqcArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct PqcArgs {
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// `sine`, `gaussian`, `random`, or a CSV path with an `index,value` header.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Iteration budget for the chosen optimiser.
    #[arg(long)]
    pub iters: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Gradient,
    Spsa,
}

#[derive(Debug, Clone, Subcommand)]
pub enum QperfAction {
    /// Refit a timing table and compare with the published coefficients.
    Fit(QperfFitArgs),
}

#[derive(Debug, Clone, Args)]
pub struct QperfFitArgs {
    #[arg(long, value_enum, default_value = "both")]
    pub table: TableArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    Small,
    Large,
    Both,
}

#[derive(Debug, Clone, Subcommand)]
pub enum CperfAction {
    /// Step time against node count at a fixed grid.
    Sweep(CperfSweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CperfSweepArgs {
    #[arg(long)]
    pub grid: Option<f64>,
    #[arg(long)]
    pub max_nodes: Option<u32>,
    /// Use the byte counts calibrated to a 52-node optimum.
    #[arg(long)]
    pub calibrated: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CrossoverArgs {
    /// Comma-separated grid sizes.
    #[arg(long, value_delimiter = ',')]
    pub grids: Option<Vec<f64>>,
}
