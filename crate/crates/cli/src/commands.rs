use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use vqcfd_core::cperf::{
    optimal_nodes, sweep_nodes, write_sweep_csv, CollisionFormula, HardwareSpec, KernelProfile,
};
use vqcfd_core::crossover::{q5e7_report, sweep, write_crossover_csv, CrossoverModels};
use vqcfd_core::lattice::{run_simulation, write_snapshots_csv};
use vqcfd_core::qperf::{
    bundled_records, fit_linear, fit_quadratic, load_records_path, CircuitTimeFit,
    QuantumCostParams, Table, TimingRecord, UnitScale,
};
use vqcfd_core::quantum::{
    norm, real_amplitudes, train_pqc, write_vector_csv, AnsatzConfig, GradientBudget, TrainMethod,
};
use vqcfd_core::vqcfd::{verify_convergence, write_trace_csv, SpsaConfig, StartMode, StepMode};

use crate::cli::{
    Cli, Command, CperfAction, CperfSweepArgs, CrossoverArgs, LbmAction, LbmRunArgs, MethodArg,
    ModeArg, PqcAction, PqcArgs, QperfAction, TableArg, UnitScaleArg, VerifyArgs, VqcfdAction,
};
use crate::config::{default_lbm, resolve, AppConfig};
use crate::output::OutputDir;

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    /// One-line human summary.
    pub summary: String,
}

struct RunContext {
    config: AppConfig,
    config_dir: PathBuf,
    seed: u64,
    unit_scale: UnitScale,
    unit_scale_source: &'static str,
    formula: CollisionFormula,
}

impl RunContext {
    fn hardware(&self) -> Result<HardwareSpec> {
        self.config.hardware_spec(&self.config_dir)
    }

    fn quantum(&self) -> QuantumCostParams {
        QuantumCostParams {
            unit_scale: self.unit_scale,
            ..self.config.quantum.unwrap_or_default()
        }
    }

    fn records(&self, table: Table) -> Result<(Vec<TimingRecord>, String)> {
        let path = match table {
            Table::Small => &self.config.tables.small,
            Table::Large => &self.config.tables.large,
        };
        match path {
            Some(p) => {
                let full = resolve(&self.config_dir, p);
                let recs = load_records_path(&full)
                    .with_context(|| format!("loading timing table {}", full.display()))?;
                Ok((recs, p.display().to_string()))
            }
            None => Ok((bundled_records(table), "bundled".to_string())),
        }
    }

    fn models(&self) -> Result<CrossoverModels> {
        let hardware = self.hardware()?;
        Ok(CrossoverModels {
            params: self.quantum(),
            hardware,
            formula: self.formula,
            max_nodes: hardware.cluster.n_nodes_max,
            ..CrossoverModels::published(self.unit_scale)
        })
    }

    fn manifest(&self, command: &str, parameters: Value, files: &[String]) -> Value {
        json!({
            "tool": "vqcfd",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "seed": self.seed,
            "unit_scale": self.unit_scale.name(),
            "unit_scale_source": self.unit_scale_source,
            "collision_formula": self.formula,
            "parameters": parameters,
            "outputs": files,
        })
    }
}

/// Executes one parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let (config, config_dir) = match &g.config {
        Some(p) => (
            AppConfig::load(p)?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None => (AppConfig::default(), PathBuf::from(".")),
    };
    let (unit_scale, unit_scale_source) = match (g.unit_scale, config.unit_scale) {
        (Some(UnitScaleArg::Seconds), _) => (UnitScale::Seconds, "flag"),
        (Some(UnitScaleArg::TableUnits), _) => (UnitScale::TableUnits, "flag"),
        (None, Some(u)) => (u, "config"),
        (None, None) => (UnitScale::Seconds, "default"),
    };
    let literal = g.literal_formula || config.literal_formula.unwrap_or(false);
    let out_root = g
        .out
        .clone()
        .or_else(|| config.out.as_ref().map(|p| resolve(&config_dir, p)))
        .unwrap_or_else(|| PathBuf::from("out"));
    let ctx = RunContext {
        seed: g.seed.or(config.seed).unwrap_or(0),
        config,
        config_dir,
        unit_scale,
        unit_scale_source,
        formula: if literal {
            CollisionFormula::Literal
        } else {
            CollisionFormula::Cohort
        },
    };
    let mut out = OutputDir::create(&out_root)?;

    let (name, parameters, summary) = match &cli.command {
        Command::Lbm {
            action: LbmAction::Run(a),
        } => lbm_run(&ctx, a, &mut out)?,
        Command::Vqcfd {
            action: VqcfdAction::Verify(a),
        } => vqcfd_verify(&ctx, a, &mut out)?,
        Command::Pqc {
            action: PqcAction::Train(a),
        } => pqc_train(&ctx, a, &mut out)?,
        Command::Qperf {
            action: QperfAction::Fit(a),
        } => qperf_fit(&ctx, a.table, &mut out)?,
        Command::Cperf {
            action: CperfAction::Sweep(a),
        } => cperf_sweep(&ctx, a, &mut out)?,
        Command::Crossover(a) => crossover(&ctx, a, &mut out)?,
        Command::Q5e7 => q5e7(&ctx, &mut out)?,
    };
    let mut files = out.written().to_vec();
    files.push("manifest.json".into());
    let manifest = ctx.manifest(name, parameters, &files);
    out.write_json("manifest.json", &manifest)?;
    Ok(Outcome {
        out_dir: out.root().to_path_buf(),
        files,
        summary,
    })
}

type Step = (&'static str, Value, String);

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn lbm_run(ctx: &RunContext, args: &LbmRunArgs, out: &mut OutputDir) -> Result<Step> {
    let mut cfg = ctx.config.lbm.clone().unwrap_or_else(default_lbm);
    if let Some(s) = args.steps {
        cfg.steps = s;
    }
    cfg.validate()?;
    let snaps = run_simulation(&cfg)?;
    let rel = cfg
        .output_path
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "lbm_snapshots.csv".into());
    out.write_with(&rel, |w| Ok(write_snapshots_csv(w, &snaps)?))?;
    let last = snaps.last().expect("at least the initial snapshot");
    let mass: f64 = last.macros.rho.iter().sum();
    let umax = last
        .macros
        .ux
        .iter()
        .zip(&last.macros.uy)
        .map(|(a, b)| a.hypot(*b))
        .fold(0.0, f64::max);
    let summary = format!(
        "lbm: {}x{} for {} steps, {} snapshots, final mass {mass:.12}, max |u| {umax:.6}",
        cfg.nx,
        cfg.ny,
        cfg.steps,
        snaps.len()
    );
    Ok((
        "lbm run",
        json!({ "simulation": to_value(&cfg)?, "final_mass": mass, "max_speed": umax }),
        summary,
    ))
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .with_context(|| format!("grid `{s}` is not of the form NXxNY"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn vqcfd_verify(ctx: &RunContext, args: &VerifyArgs, out: &mut OutputDir) -> Result<Step> {
    let mut cfg = ctx.config.verify.clone().unwrap_or_default();
    cfg.seed = ctx.seed;
    if let Some(g) = &args.grid {
        (cfg.nx, cfg.ny) = parse_grid(g)?;
    }
    if let Some(s) = args.steps {
        cfg.steps = s;
    }
    if let Some(l) = args.layers {
        cfg.layers = l;
    }
    if let Some(i) = args.iters {
        cfg.spsa_iters = i;
    }
    if args.shots.is_some() {
        cfg.shots = args.shots;
    }
    match args.mode {
        Some(ModeArg::Algebraic) => cfg.mode = StepMode::Algebraic,
        Some(ModeArg::Variational) => cfg.mode = StepMode::Variational,
        None => {}
    }
    if args.warm {
        cfg.start = StartMode::Warm;
    }
    let report = verify_convergence(&cfg)?;
    out.write_with("verify/traces.csv", |w| Ok(write_trace_csv(&report, w)?))?;
    out.write_json("verify/summary.json", &report)?;
    let summary = format!(
        "vqcfd verify: {} traces, max gap {:.4} (threshold {}), max field error {:.3e}: {}",
        report.n_traces(),
        report.max_gap,
        cfg.gap_threshold(),
        report.max_field_error,
        if report.pass { "PASS" } else { "FAIL" }
    );
    Ok((
        "vqcfd verify",
        json!({ "verify": to_value(&cfg)? }),
        summary,
    ))
}

fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("index,value") {
        bail!("{}: expected header `index,value`", path.display());
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            let v = l
                .split(',')
                .nth(1)
                .with_context(|| format!("row {}: missing value", i + 1))?;
            v.trim()
                .parse::<f64>()
                .with_context(|| format!("row {}: bad value", i + 1))
        })
        .collect()
}

fn pqc_target(spec: &str, n: usize, base: &Path) -> Result<Vec<f64>> {
    use std::f64::consts::PI;
    Ok(match spec {
        "sine" => (0..n)
            .map(|i| 1.0 + 0.5 * (2.0 * PI * i as f64 / n as f64).sin())
            .collect(),
        "gaussian" => (0..n)
            .map(|i| {
                let z = (i as f64 - n as f64 / 2.0) / (n as f64 / 6.0);
                (-z * z).exp()
            })
            .collect(),
        path => read_vector_csv(&resolve(base, Path::new(path)))?,
    })
}

fn pqc_train(ctx: &RunContext, args: &PqcArgs, out: &mut OutputDir) -> Result<Step> {
    let mut p = ctx.config.pqc.clone();
    if let Some(q) = args.qubits {
        p.qubits = q;
    }
    if let Some(l) = args.layers {
        p.layers = l;
    }
    if let Some(t) = &args.target {
        p.target = t.clone();
    }
    match args.method {
        Some(MethodArg::Gradient) => p.method = "gradient".into(),
        Some(MethodArg::Spsa) => p.method = "spsa".into(),
        None => {}
    }
    if let Some(i) = args.iters {
        p.iters = i;
    }
    let cfg = AnsatzConfig::new(p.qubits, p.layers)?;
    let target = pqc_target(&p.target, cfg.dim(), &ctx.config_dir)?;
    let method = match p.method.as_str() {
        "gradient" => TrainMethod::Gradient(GradientBudget {
            max_iters: p.iters,
            seed: ctx.seed,
            ..GradientBudget::default()
        }),
        "spsa" => TrainMethod::Spsa(SpsaConfig::with_budget(p.iters, ctx.seed)),
        other => bail!("unknown training method `{other}` (gradient|spsa)"),
    };
    let fit = train_pqc(&target, &cfg, &method)?;
    let recovered: Vec<f64> = real_amplitudes(&fit.theta, &cfg)?
        .iter()
        .map(|a| fit.scale * fit.overlap * a)
        .collect();
    let linf = recovered
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let target_norm = norm(&target);
    out.write_with("pqc/target.csv", |w| Ok(write_vector_csv(w, &target)?))?;
    out.write_with("pqc/recovered.csv", |w| {
        Ok(write_vector_csv(w, &recovered)?)
    })?;
    out.write_json(
        "pqc/result.json",
        &json!({
            "fidelity": fit.fidelity,
            "overlap": fit.overlap,
            "scale": fit.scale,
            "linf_error": linf,
            "linf_relative": linf / target_norm,
            "theta": fit.theta,
        }),
    )?;
    let summary = format!(
        "pqc train: {} qubits, {} layers, fidelity {:.6}, L-inf error {:.3e} ({:.3e} of |target|)",
        p.qubits,
        p.layers,
        fit.fidelity,
        linf,
        linf / target_norm
    );
    Ok(("pqc train", json!({ "pqc": to_value(&p)? }), summary))
}

fn fit_entry(
    records: &[TimingRecord],
    table: Table,
    source: &str,
    unit: UnitScale,
) -> Result<Value> {
    let (refit, published) = match table {
        Table::Small => (fit_linear(records)?, CircuitTimeFit::published_small(unit)),
        Table::Large => (
            fit_quadratic(records)?,
            CircuitTimeFit::published_large(unit),
        ),
    };
    Ok(json!({
        "source": source,
        "n": refit.n,
        "regressor": "n_q",
        "refit": {
            "kind": refit.kind,
            "coefficients": refit.coefficients,
            "r2": refit.r2,
            "adjusted_r2": refit.adjusted_r2,
            "ci95": refit.ci95,
            "unit_scale": refit.unit_scale.name(),
        },
        "published": {
            "kind": published.kind,
            "coefficients": published.coefficients,
            "stated_adjusted_r2": published.adjusted_r2,
            "unit_scale": unit.name(),
        },
    }))
}

fn qperf_fit(ctx: &RunContext, table: TableArg, out: &mut OutputDir) -> Result<Step> {
    let tables: &[Table] = match table {
        TableArg::Small => &[Table::Small],
        TableArg::Large => &[Table::Large],
        TableArg::Both => &[Table::Small, Table::Large],
    };
    let mut report = serde_json::Map::new();
    let mut lines = Vec::new();
    for &t in tables {
        let (records, source) = ctx.records(t)?;
        let entry = fit_entry(&records, t, &source, ctx.unit_scale)?;
        let key = match t {
            Table::Small => "small",
            Table::Large => "large",
        };
        lines.push(format!(
            "{key}: R2 {:.5}, adjusted {:.5}",
            entry["refit"]["r2"].as_f64().unwrap_or(f64::NAN),
            entry["refit"]["adjusted_r2"].as_f64().unwrap_or(f64::NAN)
        ));
        report.insert(key.to_string(), entry);
    }
    let ionq = CircuitTimeFit::ionq_small();
    report.insert(
        "ionq_small".into(),
        json!({ "kind": ionq.kind, "coefficients": ionq.coefficients, "ci95": ionq.ci95, "unit_scale": "seconds" }),
    );
    out.write_json("fits.json", &report)?;
    Ok((
        "qperf fit",
        json!({ "tables": tables }),
        format!("qperf fit: {}", lines.join("; ")),
    ))
}

fn cperf_sweep(ctx: &RunContext, args: &CperfSweepArgs, out: &mut OutputDir) -> Result<Step> {
    let c = &ctx.config.cperf;
    let grid = args.grid.unwrap_or(c.grid);
    let mut hw = ctx.hardware()?;
    if args.calibrated || c.calibrated {
        hw.kernels = KernelProfile::calibrated();
    }
    let max_nodes = args
        .max_nodes
        .or(c.max_nodes)
        .unwrap_or(hw.cluster.n_nodes_max);
    let rows = sweep_nodes(grid, &hw, ctx.formula, 1..=max_nodes);
    let best = optimal_nodes(grid, &hw, ctx.formula, 1..=max_nodes)?;
    out.write_with("cperf_sweep.csv", |w| Ok(write_sweep_csv(&rows, w)?))?;
    out.write_json("cperf_optimum.json", &best)?;
    let summary = format!(
        "cperf sweep: grid {grid:e}, optimum {} nodes, t_step {:.6e} s, {:.0} MLUPS",
        best.n_nodes, best.t_step, best.mlups
    );
    Ok((
        "cperf sweep",
        json!({ "grid": grid, "max_nodes": max_nodes, "hardware": to_value(&hw)? }),
        summary,
    ))
}

fn crossover(ctx: &RunContext, args: &CrossoverArgs, out: &mut OutputDir) -> Result<Step> {
    let grids = args
        .grids
        .clone()
        .unwrap_or_else(|| ctx.config.crossover.grids.clone());
    let models = ctx.models()?;
    let (small, _) = ctx.records(Table::Small)?;
    let (large, _) = ctx.records(Table::Large)?;
    let rows = sweep(&grids, &models, &small, &large)?;
    out.write_with("crossover.csv", |w| Ok(write_crossover_csv(&rows, w)?))?;
    let summary = format!(
        "crossover: {} model rows, {} rows total",
        grids.len(),
        rows.len()
    );
    Ok((
        "crossover",
        json!({ "grids": grids, "models": to_value(&models)? }),
        summary,
    ))
}

fn q5e7(ctx: &RunContext, out: &mut OutputDir) -> Result<Step> {
    let models = ctx.models()?;
    let (small, small_src) = ctx.records(Table::Small)?;
    let (large, large_src) = ctx.records(Table::Large)?;
    let report = q5e7_report(&models, &small, &large)?;
    let parameters = json!({
        "models": to_value(&models)?,
        "tables": { "small": small_src, "large": large_src },
    });
    let embedded = ctx.manifest(
        "q5e7",
        parameters.clone(),
        &["q5e7.json".to_string(), "manifest.json".to_string()],
    );
    out.write_json(
        "q5e7.json",
        &json!({ "report": to_value(&report)?, "manifest": embedded }),
    )?;
    let readings: Vec<String> = report
        .readings
        .iter()
        .map(|r| format!("{} {:.3e}", r.label, r.ratio))
        .collect();
    let summary = format!(
        "q5e7 (upper bound): n_q {}, {} nodes, t_c {:.4e} s; ratio {}",
        report.n_q,
        report.n_nodes_opt,
        report.t_classical,
        readings.join(", ")
    );
    Ok(("q5e7", parameters, summary))
}
