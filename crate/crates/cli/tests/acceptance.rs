//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;
use vqcfd_cli::{run, Cli};
use vqcfd_core::cperf::{optimal_nodes, sweep_nodes, CollisionFormula, HardwareSpec};
use vqcfd_core::lattice::{compute_macros, step, BoundarySpec, LatticeState, MacroFields};
use vqcfd_core::qperf::{
    bundled_records, fit_linear, fit_quadratic, tq_published, QuantumCostParams, Table,
};
use vqcfd_core::quantum::{
    real_amplitudes, train_pqc, AnsatzConfig, GradientBudget, ShotModel, TrainMethod,
};
use vqcfd_core::vqcfd::{
    verify_convergence, vqcfd_step, StepMode, StepOptions, VariationalField, VerifyConfig,
};

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t0 = Instant::now();
    let v = f();
    (v, t0.elapsed())
}

fn table1_r2() -> Result<String, String> {
    let (fit, dt) = timed(|| fit_linear(&bundled_records(Table::Small)));
    let r2 = fit.map_err(|e| e.to_string())?.r2.unwrap_or(f64::NAN);
    ensure(
        (0.50..=0.62).contains(&r2) && dt < Duration::from_secs(1),
        format!("R2 = {r2:.5} in [0.50, 0.62], {dt:.2?}"),
    )
}

fn table2_adjusted_r2() -> Result<String, String> {
    let fit = fit_quadratic(&bundled_records(Table::Large)).map_err(|e| e.to_string())?;
    let adj = fit.adjusted_r2.unwrap_or(f64::NAN);
    ensure(
        (0.78..=0.93).contains(&adj),
        format!("adjusted R2 = {adj:.5} in [0.78, 0.93]"),
    )
}

fn tq_hand_chain() -> Result<String, String> {
    let n = 4.0;
    let t_ps = 0.0006784 + 0.00017502 * n;
    let t_pl = 0.00181582 + 0.01748484 * n + 0.01597166 * n * n;
    let hand = 9.0 * (125.0 * n) * 2.0 * 1e4 * (9.0 * t_ps + 45.0 * t_pl);
    let got = tq_published(4, &QuantumCostParams::default());
    let rel = (got / hand - 1.0).abs();
    ensure(
        rel <= 1e-9,
        format!("t_q(4) = {got:.10e} s, hand {hand:.10e} s, rel {rel:.1e}"),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<(), String> {
    let mut argv = vec!["vqcfd", "--out", dir.to_str().unwrap()];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    run(&cli).map(|_| ()).map_err(|e| format!("{e:#}"))
}

fn q5e7_upper_bound() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    run_cli(dir.path(), &["q5e7"])?;
    let text = std::fs::read(dir.path().join("q5e7.json")).map_err(|e| e.to_string())?;
    let v: serde_json::Value = serde_json::from_slice(&text).map_err(|e| e.to_string())?;
    let r = &v["report"];
    let readings = r["readings"].as_array().cloned().unwrap_or_default();
    let ratio = |label: &str| {
        readings
            .iter()
            .find(|x| x["label"] == label)
            .and_then(|x| x["ratio"].as_f64())
            .unwrap_or(f64::NAN)
    };
    let (sec, tab) = (ratio("published-seconds"), ratio("published-table-units"));
    ensure(
        r["n_q"] == 26 && sec > 1e10 && tab > 1e10 && r["upper_bound"] == true,
        format!(
            "n_q = {}, ratio {sec:.3e} (seconds) / {tab:.3e} (table units), upper_bound = {}",
            r["n_q"], r["upper_bound"]
        ),
    )
}

fn unique_interior_minimum(spec: &HardwareSpec) -> Result<(u32, f64, bool), String> {
    let rows = sweep_nodes(
        1e7,
        spec,
        CollisionFormula::Cohort,
        1..=spec.cluster.n_nodes_max,
    );
    let best = optimal_nodes(
        1e7,
        spec,
        CollisionFormula::Cohort,
        1..=spec.cluster.n_nodes_max,
    )
    .map_err(|e| e.to_string())?;
    let k = best.n_nodes as usize;
    let ties = rows
        .iter()
        .filter(|r| r.t_step <= best.t_step * (1.0 + 1e-12))
        .count();
    let interior = k > 1 && k < rows.len() && ties == 1;
    Ok((best.n_nodes, best.mlups, interior))
}

fn node_optimum() -> Result<String, String> {
    let (n_def, _, u_def) = unique_interior_minimum(&HardwareSpec::default())?;
    let (n_cal, _, u_cal) = unique_interior_minimum(&HardwareSpec::calibrated())?;
    ensure(
        u_def && u_cal && (10..=160).contains(&n_def) && n_cal.abs_diff(52) <= 5,
        format!("n* = {n_def} (defaults, unique {u_def}), {n_cal} (calibrated, unique {u_cal})"),
    )
}

fn mlups_band() -> Result<String, String> {
    let (_, m_def, _) = unique_interior_minimum(&HardwareSpec::default())?;
    let (_, m_cal, _) = unique_interior_minimum(&HardwareSpec::calibrated())?;
    let band = 1.2e4..=1.2e5;
    ensure(
        band.contains(&m_def) && band.contains(&m_cal),
        format!("{m_def:.0} MLUPS (defaults), {m_cal:.0} MLUPS (calibrated)"),
    )
}

fn classical_solver() -> Result<String, String> {
    let ((couette_err, couette_steps), t_couette) = timed(|| {
        let (n, u) = (32, 0.05);
        let b = BoundarySpec::couette(u);
        let mut s = LatticeState::uniform(n, n, 1.0, 1.0, [0.0, 0.0]).unwrap();
        let mut prev = compute_macros(&s).unwrap().ux;
        let mut steps = 0;
        while steps < 100_000 {
            s = step(&s, &b).unwrap();
            steps += 1;
            if steps % 200 == 0 {
                let ux = compute_macros(&s).unwrap().ux;
                let change = ux
                    .iter()
                    .zip(&prev)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                prev = ux;
                if change < 1e-13 {
                    break;
                }
            }
        }
        let m = compute_macros(&s).unwrap();
        let mut err: f64 = 0.0;
        for y in 0..n {
            let exact = u * (y as f64 + 0.5) / n as f64;
            for x in 0..n {
                let i = m.index(x, y);
                err = err.max((m.ux[i] - exact).abs()).max(m.uy[i].abs());
            }
        }
        (err, steps)
    });
    let (drift, t_mass) = timed(|| {
        let mut m = MacroFields::uniform(32, 32, 1.0, [0.0, 0.0]);
        for y in 0..32 {
            for x in 0..32 {
                let i = m.index(x, y);
                let (fx, fy) = (x as f64 / 32.0, y as f64 / 32.0);
                m.rho[i] = 1.0 + 0.01 * (2.0 * std::f64::consts::PI * fx).cos();
                m.ux[i] = 0.05 * (2.0 * std::f64::consts::PI * fy).sin();
            }
        }
        let mut s = LatticeState::from_macros(&m, 0.7).unwrap();
        let m0 = s.total_mass();
        let b = BoundarySpec::periodic();
        for _ in 0..1000 {
            s = step(&s, &b).unwrap();
        }
        ((s.total_mass() - m0) / m0).abs()
    });
    let limit = Duration::from_secs(30);
    ensure(
        couette_err <= 1e-6 && drift <= 1e-12 && t_couette < limit && t_mass < limit,
        format!(
            "Couette L-inf {couette_err:.2e} after {couette_steps} steps ({t_couette:.2?}), \
             mass drift {drift:.2e} ({t_mass:.2?})"
        ),
    )
}

fn algebraic_mode() -> Result<String, String> {
    let b = BoundarySpec::couette(0.05);
    let mut m = MacroFields::uniform(4, 4, 1.0, [0.0, 0.0]);
    for y in 0..4 {
        for x in 0..4 {
            let i = m.index(x, y);
            m.ux[i] = 0.04 * (std::f64::consts::FRAC_PI_2 * y as f64).sin();
            m.rho[i] = 1.0 + 0.01 * x as f64 / 4.0;
        }
    }
    let mut classical = LatticeState::from_macros(&m, 0.8).map_err(|e| e.to_string())?;
    let mut field = VariationalField::encode_exact(&classical, 8).map_err(|e| e.to_string())?;
    let opts = StepOptions {
        mode: StepMode::Algebraic,
        algebraic_fit: GradientBudget {
            max_iters: 0,
            ..GradientBudget::default()
        },
        ..StepOptions::default()
    };
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        field = vqcfd_step(&field, &b, &opts).map_err(|e| e.to_string())?.0;
        classical = step(&classical, &b).map_err(|e| e.to_string())?;
        let decoded = field.decode().map_err(|e| e.to_string())?;
        for v in 0..9 {
            for (a, c) in decoded.field(v).iter().zip(classical.field(v)) {
                worst = worst.max((a - c).abs());
            }
        }
    }
    ensure(
        worst <= 1e-10,
        format!("max |f_alg - f_classical| = {worst:.2e} over 50 steps"),
    )
}

fn variational_gap() -> Result<String, String> {
    let (reports, dt) = timed(|| -> Result<_, String> {
        let noiseless = verify_convergence(&VerifyConfig::default()).map_err(|e| e.to_string())?;
        let noisy = verify_convergence(&VerifyConfig {
            shots: Some(10_000),
            ..VerifyConfig::default()
        })
        .map_err(|e| e.to_string())?;
        Ok((noiseless, noisy))
    });
    let (a, b) = reports?;
    let cfg = &a.config;
    ensure(
        a.max_gap <= 0.05 && b.max_gap <= 0.15 && dt < Duration::from_secs(600),
        format!(
            "{}x{}, L = {}, {} iterations, {} traces each: max gap {:.4} noiseless, {:.4} at 1e4 shots ({dt:.1?})",
            cfg.nx,
            cfg.ny,
            cfg.layers,
            cfg.spsa_iters,
            a.n_traces(),
            a.max_gap,
            b.max_gap
        ),
    )
}

fn pqc_training() -> Result<String, String> {
    let cfg = AnsatzConfig::new(4, 8).map_err(|e| e.to_string())?;
    let target: Vec<f64> = (0..16)
        .map(|i| 1.0 + 0.5 * (2.0 * std::f64::consts::PI * i as f64 / 16.0).sin())
        .collect();
    let fit = train_pqc(
        &target,
        &cfg,
        &TrainMethod::Gradient(GradientBudget::default()),
    )
    .map_err(|e| e.to_string())?;
    let psi = real_amplitudes(&fit.theta, &cfg).map_err(|e| e.to_string())?;
    let recovered: Vec<f64> = psi.iter().map(|a| fit.scale * a).collect();
    let norm = target.iter().map(|t| t * t).sum::<f64>().sqrt();
    let linf = recovered
        .iter()
        .zip(&target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(
        fit.fidelity >= 0.999 && linf <= 0.05 * norm,
        format!(
            "F = {:.6}, L-inf {linf:.3e} vs bound {:.3e}",
            fit.fidelity,
            0.05 * norm
        ),
    )
}

fn shot_noise_scaling() -> Result<String, String> {
    let spread = |n_shots: u64| {
        let mut stream = ShotModel { n_shots, seed: 11 }.stream();
        let xs: Vec<f64> = (0..200).map(|_| stream.estimate(0.3, 1.0)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
    };
    let ratio = spread(1_000) / spread(100_000);
    ensure(
        (5.0..=20.0).contains(&ratio),
        format!("sigma(1e3) / sigma(1e5) = {ratio:.3}, expected 10"),
    )
}

fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Result<String, String> {
    let commands: [&[&str]; 7] = [
        &["lbm", "run", "--steps", "500"],
        &[
            "vqcfd", "verify", "--steps", "1", "--iters", "300", "--shots", "10000",
        ],
        &["pqc", "train", "--method", "spsa", "--iters", "500"],
        &["qperf", "fit", "--table", "both"],
        &["cperf", "sweep"],
        &["crossover"],
        &["q5e7"],
    ];
    let mut files = 0;
    for args in commands {
        let a = tempfile::tempdir().map_err(|e| e.to_string())?;
        let b = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut full = vec!["--seed", "42"];
        full.extend_from_slice(args);
        run_cli(a.path(), &full)?;
        run_cli(b.path(), &full)?;
        let (ta, tb) = (read_tree(a.path()), read_tree(b.path()));
        if ta != tb {
            return Err(format!("`{}` differs between runs", args.join(" ")));
        }
        files += ta.len();
    }
    Ok(format!(
        "7 subcommands run twice, {files} files byte-identical"
    ))
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("small-circuit refit R2", table1_r2),
        ("large-circuit refit adjusted R2", table2_adjusted_r2),
        ("per-step quantum time at n_q = 4", tq_hand_chain),
        (
            "50M-point ratio is a labelled upper bound",
            q5e7_upper_bound,
        ),
        ("node-count optimum", node_optimum),
        ("MLUPS at the optimum", mlups_band),
        (
            "classical solver accuracy and conservation",
            classical_solver,
        ),
        ("algebraic mode equals classical solver", algebraic_mode),
        ("variational convergence gap", variational_gap),
        ("PQC training fidelity", pqc_training),
        ("shot-noise scaling", shot_noise_scaling),
        ("determinism of CLI outputs", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2} {name}: {detail}", i + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
