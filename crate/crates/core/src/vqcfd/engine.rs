use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cost::projected_cost;
use super::field::{VariableEncoding, VariationalField};
use super::spsa::{calibrate_gain, spsa_minimize, SpsaConfig};
use crate::lattice::{step, BoundarySpec, LatticeState};
use crate::quantum::{norm, train_pqc_from, AnsatzConfig, GradientBudget, ShotModel, TrainMethod};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMode {
    Algebraic,
    Variational,
}

/// Where each per-step optimisation starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMode {
    /// From the previous step's angles.
    Warm,
    /// From all-zero angles (the `|0...0>` state).
    Cold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    pub mode: StepMode,
    pub spsa: SpsaConfig,
    /// Replace `spsa.a` by the standard gain rule (first step ~`target_step` rad).
    pub calibrate_gain: bool,
    pub target_step: f64,
    pub shots: Option<ShotModel>,
    pub start: StartMode,
    /// Exact-minimum oracle; `None` skips the reference line.
    pub oracle: Option<GradientBudget>,
    /// Best-fit angles kept next to the verbatim field in algebraic mode.
    pub algebraic_fit: GradientBudget,
}

impl Default for StepOptions {
    fn default() -> Self {
        let spsa = SpsaConfig::with_budget(1000, 0);
        Self {
            mode: StepMode::Variational,
            spsa,
            calibrate_gain: true,
            target_step: 0.05,
            shots: None,
            start: StartMode::Warm,
            oracle: Some(oracle_budget(spsa.max_iters, 0)),
            algebraic_fit: GradientBudget {
                max_iters: 200,
                restarts: 1,
                seed: 0,
                tolerance: 1e-12,
            },
        }
    }
}

/// Oracle budget: 20 times the per-step iteration budget and 8 starts.
pub fn oracle_budget(step_iters: usize, seed: u64) -> GradientBudget {
    GradientBudget {
        max_iters: 20 * step_iters.max(1),
        restarts: 8,
        seed,
        tolerance: 1e-14,
    }
}

/// Cost history of one variable during one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub variable: usize,
    /// Cost seen by the optimiser at each iteration.
    pub costs: Vec<f64>,
    /// Noiseless cost at the starting angles.
    pub initial_cost: f64,
    /// Noiseless cost at the returned angles.
    pub final_cost: f64,
    pub exact_min: Option<f64>,
}

impl ConvergenceTrace {
    /// `(C_final - C_min) / (C_0 - C_min)`; `None` without a reference line.
    pub fn gap(&self) -> Option<f64> {
        let min = self.exact_min?;
        let span = self.initial_cost - min;
        if span.abs() <= f64::EPSILON * self.initial_cost.abs().max(1.0) {
            return Some(0.0);
        }
        Some((self.final_cost - min) / span)
    }
}

/// All nine one-step targets: the classical collide-stream-close update of
/// the decoded state.
pub fn build_targets(current: &LatticeState, boundary: &BoundarySpec) -> Result<[Vec<f64>; 9]> {
    Ok(step(current, boundary)?.into_fields())
}

/// Target for variable `v` alone.
pub fn build_target(v: usize, current: &LatticeState, boundary: &BoundarySpec) -> Result<Vec<f64>> {
    if v >= 9 {
        return Err(Error::Config(format!("variable index {v} out of range")));
    }
    let mut all = build_targets(current, boundary)?;
    Ok(std::mem::take(&mut all[v]))
}

/// `|t|^2 (1 - F*)` with `F*` the best fidelity of a long gradient search.
pub fn exact_min_cost(target: &[f64], cfg: &AnsatzConfig, budget: &GradientBudget) -> Result<f64> {
    exact_min_cost_from(target, cfg, budget, None)
}

fn exact_min_cost_from(
    target: &[f64],
    cfg: &AnsatzConfig,
    budget: &GradientBudget,
    initial: Option<&[f64]>,
) -> Result<f64> {
    let fit = train_pqc_from(target, cfg, &TrainMethod::Gradient(*budget), initial)?;
    let n2 = norm(target).powi(2);
    Ok((n2 * (1.0 - fit.fidelity)).max(0.0))
}

/// Advances the encoded state by one time step.
pub fn vqcfd_step(
    field: &VariationalField,
    boundary: &BoundarySpec,
    opts: &StepOptions,
) -> Result<(VariationalField, Vec<ConvergenceTrace>)> {
    let current = field.decode()?;
    let targets = build_targets(&current, boundary)?;
    let ansatz = field.ansatz;

    let results: Vec<Result<(VariableEncoding, ConvergenceTrace)>> = (0..9usize)
        .into_par_iter()
        .map(|v| match opts.mode {
            StepMode::Algebraic => {
                algebraic_variable(v, &field.vars[v], &targets[v], &ansatz, opts)
            }
            StepMode::Variational => {
                variational_variable(v, &field.vars[v], &targets[v], &ansatz, opts)
            }
        })
        .collect();

    let mut vars = Vec::with_capacity(9);
    let mut traces = Vec::with_capacity(9);
    for r in results {
        let (enc, trace) = r?;
        vars.push(enc);
        traces.push(trace);
    }
    Ok((
        VariationalField {
            vars,
            ..field.clone()
        },
        traces,
    ))
}

fn algebraic_variable(
    v: usize,
    previous: &VariableEncoding,
    target: &[f64],
    ansatz: &AnsatzConfig,
    opts: &StepOptions,
) -> Result<(VariableEncoding, ConvergenceTrace)> {
    let t_norm = norm(target);
    let theta = if opts.algebraic_fit.max_iters > 0 && t_norm > 0.0 {
        train_pqc_from(
            target,
            ansatz,
            &TrainMethod::Gradient(opts.algebraic_fit),
            Some(&previous.theta),
        )?
        .theta
    } else {
        previous.theta.clone()
    };
    let (fit_cost, _) = projected_cost(&theta, target, ansatz, None)?;
    Ok((
        VariableEncoding {
            theta,
            scale: t_norm,
            exact: Some(target.to_vec()),
        },
        ConvergenceTrace {
            variable: v,
            costs: vec![fit_cost],
            initial_cost: fit_cost,
            final_cost: fit_cost,
            // The stored field is the target itself.
            exact_min: Some(0.0),
        },
    ))
}

fn variational_variable(
    v: usize,
    previous: &VariableEncoding,
    target: &[f64],
    ansatz: &AnsatzConfig,
    opts: &StepOptions,
) -> Result<(VariableEncoding, ConvergenceTrace)> {
    let theta0 = match opts.start {
        StartMode::Warm => previous.theta.clone(),
        StartMode::Cold => vec![0.0; ansatz.n_params()],
    };
    let mut spsa = opts.spsa;
    spsa.seed ^= v as u64;
    let shots = opts.shots.map(|s| s.with_seed(s.seed ^ v as u64));
    let mut noise = shots.map(|s| s.stream());

    let mut eval_error = None;
    let mut noisy_cost = |theta: &[f64]| match projected_cost(theta, target, ansatz, noise.as_mut())
    {
        Ok((c, _)) => c,
        Err(e) => {
            eval_error.get_or_insert(e);
            f64::NAN
        }
    };
    if opts.calibrate_gain {
        let a = calibrate_gain(&mut noisy_cost, &theta0, &spsa, opts.target_step, 10)?;
        // Near a stationary start the measured slope vanishes; bound the gain
        // by the slope scale of the cost itself, |t|^2 per radian.
        let floor = 1e-2 * norm(target).powi(2);
        let cap =
            opts.target_step * (1.0 + spsa.big_a).powf(spsa.alpha) / floor.max(f64::MIN_POSITIVE);
        spsa.a = a.min(cap);
    }
    let outcome = spsa_minimize(&mut noisy_cost, &theta0, &spsa);
    if let Some(e) = eval_error {
        return Err(e);
    }
    let outcome = outcome?;

    let (initial_cost, _) = projected_cost(&theta0, target, ansatz, None)?;
    let (final_cost, exact_mp) = projected_cost(&outcome.theta, target, ansatz, None)?;
    // Scale update uses the multi-product as measured.
    let scale = match noise.as_mut() {
        Some(n) => n.estimate(exact_mp, norm(target)),
        None => exact_mp,
    };
    let exact_min = match &opts.oracle {
        Some(budget) => {
            let mut b = *budget;
            b.seed ^= v as u64;
            Some(exact_min_cost_from(target, ansatz, &b, Some(&theta0))?)
        }
        None => None,
    };
    Ok((
        VariableEncoding {
            theta: outcome.theta,
            scale,
            exact: None,
        },
        ConvergenceTrace {
            variable: v,
            costs: outcome.trace,
            initial_cost,
            final_cost,
            exact_min,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{collide, compute_macros, equilibrium, stream, MacroFields};
    use crate::quantum::real_amplitudes;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_stable_state(seed: u64) -> LatticeState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = MacroFields::uniform(4, 4, 1.0, [0.0, 0.0]);
        for i in 0..16 {
            m.rho[i] = 1.0 + rng.random_range(-0.05..0.05);
            m.ux[i] = rng.random_range(-0.05..0.05);
            m.uy[i] = rng.random_range(-0.05..0.05);
        }
        let mut s = LatticeState::from_macros(&m, 0.8).unwrap();
        for v in 0..9 {
            for f in s.field_mut(v) {
                *f *= 1.0 + rng.random_range(-0.02..0.02);
            }
        }
        s
    }

    #[test]
    fn rest_state_targets_are_weights() {
        let s = LatticeState::uniform(4, 4, 0.8, 1.0, [0.0, 0.0]).unwrap();
        let targets = build_targets(&s, &BoundarySpec::periodic()).unwrap();
        for v in 0..9 {
            for &t in &targets[v] {
                assert!((t - crate::lattice::D2Q9::WEIGHTS[v]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unit_tau_targets_are_streamed_equilibrium() {
        let mut s = random_stable_state(3);
        s = LatticeState::from_fields(4, 4, 1.0, s.into_fields()).unwrap();
        let m = compute_macros(&s).unwrap();
        let mut eq = s.clone();
        for i in 0..16 {
            let feq = equilibrium(m.rho[i], [m.ux[i], m.uy[i]]);
            for v in 0..9 {
                eq.field_mut(v)[i] = feq[v];
            }
        }
        let expected = stream(&eq, &BoundarySpec::periodic()).unwrap();
        for v in 0..9 {
            let t = build_target(v, &s, &BoundarySpec::periodic()).unwrap();
            assert_eq!(t, expected.field(v));
        }
    }

    #[test]
    fn targets_equal_classical_step_columns() {
        let s = random_stable_state(8);
        let b = BoundarySpec::couette(0.05);
        let reference = stream(&collide(&s).unwrap(), &b).unwrap();
        for v in 0..9 {
            assert_eq!(build_target(v, &s, &b).unwrap(), reference.field(v));
        }
    }

    #[test]
    fn exact_min_is_zero_for_representable_targets() {
        let cfg = AnsatzConfig::new(4, 8).unwrap();
        let mut e0 = vec![0.0; 16];
        e0[0] = 3.0;
        assert_eq!(
            exact_min_cost(&e0, &cfg, &oracle_budget(100, 0)).unwrap(),
            0.0
        );

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let theta: Vec<f64> = (0..32).map(|_| rng.random_range(-3.0..3.0)).collect();
        let t: Vec<f64> = real_amplitudes(&theta, &cfg)
            .unwrap()
            .iter()
            .map(|a| 0.7 * a)
            .collect();
        assert!(exact_min_cost(&t, &cfg, &oracle_budget(100, 0)).unwrap() <= 1e-10);
    }

    #[test]
    fn exact_min_of_smooth_target_is_small() {
        let cfg = AnsatzConfig::new(4, 8).unwrap();
        let t: Vec<f64> = (0..16)
            .map(|i| 1.0 + 0.5 * (std::f64::consts::PI * i as f64 / 8.0).cos())
            .collect();
        let n2: f64 = t.iter().map(|x| x * x).sum();
        assert!(exact_min_cost(&t, &cfg, &oracle_budget(1000, 0)).unwrap() <= 1e-3 * n2);
    }

    #[test]
    fn algebraic_step_matches_classical_step() {
        let s = random_stable_state(4);
        let b = BoundarySpec::couette(0.05);
        let field = VariationalField::encode_exact(&s, 8).unwrap();
        let opts = StepOptions {
            mode: StepMode::Algebraic,
            ..StepOptions::default()
        };
        let (next, traces) = vqcfd_step(&field, &b, &opts).unwrap();
        assert_eq!(traces.len(), 9);
        let classical = step(&s, &b).unwrap();
        assert_eq!(next.decode().unwrap(), classical);
    }

    #[test]
    fn variational_rest_state_stays_at_zero_cost() {
        let s = LatticeState::uniform(4, 4, 0.8, 1.0, [0.0, 0.0]).unwrap();
        let field =
            VariationalField::encode(&s, 8, &TrainMethod::Gradient(GradientBudget::default()))
                .unwrap();
        let opts = StepOptions {
            spsa: SpsaConfig::with_budget(100, 1),
            oracle: Some(oracle_budget(100, 0)),
            ..StepOptions::default()
        };
        let (_, traces) = vqcfd_step(&field, &BoundarySpec::periodic(), &opts).unwrap();
        for t in &traces {
            let n2 = crate::lattice::D2Q9::WEIGHTS[t.variable].powi(2) * 16.0;
            assert!(
                t.initial_cost <= 1e-10 * n2,
                "v={} C0={}",
                t.variable,
                t.initial_cost
            );
            // SPSA only samples points a distance ~c from the start, so the
            // floor is of order n_params c^2 |t|^2.
            assert!(
                t.final_cost <= 1e-2 * n2,
                "v={} C={}",
                t.variable,
                t.final_cost
            );
        }
    }

    #[test]
    fn scale_update_is_least_squares_optimal() {
        let s = random_stable_state(6);
        let field =
            VariationalField::encode(&s, 8, &TrainMethod::Gradient(GradientBudget::default()))
                .unwrap();
        let opts = StepOptions {
            spsa: SpsaConfig::with_budget(50, 1),
            oracle: None,
            ..StepOptions::default()
        };
        let b = BoundarySpec::periodic();
        let (next, _) = vqcfd_step(&field, &b, &opts).unwrap();
        let targets = build_targets(&field.decode().unwrap(), &b).unwrap();
        for v in 0..9 {
            let psi = real_amplitudes(&next.vars[v].theta, &next.ansatz).unwrap();
            let mp: f64 = psi.iter().zip(&targets[v]).map(|(a, b)| a * b).sum();
            assert!((2.0 * next.vars[v].scale - 2.0 * mp).abs() <= 1e-12);
        }
    }

    #[test]
    fn variational_step_is_deterministic() {
        let s = random_stable_state(9);
        let field =
            VariationalField::encode(&s, 4, &TrainMethod::Gradient(GradientBudget::default()))
                .unwrap();
        let opts = StepOptions {
            spsa: SpsaConfig::with_budget(60, 5),
            shots: Some(ShotModel::new(10_000, 3).unwrap()),
            oracle: None,
            ..StepOptions::default()
        };
        let b = BoundarySpec::periodic();
        let a = vqcfd_step(&field, &b, &opts).unwrap();
        let c = vqcfd_step(&field, &b, &opts).unwrap();
        assert_eq!(a, c);
    }
}
