use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::ansatz::{overlap_and_gradient_unchecked, real_amplitudes_unchecked, AnsatzConfig};
use super::encoding::norm;
use crate::vqcfd::spsa::{spsa_minimize, SpsaConfig};
use crate::{Error, Result};

/// Budget for the gradient (BFGS on exact adjoint gradients) trainer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradientBudget {
    /// BFGS iterations per restart.
    pub max_iters: usize,
    /// Number of starts; the first uses the supplied initial point (or zeros),
    /// the rest are uniform in `[-pi, pi)`.
    pub restarts: usize,
    pub seed: u64,
    /// Stop once `1 - overlap` falls below this.
    pub tolerance: f64,
}

impl Default for GradientBudget {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            restarts: 8,
            seed: 0,
            tolerance: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrainMethod {
    Gradient(GradientBudget),
    Spsa(SpsaConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub theta: Vec<f64>,
    /// `<psi(theta), target / |target|>`.
    pub overlap: f64,
    /// Squared overlap.
    pub fidelity: f64,
    /// Norm of the target; the scale that decodes the trained state.
    pub scale: f64,
}

/// Fits ansatz angles so the prepared state points along `target`.
pub fn train_pqc(target: &[f64], cfg: &AnsatzConfig, method: &TrainMethod) -> Result<TrainResult> {
    train_pqc_from(target, cfg, method, None)
}

/// As [`train_pqc`], starting the first run from `initial`.
pub fn train_pqc_from(
    target: &[f64],
    cfg: &AnsatzConfig,
    method: &TrainMethod,
    initial: Option<&[f64]>,
) -> Result<TrainResult> {
    let len = target.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    if len != cfg.dim() {
        return Err(Error::LengthMismatch {
            expected: cfg.dim(),
            got: len,
        });
    }
    let scale = norm(target);
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::ZeroVector);
    }
    if let Some(init) = initial {
        cfg.check_params(init)?;
    }
    let unit: Vec<f64> = target.iter().map(|x| x / scale).collect();
    let n = cfg.n_qubits;
    let start = initial
        .map(|s| s.to_vec())
        .unwrap_or_else(|| vec![0.0; cfg.n_params()]);

    let (theta, overlap) = match method {
        TrainMethod::Gradient(budget) => {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            let mut best: Option<(Vec<f64>, f64)> = None;
            for r in 0..budget.restarts.max(1) {
                let x0 = if r == 0 {
                    start.clone()
                } else {
                    (0..cfg.n_params())
                        .map(|_| rng.random_range(-PI..PI))
                        .collect()
                };
                let (x, o) =
                    bfgs_maximise_overlap(x0, n, &unit, budget.max_iters, budget.tolerance);
                if best.as_ref().is_none_or(|b| o > b.1) {
                    best = Some((x, o));
                }
                if 1.0 - best.as_ref().unwrap().1 <= budget.tolerance {
                    break;
                }
            }
            best.unwrap()
        }
        TrainMethod::Spsa(spsa) => {
            let cost = |theta: &[f64]| {
                let psi = real_amplitudes_unchecked(theta, n);
                1.0 - psi.iter().zip(&unit).map(|(a, b)| a * b).sum::<f64>()
            };
            let out = spsa_minimize(cost, &start, spsa)?;
            let o = 1.0 - cost(&out.theta);
            (out.theta, o)
        }
    };
    Ok(TrainResult {
        theta,
        overlap,
        fidelity: overlap * overlap,
        scale,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense BFGS with Armijo backtracking on `1 - overlap`.
fn bfgs_maximise_overlap(
    mut x: Vec<f64>,
    n_qubits: usize,
    unit: &[f64],
    max_iters: usize,
    tolerance: f64,
) -> (Vec<f64>, f64) {
    let p = x.len();
    let eval = |x: &[f64]| {
        let (o, g) = overlap_and_gradient_unchecked(x, n_qubits, unit);
        (1.0 - o, g.into_iter().map(|v| -v).collect::<Vec<f64>>())
    };
    let identity = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..p {
            h[i * p + i] = 1.0;
        }
    };
    let mut h = vec![0.0; p * p];
    identity(&mut h);
    let (mut f, mut g) = eval(&x);
    let mut fresh = true;

    for _ in 0..max_iters {
        if f <= tolerance || g.iter().all(|v| v.abs() < 1e-13) {
            break;
        }
        let mut d: Vec<f64> = (0..p).map(|i| -dot(&h[i * p..(i + 1) * p], &g)).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            identity(&mut h);
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
            fresh = true;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let (ft, gt) = eval(&trial);
            if ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            if fresh {
                break;
            }
            identity(&mut h);
            fresh = true;
            continue;
        };
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-18 {
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..p).map(|i| dot(&h[i * p..(i + 1) * p], &y)).collect();
            let yhy = dot(&y, &hy);
            // H <- H - rho (H y s^T + s y^T H) + (rho^2 y^T H y + rho) s s^T
            for i in 0..p {
                for j in 0..p {
                    h[i * p + j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh = false;
        }
        let stalled = (f - f_new).abs() <= 1e-16 * f.abs().max(1e-300);
        x = x_new;
        f = f_new;
        g = g_new;
        if stalled && fresh {
            break;
        }
    }
    (x, 1.0 - f)
}
