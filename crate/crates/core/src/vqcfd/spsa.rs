//! Simultaneous-perturbation stochastic approximation.
//!
//! ```text
//! a_k = a / (k + 1 + A)^alpha
//! c_k = c / (k + 1)^gamma
//! delta_k ~ Rademacher(+-1)^n
//! g_k = [C(theta + c_k delta) - C(theta - c_k delta)] / (2 c_k) * delta
//! theta <- theta - a_k g_k
//! ```
//!
//! Exactly two cost evaluations per iteration, independent of the number of
//! parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    /// Learning-rate numerator.
    pub a: f64,
    /// Perturbation size numerator.
    pub c: f64,
    /// Stability offset `A`.
    pub big_a: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            a: 0.1,
            c: 0.01,
            big_a: 100.0,
            alpha: 0.602,
            gamma: 0.101,
            max_iters: 1000,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    /// Defaults for a given iteration budget: `A` is 10% of `max_iters`.
    pub fn with_budget(max_iters: usize, seed: u64) -> Self {
        Self {
            big_a: 0.1 * max_iters as f64,
            max_iters,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !(self.c > 0.0) {
            return Err(Error::Config("SPSA gains a and c must be positive".into()));
        }
        if !(self.big_a >= 0.0) {
            return Err(Error::Config(
                "SPSA stability offset A must be non-negative".into(),
            ));
        }
        if !(0.0 < self.gamma && self.gamma < self.alpha && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "SPSA exponents need 0 < gamma < alpha <= 1 (gamma = {}, alpha = {})",
                self.gamma, self.alpha
            )));
        }
        Ok(())
    }

    pub fn gain(&self, k: usize) -> f64 {
        self.a / (k as f64 + 1.0 + self.big_a).powf(self.alpha)
    }

    pub fn perturbation(&self, k: usize) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpsaOutcome {
    /// Lowest-cost point among all evaluated points.
    pub theta: Vec<f64>,
    pub best_cost: f64,
    /// Iterate after the last update.
    pub final_theta: Vec<f64>,
    /// Per iteration, the mean of the two cost evaluations.
    pub trace: Vec<f64>,
    pub evaluations: usize,
}

fn rademacher(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// Minimises `cost` starting from `theta0`.
pub fn spsa_minimize<F>(mut cost: F, theta0: &[f64], cfg: &SpsaConfig) -> Result<SpsaOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    cfg.validate()?;
    let n = theta0.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut theta = theta0.to_vec();
    let mut best = (f64::INFINITY, theta.clone());
    let mut trace = Vec::with_capacity(cfg.max_iters);
    let mut evaluations = 0;
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];

    for k in 0..cfg.max_iters {
        let ak = cfg.gain(k);
        let ck = cfg.perturbation(k);
        let delta = rademacher(&mut rng, n);
        for i in 0..n {
            plus[i] = theta[i] + ck * delta[i];
            minus[i] = theta[i] - ck * delta[i];
        }
        let y_plus = cost(&plus);
        let y_minus = cost(&minus);
        evaluations += 2;
        if !y_plus.is_finite() || !y_minus.is_finite() {
            return Err(Error::NonFiniteCost { iteration: k });
        }
        if y_plus < best.0 {
            best = (y_plus, plus.clone());
        }
        if y_minus < best.0 {
            best = (y_minus, minus.clone());
        }
        trace.push(0.5 * (y_plus + y_minus));
        let slope = (y_plus - y_minus) / (2.0 * ck);
        for i in 0..n {
            theta[i] -= ak * slope * delta[i];
        }
    }

    if cfg.max_iters == 0 {
        best = (cost(&theta), theta.clone());
        evaluations += 1;
    }
    Ok(SpsaOutcome {
        theta: best.1,
        best_cost: best.0,
        final_theta: theta,
        trace,
        evaluations,
    })
}

/// Standard gain rule: picks `a` so that the first update moves each
/// parameter by about `target_step`, using `samples` gradient magnitudes
/// measured at `theta0`. These evaluations are separate from the
/// minimisation budget.
pub fn calibrate_gain<F>(
    mut cost: F,
    theta0: &[f64],
    cfg: &SpsaConfig,
    target_step: f64,
    samples: usize,
) -> Result<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    cfg.validate()?;
    let n = theta0.len();
    // Separate stream so calibration does not shift the optimiser's perturbations.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_ca1b);
    let ck = cfg.perturbation(0);
    let mut total = 0.0;
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for s in 0..samples.max(1) {
        let delta = rademacher(&mut rng, n);
        for i in 0..n {
            plus[i] = theta0[i] + ck * delta[i];
            minus[i] = theta0[i] - ck * delta[i];
        }
        let (yp, ym) = (cost(&plus), cost(&minus));
        if !yp.is_finite() || !ym.is_finite() {
            return Err(Error::NonFiniteCost { iteration: s });
        }
        total += ((yp - ym) / (2.0 * ck)).abs();
    }
    let mean = total / samples.max(1) as f64;
    if mean <= f64::EPSILON {
        return Ok(cfg.a);
    }
    Ok(target_step * (1.0 + cfg.big_a).powf(cfg.alpha) / mean)
}
