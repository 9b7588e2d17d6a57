use serde::{Deserialize, Serialize};

use super::statevector::StateVector;
use crate::{Error, Result};

/// Register size above which statevector construction fails fast.
pub const DEFAULT_MAX_QUBITS: usize = 14;

/// Layered ansatz: each layer applies `Ry(theta)` to every qubit, then
/// nearest-neighbour CZ gates in a brickwork pattern: even layers entangle the
/// pairs `(0,1), (2,3), ...`, odd layers `(1,2), (3,4), ...`.
///
/// All CZ gates commute, so a full CZ chain after every layer collapses into
/// one fixed diagonal; that variant only reaches a 10-dimensional family of
/// 4-qubit states however deep it is. Alternating the pairs restores access to
/// the whole real unit sphere (15 dimensions at 4 qubits) from 8 layers on.
///
/// Parameters are laid out layer-major: `theta[layer * n_qubits + q]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzConfig {
    pub n_qubits: usize,
    pub layers: usize,
    pub max_qubits: usize,
}

impl AnsatzConfig {
    pub fn new(n_qubits: usize, layers: usize) -> Result<Self> {
        Self::with_limit(n_qubits, layers, DEFAULT_MAX_QUBITS)
    }

    pub fn with_limit(n_qubits: usize, layers: usize, max_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Config("ansatz needs at least one qubit".into()));
        }
        if layers == 0 {
            return Err(Error::Config("ansatz needs at least one layer".into()));
        }
        if n_qubits > max_qubits {
            return Err(Error::TooManyQubits {
                requested: n_qubits,
                limit: max_qubits,
            });
        }
        Ok(Self {
            n_qubits,
            layers,
            max_qubits,
        })
    }

    /// `layers * n_qubits`; two layers give the `2 N_q` count of the
    /// reference prototype.
    pub fn n_params(&self) -> usize {
        self.layers * self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn check_params(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params() {
            return Err(Error::ParameterLength {
                got: theta.len(),
                expected: self.n_params(),
            });
        }
        Ok(())
    }
}

/// Prepares the ansatz state from `|0...0>` on the complex statevector.
pub fn build_state(theta: &[f64], cfg: &AnsatzConfig) -> Result<StateVector> {
    cfg.check_params(theta)?;
    let n = cfg.n_qubits;
    let mut state = StateVector::zero_state(n);
    for (l, layer) in theta.chunks(n).enumerate() {
        for (q, &angle) in layer.iter().enumerate() {
            state.apply_ry(q, angle);
        }
        for q in entangled_pairs(n, l) {
            state.apply_cz(q, q + 1);
        }
    }
    Ok(state)
}

// Real-valued kernels. The ansatz only uses real gates, so training runs on
// plain f64 vectors; `build_state` is the complex reference they are tested
// against.

#[inline]
fn ry_real(amps: &mut [f64], q: usize, theta: f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let j = i | bit;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = c * a0 - s * a1;
            amps[j] = s * a0 + c * a1;
        }
    }
}

/// `dRy/dtheta` applied to `amps` in place.
#[inline]
fn ry_real_derivative(amps: &mut [f64], q: usize, theta: f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    let bit = 1usize << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let j = i | bit;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = 0.5 * (-s * a0 - c * a1);
            amps[j] = 0.5 * (c * a0 - s * a1);
        }
    }
}

/// Lower qubit of each CZ pair in layer `layer`.
fn entangled_pairs(n: usize, layer: usize) -> impl Iterator<Item = usize> {
    (layer % 2..n.saturating_sub(1)).step_by(2)
}

#[inline]
fn cz_layer_real(amps: &mut [f64], n: usize, layer: usize) {
    for q in entangled_pairs(n, layer) {
        let mask = (1usize << q) | (1usize << (q + 1));
        for (i, a) in amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
    }
}

/// Real amplitudes of the ansatz state.
pub fn real_amplitudes(theta: &[f64], cfg: &AnsatzConfig) -> Result<Vec<f64>> {
    cfg.check_params(theta)?;
    Ok(real_amplitudes_unchecked(theta, cfg.n_qubits))
}

pub(crate) fn real_amplitudes_unchecked(theta: &[f64], n: usize) -> Vec<f64> {
    let mut amps = vec![0.0; 1 << n];
    amps[0] = 1.0;
    for (l, layer) in theta.chunks(n).enumerate() {
        for (q, &angle) in layer.iter().enumerate() {
            ry_real(&mut amps, q, angle);
        }
        cz_layer_real(&mut amps, n, l);
    }
    amps
}

/// Overlap `<psi(theta), target>` and its exact gradient with respect to
/// every angle, by a reverse (adjoint) sweep through the circuit.
pub fn overlap_and_gradient(
    theta: &[f64],
    cfg: &AnsatzConfig,
    target: &[f64],
) -> Result<(f64, Vec<f64>)> {
    cfg.check_params(theta)?;
    if target.len() != cfg.dim() {
        return Err(Error::LengthMismatch {
            expected: cfg.dim(),
            got: target.len(),
        });
    }
    Ok(overlap_and_gradient_unchecked(theta, cfg.n_qubits, target))
}

pub(crate) fn overlap_and_gradient_unchecked(
    theta: &[f64],
    n: usize,
    target: &[f64],
) -> (f64, Vec<f64>) {
    let mut psi = real_amplitudes_unchecked(theta, n);
    let overlap: f64 = psi.iter().zip(target).map(|(a, b)| a * b).sum();
    let mut lambda = target.to_vec();
    let mut grad = vec![0.0; theta.len()];
    let mut scratch = vec![0.0; psi.len()];
    let layers = theta.len() / n;
    for layer in (0..layers).rev() {
        // CZ layers are diagonal with +-1 entries: self-inverse and symmetric.
        cz_layer_real(&mut psi, n, layer);
        cz_layer_real(&mut lambda, n, layer);
        for q in (0..n).rev() {
            let angle = theta[layer * n + q];
            ry_real(&mut psi, q, -angle);
            scratch.copy_from_slice(&psi);
            ry_real_derivative(&mut scratch, q, angle);
            grad[layer * n + q] = lambda.iter().zip(&scratch).map(|(l, d)| l * d).sum();
            ry_real(&mut lambda, q, -angle);
        }
    }
    (overlap, grad)
}
