use num_complex::Complex64;

use crate::{Error, Result};

/// `2^n` complex amplitudes of an `n`-qubit register. Qubit `q` is bit `q`
/// of the basis-state index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|0...0>`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// Wraps explicit amplitudes; the length must be a power of two and the
    /// norm must be 1 within 1e-12.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "statevector norm^2 = {norm2}, expected 1"
            )));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn max_imaginary(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.im.abs())
            .fold(0.0, f64::max)
    }

    /// Real parts of the amplitudes.
    pub fn real_parts(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.re).collect()
    }

    /// `Ry(theta) = exp(-i theta Y / 2)` on qubit `q`.
    pub fn apply_ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (0.5 * theta).sin_cos();
        let bit = 1usize << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let j = i | bit;
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[j];
                self.amplitudes[i] = a0 * c - a1 * s;
                self.amplitudes[j] = a0 * s + a1 * c;
            }
        }
    }

    /// Controlled-Z between qubits `a` and `b`.
    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }
}
