use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shot budget and seed for emulated measurement noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotModel {
    pub n_shots: u64,
    pub seed: u64,
}

impl ShotModel {
    pub fn new(n_shots: u64, seed: u64) -> Result<Self> {
        if n_shots == 0 {
            return Err(Error::Config("n_shots must be at least 1".into()));
        }
        Ok(Self { n_shots, seed })
    }

    /// Same shot count, different stream.
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    /// A fresh noise stream; equal seeds give equal streams.
    pub fn stream(&self) -> ShotNoise {
        ShotNoise {
            n_shots: self.n_shots,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
        }
    }
}

/// Owned noise stream of one [`ShotModel`].
#[derive(Debug, Clone)]
pub struct ShotNoise {
    n_shots: u64,
    rng: ChaCha8Rng,
}

impl ShotNoise {
    /// `exact + bound / sqrt(n_shots) * z` with `z` standard normal.
    pub fn estimate(&mut self, exact: f64, bound: f64) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        exact + bound.abs() / (self.n_shots as f64).sqrt() * z
    }

    pub fn n_shots(&self) -> u64 {
        self.n_shots
    }
}

/// Single shot-noised multi-product estimate drawn from a fresh stream of
/// `shots`.
pub fn estimate_multiproduct(exact: f64, bound: f64, shots: &ShotModel) -> f64 {
    shots.stream().estimate(exact, bound)
}
