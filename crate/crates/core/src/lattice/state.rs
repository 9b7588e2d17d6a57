use super::d2q9::D2Q9;
use super::solver::equilibrium;
use crate::{Error, Result};

/// Nine population fields on an `nx` by `ny` grid plus the BGK relaxation time.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    nx: usize,
    ny: usize,
    tau: f64,
    f: [Vec<f64>; 9],
}

impl LatticeState {
    /// A state with every population set to zero. Mostly useful as a canvas
    /// for tests that place single populations by hand.
    pub fn zeros(nx: usize, ny: usize, tau: f64) -> Result<Self> {
        Self::check_shape(nx, ny, tau)?;
        Ok(Self {
            nx,
            ny,
            tau,
            f: std::array::from_fn(|_| vec![0.0; nx * ny]),
        })
    }

    /// Uniform equilibrium at density `rho` and velocity `u`.
    pub fn uniform(nx: usize, ny: usize, tau: f64, rho: f64, u: [f64; 2]) -> Result<Self> {
        Self::check_shape(nx, ny, tau)?;
        let feq = equilibrium(rho, u);
        Ok(Self {
            nx,
            ny,
            tau,
            f: std::array::from_fn(|v| vec![feq[v]; nx * ny]),
        })
    }

    /// Equilibrium populations built from per-cell macroscopic fields.
    pub fn from_macros(macros: &MacroFields, tau: f64) -> Result<Self> {
        let mut state = Self::zeros(macros.nx, macros.ny, tau)?;
        for i in 0..macros.rho.len() {
            let feq = equilibrium(macros.rho[i], [macros.ux[i], macros.uy[i]]);
            for v in 0..9 {
                state.f[v][i] = feq[v];
            }
        }
        Ok(state)
    }

    /// Wraps nine explicit population fields.
    pub fn from_fields(nx: usize, ny: usize, tau: f64, fields: [Vec<f64>; 9]) -> Result<Self> {
        Self::check_shape(nx, ny, tau)?;
        for field in &fields {
            if field.len() != nx * ny {
                return Err(Error::LengthMismatch {
                    expected: nx * ny,
                    got: field.len(),
                });
            }
            if field.iter().any(|x| !x.is_finite()) {
                return Err(Error::Config("population fields must be finite".into()));
            }
        }
        Ok(Self {
            nx,
            ny,
            tau,
            f: fields,
        })
    }

    fn check_shape(nx: usize, ny: usize, tau: f64) -> Result<()> {
        if nx == 0 || ny == 0 {
            return Err(Error::Config(format!("grid {nx}x{ny} is empty")));
        }
        if !(tau > 0.5) || !tau.is_finite() {
            return Err(Error::Config(format!(
                "relaxation time tau = {tau} must exceed 0.5"
            )));
        }
        Ok(())
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Number of grid cells, `nx * ny`.
    pub fn n_grid(&self) -> usize {
        self.nx * self.ny
    }

    /// Kinematic viscosity in lattice units, `c_s^2 (tau - 1/2)`.
    pub fn viscosity(&self) -> f64 {
        D2Q9::SOUND_SPEED_SQ * (self.tau - 0.5)
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.nx + x
    }

    pub fn field(&self, v: usize) -> &[f64] {
        &self.f[v]
    }

    pub fn field_mut(&mut self, v: usize) -> &mut [f64] {
        &mut self.f[v]
    }

    pub fn fields(&self) -> &[Vec<f64>; 9] {
        &self.f
    }

    pub fn into_fields(self) -> [Vec<f64>; 9] {
        self.f
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, v: usize) -> f64 {
        self.f[v][y * self.nx + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: usize, value: f64) {
        let i = self.index(x, y);
        self.f[v][i] = value;
    }

    /// The nine populations of one cell.
    #[inline]
    pub fn cell(&self, i: usize) -> [f64; 9] {
        std::array::from_fn(|v| self.f[v][i])
    }

    pub fn total_mass(&self) -> f64 {
        // Summed cell by cell in a fixed order so the result is reproducible.
        (0..self.n_grid())
            .map(|i| self.cell(i).iter().sum::<f64>())
            .sum()
    }

    pub fn is_finite(&self) -> bool {
        self.f
            .iter()
            .all(|field| field.iter().all(|x| x.is_finite()))
    }
}

/// Density and velocity fields derived from the populations.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroFields {
    pub nx: usize,
    pub ny: usize,
    pub rho: Vec<f64>,
    pub ux: Vec<f64>,
    pub uy: Vec<f64>,
}

impl MacroFields {
    pub fn uniform(nx: usize, ny: usize, rho: f64, u: [f64; 2]) -> Self {
        let n = nx * ny;
        Self {
            nx,
            ny,
            rho: vec![rho; n],
            ux: vec![u[0]; n],
            uy: vec![u[1]; n],
        }
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.nx + x
    }

    /// Streamfunction obtained by integrating `ux` upward from the south edge,
    /// `psi(x, y) = sum_{y' <= y} ux(x, y')`.
    pub fn streamfunction(&self) -> Vec<f64> {
        let mut psi = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            let mut acc = 0.0;
            for y in 0..self.ny {
                let i = self.index(x, y);
                acc += self.ux[i];
                psi[i] = acc;
            }
        }
        psi
    }
}
