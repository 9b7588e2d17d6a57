use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::records::TimingRecord;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    /// `c0 + c1 x`
    Linear,
    /// `c0 + c1 x + c2 x^2`
    Quadratic,
    /// `c0 x`
    Proportional,
}

impl FitKind {
    pub fn n_coefficients(self) -> usize {
        match self {
            FitKind::Linear => 2,
            FitKind::Quadratic => 3,
            FitKind::Proportional => 1,
        }
    }
}

/// How a fit's output maps to seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitScale {
    /// Output is already in seconds.
    #[default]
    Seconds,
    /// Output is in units of 1e-4 s, like the tables' runtime column.
    TableUnits,
}

impl UnitScale {
    pub fn factor(self) -> f64 {
        match self {
            UnitScale::Seconds => 1.0,
            UnitScale::TableUnits => 1e-4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitScale::Seconds => "seconds",
            UnitScale::TableUnits => "table-units",
        }
    }
}

impl std::str::FromStr for UnitScale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seconds" => Ok(UnitScale::Seconds),
            "table-units" => Ok(UnitScale::TableUnits),
            other => Err(Error::Config(format!(
                "unknown unit scale `{other}` (seconds|table-units)"
            ))),
        }
    }
}

/// Mean circuit time as a function of qubits per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitTimeFit {
    pub kind: FitKind,
    /// Lowest power first.
    pub coefficients: Vec<f64>,
    pub r2: Option<f64>,
    pub adjusted_r2: Option<f64>,
    /// 95% interval per coefficient.
    pub ci95: Option<Vec<(f64, f64)>>,
    pub n: usize,
    pub unit_scale: UnitScale,
}

impl CircuitTimeFit {
    /// Small-circuit IBM coefficients as published.
    pub fn published_small(unit_scale: UnitScale) -> Self {
        Self::published(
            FitKind::Linear,
            vec![0.0006784, 0.00017502],
            Some(0.55),
            unit_scale,
        )
    }

    /// Large-circuit IBM coefficients as published.
    pub fn published_large(unit_scale: UnitScale) -> Self {
        Self::published(
            FitKind::Quadratic,
            vec![0.00181582, 0.01748484, 0.01597166],
            Some(0.86),
            unit_scale,
        )
    }

    /// IonQ small-circuit model, `9.66e-3 N_q` seconds.
    pub fn ionq_small() -> Self {
        Self {
            ci95: Some(vec![(9.36e-3, 9.96e-3)]),
            ..Self::published(
                FitKind::Proportional,
                vec![9.66e-3],
                None,
                UnitScale::Seconds,
            )
        }
    }

    fn published(
        kind: FitKind,
        coefficients: Vec<f64>,
        adjusted_r2: Option<f64>,
        unit_scale: UnitScale,
    ) -> Self {
        Self {
            kind,
            coefficients,
            r2: None,
            adjusted_r2,
            ci95: None,
            n: 0,
            unit_scale,
        }
    }

    pub fn with_unit_scale(mut self, unit_scale: UnitScale) -> Self {
        self.unit_scale = unit_scale;
        self
    }

    /// Raw model output in the fit's own units.
    pub fn eval(&self, n_q: f64) -> f64 {
        match self.kind {
            FitKind::Proportional => self.coefficients[0] * n_q,
            _ => self
                .coefficients
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * n_q + c),
        }
    }

    pub fn seconds(&self, n_q: f64) -> f64 {
        self.eval(n_q) * self.unit_scale.factor()
    }
}

/// Ordinary least squares of runtime (table units) on `n_q`.
pub fn fit_linear(records: &[TimingRecord]) -> Result<CircuitTimeFit> {
    let (x, y) = columns(records);
    fit_polynomial(&x, &y, 1)
}

/// Least squares on `(1, n_q, n_q^2)`.
pub fn fit_quadratic(records: &[TimingRecord]) -> Result<CircuitTimeFit> {
    let (x, y) = columns(records);
    fit_polynomial(&x, &y, 2)
}

fn columns(records: &[TimingRecord]) -> (Vec<f64>, Vec<f64>) {
    records
        .iter()
        .map(|r| (r.n_q as f64, r.runtime_e4s))
        .unzip()
}

/// Polynomial OLS of degree 1 or 2 through a Householder QR of the design
/// matrix. Needs at least `degree + 2` points so the residual variance has a
/// degree of freedom. The result is in table units.
pub fn fit_polynomial(x: &[f64], y: &[f64], degree: usize) -> Result<CircuitTimeFit> {
    let kind = match degree {
        1 => FitKind::Linear,
        2 => FitKind::Quadratic,
        _ => return Err(Error::Config(format!("unsupported degree {degree}"))),
    };
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let p = degree + 1;
    let n = x.len();
    if n < p + 1 {
        return Err(Error::InsufficientData {
            got: n,
            need: p + 1,
        });
    }
    let design = DMatrix::from_fn(n, p, |i, j| x[i].powi(j as i32));
    let yv = DVector::from_column_slice(y);

    let qr = design.clone().qr();
    let r = qr.r();
    let diag_max = (0..p).map(|j| r[(j, j)].abs()).fold(0.0, f64::max);
    if (0..p).any(|j| r[(j, j)].abs() <= 1e-10 * diag_max.max(f64::MIN_POSITIVE)) {
        return Err(Error::Degenerate(
            "design matrix is rank deficient (too few distinct n_q values)".into(),
        ));
    }
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;

    let fitted = &design * &beta;
    let ss_res: f64 = (&yv - &fitted).iter().map(|e| e * e).sum();
    let mean = yv.mean();
    let ss_tot: f64 = yv.iter().map(|v| (v - mean).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        0.0
    };
    let dof = (n - p) as f64;
    let adjusted_r2 = 1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof;

    // (X^T X)^-1 = R^-1 R^-T
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::Degenerate("singular triangular factor".into()))?;
    let cov = &r_inv * r_inv.transpose() * (ss_res / dof);
    let t = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::Degenerate(e.to_string()))?
        .inverse_cdf(0.975);
    let ci95 = (0..p)
        .map(|j| {
            let half = t * cov[(j, j)].max(0.0).sqrt();
            (beta[j] - half, beta[j] + half)
        })
        .collect();

    Ok(CircuitTimeFit {
        kind,
        coefficients: beta.iter().copied().collect(),
        r2: Some(r2),
        adjusted_r2: Some(adjusted_r2),
        ci95: Some(ci95),
        n,
        unit_scale: UnitScale::TableUnits,
    })
}
