use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::boundary::{BoundarySpec, Edge, EdgeCondition};
use super::solver::{compute_macros, step};
use super::state::{LatticeState, MacroFields};
use crate::{Error, Result};

/// Edge kind as written in a simulation config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Periodic,
    /// Stationary no-slip wall.
    Wall,
    /// Wall sliding tangentially with `u_wall`.
    MovingWall,
    /// Velocity inlet with normal speed `u_in`.
    MassInflow,
    /// Pressure outlet at density `rho_out`.
    PressureOutflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeKinds {
    pub north: EdgeKind,
    pub south: EdgeKind,
    pub east: EdgeKind,
    pub west: EdgeKind,
}

/// Simulation input file. Unknown keys are rejected.
///
/// ```toml
/// nx = 64
/// ny = 64
/// tau = 0.692
/// steps = 20000
/// snapshot_every = 5000
/// u_wall = 0.1
/// output_path = "cavity.csv"
///
/// [boundary]
/// north = "moving_wall"
/// south = "wall"
/// east = "wall"
/// west = "wall"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub nx: usize,
    pub ny: usize,
    pub tau: f64,
    pub steps: usize,
    pub snapshot_every: usize,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub u_wall: f64,
    #[serde(default)]
    pub u_in: f64,
    #[serde(default = "default_rho_out")]
    pub rho_out: f64,
    pub boundary: EdgeKinds,
}

fn default_rho_out() -> f64 {
    1.0
}

impl SimulationConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.snapshot_every == 0 {
            return Err(Error::Config("snapshot_every must be at least 1".into()));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Config("grid extents must be positive".into()));
        }
        if !(self.tau > 0.5) {
            return Err(Error::Config(format!("tau = {} must exceed 0.5", self.tau)));
        }
        self.boundary_spec().validate()
    }

    pub fn boundary_spec(&self) -> BoundarySpec {
        let resolve = |edge: Edge, kind: EdgeKind| -> EdgeCondition {
            let t = edge.tangent();
            let n = edge.inward_normal();
            match kind {
                EdgeKind::Periodic => EdgeCondition::Periodic,
                EdgeKind::Wall => EdgeCondition::wall(),
                EdgeKind::MovingWall => EdgeCondition::MovingWall {
                    u: [self.u_wall * t[0] as f64, self.u_wall * t[1] as f64],
                },
                EdgeKind::MassInflow => EdgeCondition::MassInflow {
                    u: [self.u_in * n[0] as f64, self.u_in * n[1] as f64],
                },
                EdgeKind::PressureOutflow => EdgeCondition::PressureOutflow { rho: self.rho_out },
            }
        };
        BoundarySpec {
            north: resolve(Edge::North, self.boundary.north),
            south: resolve(Edge::South, self.boundary.south),
            east: resolve(Edge::East, self.boundary.east),
            west: resolve(Edge::West, self.boundary.west),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub macros: MacroFields,
}

/// Runs from a fluid at rest (unit density) and records macroscopic fields
/// at step 0, every `snapshot_every` steps, and at the final step.
pub fn run_simulation(config: &SimulationConfig) -> Result<Vec<Snapshot>> {
    config.validate()?;
    let boundary = config.boundary_spec();
    let mut state = LatticeState::uniform(config.nx, config.ny, config.tau, 1.0, [0.0, 0.0])?;
    let mut snapshots = vec![Snapshot {
        step: 0,
        macros: compute_macros(&state)?,
    }];
    for n in 1..=config.steps {
        state = step(&state, &boundary).map_err(|e| match e {
            Error::DegenerateState { .. } => Error::Unstable { step: n },
            other => other,
        })?;
        if !state.is_finite() {
            return Err(Error::Unstable { step: n });
        }
        if n % config.snapshot_every == 0 || n == config.steps {
            snapshots.push(Snapshot {
                step: n,
                macros: compute_macros(&state).map_err(|_| Error::Unstable { step: n })?,
            });
        }
    }
    Ok(snapshots)
}

/// CSV with header `step,x,y,rho,ux,uy`, rows in snapshot then row-major order.
pub fn write_snapshots_csv<W: Write>(writer: W, snapshots: &[Snapshot]) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["step", "x", "y", "rho", "ux", "uy"])?;
    for snap in snapshots {
        let m = &snap.macros;
        for y in 0..m.ny {
            for x in 0..m.nx {
                let i = m.index(x, y);
                out.write_record([
                    snap.step.to_string(),
                    x.to_string(),
                    y.to_string(),
                    m.rho[i].to_string(),
                    m.ux[i].to_string(),
                    m.uy[i].to_string(),
                ])?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAVITY: &str = r#"
nx = 8
ny = 8
tau = 0.8
steps = 10
snapshot_every = 4
u_wall = 0.05

[boundary]
north = "moving_wall"
south = "wall"
east = "wall"
west = "wall"
"#;

    #[test]
    fn parses_and_runs_cavity_config() {
        let cfg = SimulationConfig::from_toml_str(CAVITY).unwrap();
        assert_eq!(
            cfg.boundary_spec().north,
            EdgeCondition::MovingWall { u: [0.05, 0.0] }
        );
        let snaps = run_simulation(&cfg).unwrap();
        let steps: Vec<usize> = snaps.iter().map(|s| s.step).collect();
        assert_eq!(steps, vec![0, 4, 8, 10]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = CAVITY.replace("u_wall", "u_wal");
        assert!(matches!(
            SimulationConfig::from_toml_str(&text),
            Err(Error::Toml(_))
        ));
    }

    #[test]
    fn csv_has_expected_header_and_row_count() {
        let cfg = SimulationConfig::from_toml_str(CAVITY).unwrap();
        let snaps = run_simulation(&cfg).unwrap();
        let mut buf = Vec::new();
        write_snapshots_csv(&mut buf, &snaps).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("step,x,y,rho,ux,uy"));
        assert_eq!(lines.count(), 4 * 64);
    }

    #[test]
    fn instability_reports_the_step() {
        let mut cfg = SimulationConfig::from_toml_str(CAVITY).unwrap();
        cfg.tau = 0.5000001;
        cfg.u_wall = 0.9;
        cfg.steps = 5000;
        match run_simulation(&cfg) {
            Err(Error::Unstable { step }) => assert!(step >= 1),
            other => panic!("expected instability, got {:?}", other.map(|s| s.len())),
        }
    }
}
