use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One of the four domain edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    North,
    South,
    East,
    West,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::North, Edge::South, Edge::East, Edge::West];

    /// Unit normal pointing into the fluid.
    pub fn inward_normal(self) -> [i32; 2] {
        match self {
            Edge::North => [0, -1],
            Edge::South => [0, 1],
            Edge::East => [-1, 0],
            Edge::West => [1, 0],
        }
    }

    /// Unit tangent along the edge.
    pub fn tangent(self) -> [i32; 2] {
        match self {
            Edge::North | Edge::South => [1, 0],
            Edge::East | Edge::West => [0, 1],
        }
    }
}

/// Boundary treatment on one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeCondition {
    Periodic,
    /// Half-way bounce-back wall moving with velocity `u` (zero for a
    /// stationary wall).
    MovingWall {
        u: [f64; 2],
    },
    /// Zou-He velocity inlet with prescribed velocity `u`.
    MassInflow {
        u: [f64; 2],
    },
    /// Zou-He pressure outlet with prescribed density `rho`.
    PressureOutflow {
        rho: f64,
    },
}

impl EdgeCondition {
    pub fn wall() -> Self {
        EdgeCondition::MovingWall { u: [0.0, 0.0] }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, EdgeCondition::Periodic)
    }

    /// Whether the edge is closed by the Zou-He step after streaming.
    pub fn is_zou_he(&self) -> bool {
        matches!(
            self,
            EdgeCondition::MassInflow { .. } | EdgeCondition::PressureOutflow { .. }
        )
    }
}

/// Conditions on all four edges of the rectangular domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub north: EdgeCondition,
    pub south: EdgeCondition,
    pub east: EdgeCondition,
    pub west: EdgeCondition,
}

impl BoundarySpec {
    pub fn periodic() -> Self {
        Self {
            north: EdgeCondition::Periodic,
            south: EdgeCondition::Periodic,
            east: EdgeCondition::Periodic,
            west: EdgeCondition::Periodic,
        }
    }

    /// Plane Couette flow: periodic in x, stationary south wall, north wall
    /// sliding with `u_wall` along +x.
    pub fn couette(u_wall: f64) -> Self {
        Self {
            north: EdgeCondition::MovingWall { u: [u_wall, 0.0] },
            south: EdgeCondition::wall(),
            east: EdgeCondition::Periodic,
            west: EdgeCondition::Periodic,
        }
    }

    /// Lid-driven cavity: three stationary walls and a lid moving along +x.
    pub fn cavity(u_lid: f64) -> Self {
        Self {
            north: EdgeCondition::MovingWall { u: [u_lid, 0.0] },
            south: EdgeCondition::wall(),
            east: EdgeCondition::wall(),
            west: EdgeCondition::wall(),
        }
    }

    /// Channel along +x with a velocity inlet on the west edge and a pressure
    /// outlet on the east edge; north/south as given.
    pub fn channel(u_in: f64, rho_out: f64, lateral: EdgeCondition) -> Self {
        Self {
            north: lateral,
            south: lateral,
            east: EdgeCondition::PressureOutflow { rho: rho_out },
            west: EdgeCondition::MassInflow { u: [u_in, 0.0] },
        }
    }

    pub fn get(&self, edge: Edge) -> EdgeCondition {
        match edge {
            Edge::North => self.north,
            Edge::South => self.south,
            Edge::East => self.east,
            Edge::West => self.west,
        }
    }

    pub fn x_periodic(&self) -> bool {
        self.east.is_periodic()
    }

    pub fn y_periodic(&self) -> bool {
        self.north.is_periodic()
    }

    pub fn validate(&self) -> Result<()> {
        if self.east.is_periodic() != self.west.is_periodic() {
            return Err(Error::Boundary(
                "east and west must both be periodic or both non-periodic".into(),
            ));
        }
        if self.north.is_periodic() != self.south.is_periodic() {
            return Err(Error::Boundary(
                "north and south must both be periodic or both non-periodic".into(),
            ));
        }
        for edge in Edge::ALL {
            match self.get(edge) {
                EdgeCondition::MovingWall { u } | EdgeCondition::MassInflow { u } => {
                    if !u.iter().all(|c| c.is_finite()) {
                        return Err(Error::Boundary(format!("{edge:?}: non-finite velocity")));
                    }
                }
                EdgeCondition::PressureOutflow { rho } => {
                    if !(rho > 0.0) || !rho.is_finite() {
                        return Err(Error::Boundary(format!(
                            "{edge:?}: outflow density {rho} must be positive"
                        )));
                    }
                }
                EdgeCondition::Periodic => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatched_periodic_pair_is_rejected() {
        let mut spec = BoundarySpec::periodic();
        spec.east = EdgeCondition::wall();
        assert!(matches!(spec.validate(), Err(Error::Boundary(_))));
        assert!(BoundarySpec::couette(0.1).validate().is_ok());
        assert!(BoundarySpec::cavity(0.1).validate().is_ok());
    }

    #[test]
    fn outflow_density_must_be_positive() {
        let spec = BoundarySpec::channel(0.05, 0.0, EdgeCondition::Periodic);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn normals_and_tangents_are_orthogonal_units() {
        for edge in Edge::ALL {
            let n = edge.inward_normal();
            let t = edge.tangent();
            assert_eq!(n[0] * t[0] + n[1] * t[1], 0);
            assert_eq!(n[0].abs() + n[1].abs(), 1);
        }
    }
}
