use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default table side in pixels.
pub const DEFAULT_SIDE: f64 = 4096.0;

/// Hard cap on the disk-area fraction accepted by [`TableConfig::validate`].
pub const MAX_PACKING: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Specular reflection on the four borders.
    #[default]
    Walls,
    /// Opposite borders identified; balls leave and re-enter with the same velocity.
    Periodic,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Walls => "walls",
            Boundary::Periodic => "periodic",
        })
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "walls" | "wall" => Ok(Boundary::Walls),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::Config(format!("unknown boundary `{other}`"))),
        }
    }
}

/// Square table holding `n_balls` identical disks of radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub side: f64,
    pub radius: f64,
    pub n_balls: usize,
    #[serde(default)]
    pub boundary: Boundary,
    /// Count wall reflections in the per-ball shock counters (off by default).
    #[serde(default)]
    pub count_wall_shocks: bool,
}

impl TableConfig {
    pub fn new(n_balls: usize, radius: f64) -> Self {
        Self {
            side: DEFAULT_SIDE,
            radius,
            n_balls,
            boundary: Boundary::Walls,
            count_wall_shocks: false,
        }
    }

    /// Table of the default side whose disk-area fraction equals `void_ratio`.
    pub fn with_void_ratio(n_balls: usize, void_ratio: f64) -> Self {
        let side = DEFAULT_SIDE;
        let radius = side * (void_ratio / (PI * n_balls as f64)).sqrt();
        Self::new(n_balls, radius)
    }

    pub fn boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn side(mut self, side: f64) -> Self {
        self.side = side;
        self
    }

    /// Disk-area packing fraction `N_b·π·R²/L²`.
    pub fn void_ratio(&self) -> f64 {
        self.n_balls as f64 * PI * self.radius * self.radius / (self.side * self.side)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(Error::Config(format!("table side must be positive, got {}", self.side)));
        }
        if !(self.radius >= 1.0 && self.radius <= self.side / 4.0) {
            return Err(Error::Config(format!(
                "radius {} outside [1, L/4 = {}]",
                self.radius,
                self.side / 4.0
            )));
        }
        if self.n_balls < 2 {
            return Err(Error::Config(format!("need at least 2 balls, got {}", self.n_balls)));
        }
        if self.void_ratio() >= MAX_PACKING {
            return Err(Error::Config(format!(
                "packing fraction {:.3} exceeds the {} cap",
                self.void_ratio(),
                MAX_PACKING
            )));
        }
        Ok(())
    }
}
