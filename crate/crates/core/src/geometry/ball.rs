use serde::{Deserialize, Serialize};

use super::Vec2;

/// One disk: position, velocity and the number of shocks it has taken part in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallState {
    pub id: usize,
    pub pos: Vec2,
    pub vel: Vec2,
    pub shocks: u64,
}

impl BallState {
    pub fn new(id: usize, pos: Vec2, vel: Vec2) -> Self {
        Self {
            id,
            pos,
            vel,
            shocks: 0,
        }
    }

    /// Position after free flight of `dt`.
    #[inline]
    pub fn position_at(&self, dt: f64) -> Vec2 {
        self.pos + self.vel * dt
    }
}
