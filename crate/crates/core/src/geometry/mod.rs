//! Exact event-driven dynamics of identical elastic disks on a square table.

mod ball;
pub mod collision;
mod event;
mod table;
mod vec2;
mod world;

pub use ball::BallState;
pub use collision::{
    minimum_image, resolve_ball_collision, resolve_wall_collision, time_to_ball_collision,
    time_to_ball_collision_periodic, time_to_wall_collision, time_to_wrap, wrap, Axis, WallId,
    CONTACT_TOL, OVERLAP_TOL, TIE_WINDOW,
};
pub use event::{CollisionEvent, EventKind};
pub use table::{Boundary, TableConfig, DEFAULT_SIDE, MAX_PACKING};
pub use vec2::Vec2;
pub use world::{random_balls, ShockDetail, Step, World, WorldCounters};
