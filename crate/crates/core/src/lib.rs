pub mod dispersion;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod info;
pub mod paired;
pub mod scaling;
pub mod seeds;
pub mod two_ball;

pub use error::{Error, Result};
