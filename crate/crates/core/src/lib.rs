//! Geometry and probability of the cocked hat: the triangle formed by three
//! noisy bearing rays toward a fixed target, and the cell structure of the
//! lines through many such rays.

pub mod arrangement;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod geometry;
pub mod rng;
pub mod scenarios;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{Angle, Point2};
