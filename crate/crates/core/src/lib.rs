//! Continuous square roots of piecewise-monotone interval maps of height one.

pub mod cli;
pub mod conditions;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod kernel;
pub mod monotone;
pub mod pm;
pub mod recipe;
pub mod verify;

pub use error::{Error, Result};
pub use pm::PmFunction;
