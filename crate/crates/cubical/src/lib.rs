//! Finite marked cubical sets over the cube categories with and without connections.
pub mod complex;
pub mod connect;
pub mod error;
pub mod functors;
pub mod homotopy;
pub mod opcalc;
pub mod simplex;

pub use error::{Error, Result};
