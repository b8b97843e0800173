//! Numerical laboratory for graphical mean curvature flow.

pub mod barriers;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod solver;
pub mod translators;

pub use error::{Error, Result};
