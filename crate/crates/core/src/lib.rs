pub mod cli;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod mild_solver;
pub mod multiplier;
pub mod params;
pub mod potential;
pub mod quad;
pub mod regimes;
pub mod specfun;
pub mod symbol;

pub use error::{Error, Result};
