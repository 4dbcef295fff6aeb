pub mod asymptotics;
pub mod cli;
pub mod ergodic;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod norms;
pub mod oracles;
pub mod pde;

pub use error::{Error, Result};
