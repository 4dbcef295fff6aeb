//! Independent reference computations used to validate the solvers.

mod eigen;
mod radial;
mod scaling;

pub use eigen::{dense_dirichlet_eigen, EigenPair, MAX_EIGEN_NODES};
pub use radial::{radial_to_field, shooting_center_value, solve_radial, RadialSolution};
pub use scaling::{scaling_check, ScalingReport};
