//! Discrete calculus on the periodic box.

mod field;
mod grid;
mod norms;
mod ops;

pub use field::{MatrixField2, ScalarField, VectorField2};
pub use grid::{Grid2, Spectrum};
pub use norms::{local_lp_norm, mean_zero, trapezoid_window, BallMask, BallSpec};
pub use ops::*;
