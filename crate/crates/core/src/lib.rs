//! Pseudo-spectral solver and diagnostics for the two-dimensional Oldroyd
//! viscoelastic system written in the deformation gradient `F`.

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod spectral;
pub mod tensor;

pub use dynamics::{InitSpec, InitVariant, ModelParams, RunConfig, State};
pub use error::{Error, Result};
pub use harness::{AnalysisConfig, RunFamily, Sweep};
pub use spectral::{BallMask, Grid2, MatrixField2, ScalarField, VectorField2};
pub use tensor::{Mat2, PiTriple};
