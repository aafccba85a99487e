//! Mean-interpolated semi-norms on `M_n(ℂ)`.

pub mod cli;
pub mod engine;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod meanlib;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use meanlib::{mean_eval, path_eval, MeanKind};
pub use scalar::Real;
pub use states::{state_eval, MixedState, PureState, State, StateClass};

pub type Matrix = ComplexMatrix<f64>;
pub type Matrix32 = ComplexMatrix<f32>;
