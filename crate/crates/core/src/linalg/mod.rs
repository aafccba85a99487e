//! Dense complex matrix kernel.

mod eigen;
mod json;
mod matrix;
mod spectral;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen, HERMITIAN_TOL, JACOBI_SWEEPS, JACOBI_THRESHOLD};
pub use matrix::ComplexMatrix;
pub(crate) use matrix::{inner, vec_norm};
pub use spectral::{
    abs_matrix, apply_scalar_function, lambda_max, lambda_min, loewner_leq, operator_norm, psd_power,
    spectral_radius, top_singular, LoewnerComparison, SpectralFunction, LOEWNER_TOL, PSD_TOL,
};
