//! Norms and spectral calculus built on the Hermitian eigensolver.

use num_complex::Complex;

use super::eigen::{hermitian_eigen, HermitianEigen, HERMITIAN_TOL};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default Loewner-order slack, relative to `max(1, ‖A‖, ‖B‖)`.
pub const LOEWNER_TOL: f64 = 1e-9;
/// Default band below zero that `psd_power` clamps, relative to `‖H‖`.
pub const PSD_TOL: f64 = 1e-10;

const GELFAND_MAX_STEPS: usize = 48;
const GELFAND_REL_TOL: f64 = 1e-8;

fn eigen<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    hermitian_eigen(h, T::lit(HERMITIAN_TOL).max(T::lit(64.0) * T::epsilon()))
}

/// Largest singular value, `sqrt(λ_max(A*A))`.
pub fn operator_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    if a.is_zero() {
        return T::zero();
    }
    // A*A is exactly Hermitian by construction, so the eigensolver cannot reject it.
    match eigen(&a.gram()) {
        Ok(e) => e.max().max(T::zero()).sqrt(),
        Err(_) => a.frobenius_norm(),
    }
}

/// Top right singular vector of `A` (top eigenvector of `A*A`) and `‖A‖`.
pub fn top_singular<T: Real>(a: &ComplexMatrix<T>) -> Result<(T, Vec<Complex<T>>)> {
    let e = eigen(&a.gram())?;
    let n = e.dim();
    Ok((e.max().max(T::zero()).sqrt(), e.vector(n - 1)))
}

/// `|A| = (A*A)^{1/2}`.
///
/// Eigenvalues of `A*A` below `16·ε·λ_max` are rounding noise of a zero
/// singular value and are set to zero before taking the square root.
pub fn abs_matrix<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let e = eigen(&a.gram())?;
    let cutoff = T::lit(16.0) * T::epsilon() * e.max().max(T::zero());
    Ok(e.recompose(|l| if l <= cutoff { T::zero() } else { l.sqrt() }))
}

/// `H^p` for a Hermitian PSD matrix via eigenvalue clamping (`0^0 := 1`).
pub fn psd_power<T: Real>(h: &ComplexMatrix<T>, p: T, tol: T) -> Result<ComplexMatrix<T>> {
    if !p.is_finite() || p < T::zero() {
        return Err(Error::Domain(format!("power exponent must be finite and >= 0, got {p}")));
    }
    let e = eigen(h)?;
    check_psd(&e, tol)?;
    Ok(e.recompose(|l| l.max(T::zero()).powf(p)))
}

fn check_psd<T: Real>(e: &HermitianEigen<T>, tol: T) -> Result<()> {
    let norm = e.spectral_norm();
    if e.min() < -tol * norm {
        return Err(Error::NotPsd {
            lambda_min: e.min().as_f64(),
        });
    }
    Ok(())
}

/// Result of a Loewner-order comparison `A ≤ B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoewnerComparison<T> {
    pub holds: bool,
    /// `λ_min(B - A)`.
    pub witness: T,
}

/// Tests `A ≤ B`, i.e. `λ_min(B - A) ≥ -tol·max(1, ‖A‖, ‖B‖)`.
pub fn loewner_leq<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>, tol: T) -> Result<LoewnerComparison<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let na = eigen(a)?.spectral_norm();
    let nb = eigen(b)?.spectral_norm();
    let witness = eigen(&(b - a))?.min();
    let scale = T::one().max(na).max(nb);
    Ok(LoewnerComparison {
        holds: witness >= -tol * scale,
        witness,
    })
}

/// Spectral radius by normalized repeated squaring.
///
/// With `B_0 = A` and `B_{k+1} = (B_k / ‖B_k‖)²`, the Gelfand estimate
/// `r_k = ‖A^{2^k}‖^{1/2^k}` equals `exp(Σ_{j<k} ln‖B_j‖ / 2^j + ln‖B_k‖ / 2^k)`.
/// Stops once successive estimates agree within `1e-8·max(1, r_k)` or after 48 squarings.
pub fn spectral_radius<T: Real>(a: &ComplexMatrix<T>) -> T {
    let mut b = a.clone();
    let mut acc = T::zero();
    let mut weight = T::one();
    let mut prev: Option<T> = None;
    let tol = T::lit(GELFAND_REL_TOL);
    for k in 0..=GELFAND_MAX_STEPS {
        let nk = operator_norm(&b);
        if nk == T::zero() {
            return T::zero();
        }
        let ln = nk.ln();
        let r = (acc + ln * weight).exp();
        if let Some(p) = prev {
            if (r - p).abs() <= tol * T::one().max(p) {
                return r;
            }
        }
        if k == GELFAND_MAX_STEPS {
            return r;
        }
        acc = acc + ln * weight;
        weight = weight * T::lit(0.5);
        let bn = b.scale_real(T::one() / nk);
        b = bn.matmul(&bn);
        prev = Some(r);
    }
    unreachable!("loop returns by the final step")
}

/// Scalar functions available to the spectral calculus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectralFunction<T> {
    /// `t^p`, `p ≥ 0`, on a PSD spectrum.
    Power(T),
    Exp,
    /// Requires `λ_min > tol`.
    Log,
    Square,
}

/// `f(H)` via eigendecomposition.
pub fn apply_scalar_function<T: Real>(h: &ComplexMatrix<T>, f: SpectralFunction<T>, tol: T) -> Result<ComplexMatrix<T>> {
    match f {
        SpectralFunction::Power(p) => psd_power(h, p, tol),
        SpectralFunction::Exp => Ok(eigen(h)?.recompose(|l| l.exp())),
        SpectralFunction::Square => Ok(eigen(h)?.recompose(|l| l * l)),
        SpectralFunction::Log => {
            let e = eigen(h)?;
            if e.min() <= tol {
                return Err(Error::Domain(format!(
                    "log requires a positive spectrum, smallest eigenvalue {}",
                    e.min()
                )));
            }
            Ok(e.recompose(|l| l.ln()))
        }
    }
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min<T: Real>(h: &ComplexMatrix<T>) -> Result<T> {
    Ok(eigen(h)?.min())
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max<T: Real>(h: &ComplexMatrix<T>) -> Result<T> {
    Ok(eigen(h)?.max())
}
