//! Structure flags: normality, p-hyponormality, (α, β)-normality, a² = 0.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{hermitian_eigen, loewner_leq, operator_norm, psd_power, HERMITIAN_TOL, PSD_TOL};
use crate::Matrix;

/// Exponents at which p-hyponormality is reported.
pub const P_EXPONENTS: [f64; 3] = [0.25, 0.5, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub normal: bool,
    pub semi_hyponormal: bool,
    pub hyponormal: bool,
    /// Keyed by the exponent printed as a decimal (`"0.25"`, `"0.5"`, `"1"`).
    pub p_hyponormal: BTreeMap<String, bool>,
    pub alpha_beta: Option<AlphaBeta>,
    pub nilpotent2: bool,
    /// `hyponormal == normal` and `hyponormal ⟹ p(½) ⟹ p(¼)`.
    pub consistent: bool,
}

fn p_key(p: f64) -> String {
    format!("{p}")
}

/// `(a*a)^p ≥ (aa*)^p` in the Loewner order.
pub fn is_p_hyponormal(a: &Matrix, p: f64, tol: f64) -> Result<bool> {
    let left = psd_power(&a.gram(), p, PSD_TOL)?;
    let right = psd_power(&a.gram_adjoint(), p, PSD_TOL)?;
    Ok(loewner_leq(&right, &left, tol)?.holds)
}

/// `(α, β)` with `α²|a|² ≤ |a*|² ≤ β²|a|²`, from the spectrum of
/// `G = (|a|²)^{-1/2} |a*|² (|a|²)^{-1/2}`; `None` when `λ_min(a*a) ≤ tol`.
pub fn alpha_beta(a: &Matrix, tol: f64) -> Result<Option<AlphaBeta>> {
    let e = hermitian_eigen(&a.gram(), HERMITIAN_TOL)?;
    if e.min() <= tol {
        return Ok(None);
    }
    let inv_sqrt = e.recompose(|l| 1.0 / l.sqrt());
    let g = inv_sqrt.matmul(&a.gram_adjoint()).matmul(&inv_sqrt).hermitian_part();
    let ge = hermitian_eigen(&g, HERMITIAN_TOL)?;
    Ok(Some(AlphaBeta {
        alpha: ge.min().max(0.0).sqrt().min(1.0),
        beta: ge.max().max(0.0).sqrt().max(1.0),
    }))
}

pub fn classify(a: &Matrix, tol: f64) -> Result<StructureReport> {
    let norm2 = operator_norm(a).powi(2);
    let scale = norm2.max(1.0);
    let commutator = &a.gram() - &a.gram_adjoint();
    let normal = commutator.frobenius_norm() <= tol * scale;
    let mut p_hyponormal = BTreeMap::new();
    for p in P_EXPONENTS {
        p_hyponormal.insert(p_key(p), is_p_hyponormal(a, p, tol)?);
    }
    let hyponormal = p_hyponormal[&p_key(1.0)];
    let semi_hyponormal = p_hyponormal[&p_key(0.5)];
    let quarter = p_hyponormal[&p_key(0.25)];
    let consistent = hyponormal == normal && (!hyponormal || semi_hyponormal) && (!semi_hyponormal || quarter);
    let nilpotent2 = a.matmul(a).frobenius_norm() <= tol * scale;
    Ok(StructureReport {
        normal,
        semi_hyponormal,
        hyponormal,
        p_hyponormal,
        alpha_beta: alpha_beta(a, tol * scale)?,
        nilpotent2,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate::{generate, GeneratorKind};
    use crate::linalg::LOEWNER_TOL;
    use num_complex::Complex;

    #[test]
    fn diagonal_unitary_is_normal() {
        let a = Matrix::from_diag(&[Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)]);
        let r = classify(&a, LOEWNER_TOL).unwrap();
        assert!(r.normal && r.hyponormal && r.semi_hyponormal && r.consistent);
        let ab = r.alpha_beta.unwrap();
        assert!((ab.alpha - 1.0).abs() < 1e-12 && (ab.beta - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_example() {
        let a = Matrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        let r = classify(&a, LOEWNER_TOL).unwrap();
        assert!(r.nilpotent2 && !r.normal && !r.hyponormal && r.consistent);
        assert!(r.alpha_beta.is_none());
    }

    #[test]
    fn random_invertible_alpha_beta_is_valid() {
        for seed in 0..10 {
            let a = generate(GeneratorKind::Ginibre, 3, seed).a;
            // det G = det(aa*)/det(a*a) = 1, so the spectrum of G straddles 1.
            let e = hermitian_eigen(&a.gram(), 1e-10).unwrap();
            let inv = e.recompose(|l| 1.0 / l.sqrt());
            let g = inv.matmul(&a.gram_adjoint()).matmul(&inv).hermitian_part();
            let ge = hermitian_eigen(&g, 1e-10).unwrap();
            assert!(ge.min() <= 1.0 + 1e-9 && ge.max() >= 1.0 - 1e-9);
            let tr_a: f64 = a.gram().trace().re;
            assert!((tr_a - a.gram_adjoint().trace().re).abs() < 1e-10 * tr_a);

            let r = classify(&a, LOEWNER_TOL).unwrap();
            assert!(r.consistent && !r.normal);
            let ab = r.alpha_beta.unwrap();
            let lo = a.gram().scale_real(ab.alpha * ab.alpha);
            let hi = a.gram().scale_real(ab.beta * ab.beta);
            assert!(loewner_leq(&lo, &a.gram_adjoint(), 1e-9).unwrap().holds);
            assert!(loewner_leq(&a.gram_adjoint(), &hi, 1e-9).unwrap().holds);
        }
    }

    #[test]
    fn generated_normals_classify_as_normal() {
        for seed in 0..5 {
            let r = classify(&generate(GeneratorKind::Normal, 3, seed).a, LOEWNER_TOL).unwrap();
            assert!(r.normal && r.hyponormal && r.p_hyponormal["0.25"] && r.consistent);
        }
    }
}
