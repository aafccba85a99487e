//! Brute-force pure-state maximization for 2×2 matrices.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::meanlib::{path_unchecked, MeanKind};
use crate::scalar::Real;

pub const ORACLE_GRID: usize = 2048;
const REFINE_FACTOR: usize = 10;

/// `sqrt(max u σ_μ w)` over `x = (cos φ, e^{iψ} sin φ)`, `φ ∈ [0, π/2]`,
/// `ψ ∈ [0, 2π)`, on a `grid × grid` lattice plus one 10× refinement around
/// the best cell.
pub fn oracle_2x2<T: Real>(a: &ComplexMatrix<T>, mean: MeanKind, mu: T, grid: usize) -> Result<T> {
    Ok(oracle_2x2_many(a, &[(mean, mu)], grid)?[0])
}

/// Several `(mean, μ)` variants in one pass over the lattice.
pub fn oracle_2x2_many<T: Real>(a: &ComplexMatrix<T>, variants: &[(MeanKind, T)], grid: usize) -> Result<Vec<T>> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.dim(),
        });
    }
    if grid < 2 {
        return Err(Error::Domain(format!("oracle grid must be at least 2, got {grid}")));
    }
    for &(_, mu) in variants {
        if !(mu >= T::zero() && mu <= T::one()) {
            return Err(Error::Domain(format!("mu must lie in [0, 1], got {mu}")));
        }
    }
    let eval = Evaluator::new(a);
    let dphi = T::FRAC_PI_2() / T::lit((grid - 1) as f64);
    let dpsi = T::lit(2.0) * T::PI() / T::lit(grid as f64);

    let mut best = vec![(T::neg_infinity(), 0usize, 0usize); variants.len()];
    let psi_phases: Vec<Complex<T>> = (0..grid)
        .map(|j| {
            let psi = T::lit(j as f64) * dpsi;
            Complex::new(psi.cos(), psi.sin())
        })
        .collect();
    for i in 0..grid {
        let phi = T::lit(i as f64) * dphi;
        let (c, s) = (phi.cos(), phi.sin());
        for (j, ph) in psi_phases.iter().enumerate() {
            let (u, w) = eval.uw(c, *ph * s);
            for (slot, &(kind, mu)) in best.iter_mut().zip(variants) {
                let f = path_unchecked(kind, mu, u, w);
                if f > slot.0 {
                    *slot = (f, i, j);
                }
            }
        }
    }

    let fine = T::lit(REFINE_FACTOR as f64);
    let half = REFINE_FACTOR as i64;
    Ok(best
        .iter()
        .zip(variants)
        .map(|(&(f0, bi, bj), &(kind, mu))| {
            let mut f = f0;
            let phi0 = T::lit(bi as f64) * dphi;
            let psi0 = T::lit(bj as f64) * dpsi;
            for di in -half..=half {
                let phi = (phi0 + T::lit(di as f64) * dphi / fine).max(T::zero()).min(T::FRAC_PI_2());
                let (c, s) = (phi.cos(), phi.sin());
                for dj in -half..=half {
                    let psi = psi0 + T::lit(dj as f64) * dpsi / fine;
                    let (u, w) = eval.uw(c, Complex::new(psi.cos(), psi.sin()) * s);
                    f = f.max(path_unchecked(kind, mu, u, w));
                }
            }
            f.max(T::zero()).sqrt()
        })
        .collect())
}

struct Evaluator<T> {
    a: [Complex<T>; 4],
}

impl<T: Real> Evaluator<T> {
    fn new(a: &ComplexMatrix<T>) -> Self {
        Evaluator {
            a: [a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1)],
        }
    }

    /// `u = |⟨Ax,x⟩|²`, `w = ‖Ax‖²` for `x = (c, x2)` with `c` real.
    #[inline]
    fn uw(&self, c: T, x2: Complex<T>) -> (T, T) {
        let [a00, a01, a10, a11] = self.a;
        let y0 = a00 * c + a01 * x2;
        let y1 = a10 * c + a11 * x2;
        let q = y0 * c + y1 * x2.conj();
        (q.norm_sqr(), y0.norm_sqr() + y1.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn nilpotent() -> M {
        M::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap()
    }

    #[test]
    fn closed_forms_for_nilpotent() {
        // With t = |x₂|²: u = 4t(1-t), w = 4t.
        let a = nilpotent();
        let ar = oracle_2x2(&a, MeanKind::Arithmetic, 0.5, ORACLE_GRID).unwrap();
        assert!((ar - 2f64.sqrt()).abs() < 1e-4);
        let ge = oracle_2x2(&a, MeanKind::Geometric, 0.5, ORACLE_GRID).unwrap();
        assert!((ge - (8.0 / (3.0 * 3f64.sqrt())).sqrt()).abs() < 1e-4);
        let ha = oracle_2x2(&a, MeanKind::Harmonic, 0.5, ORACLE_GRID).unwrap();
        assert!((ha - (24.0 - 16.0 * 2f64.sqrt()).sqrt()).abs() < 1e-4);
    }

    #[test]
    fn spec_examples() {
        let id = M::identity(2);
        assert!((oracle_2x2(&id, MeanKind::Geometric, 0.3, 256).unwrap() - 1.0).abs() < 1e-6);
        let d = M::from_real_diag(&[0.0, 1.0]);
        assert!((oracle_2x2(&d, MeanKind::Arithmetic, 0.0, 256).unwrap() - 1.0).abs() < 1e-4);
    }

    #[test]
    fn batch_agrees_with_single() {
        let a = M::from_rows(&[&[(0.3, 1.0), (-0.5, 0.2)], &[(1.1, 0.0), (0.0, -0.7)]]).unwrap();
        let vars = [(MeanKind::Geometric, 0.25), (MeanKind::Harmonic, 0.75)];
        let many = oracle_2x2_many(&a, &vars, 128).unwrap();
        for (k, &(kind, mu)) in vars.iter().enumerate() {
            assert_eq!(many[k], oracle_2x2(&a, kind, mu, 128).unwrap());
        }
    }

    #[test]
    fn rejects_other_dimensions() {
        assert!(oracle_2x2(&M::identity(3), MeanKind::Arithmetic, 0.5, 16).is_err());
        assert!(oracle_2x2(&M::identity(2), MeanKind::Arithmetic, 1.5, 16).is_err());
    }
}
