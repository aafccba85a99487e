//! Cyclic complex Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative off-diagonal Frobenius threshold for declaring convergence.
pub const JACOBI_THRESHOLD: f64 = 1e-12;
/// Maximum number of cyclic sweeps.
pub const JACOBI_SWEEPS: usize = 60;
/// Default relative tolerance on `‖H - H*‖_F / ‖H‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Spectral decomposition `H = V diag(values) V*`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> Vec<Complex<T>> {
        self.vectors.column(i)
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_norm(&self) -> T {
        self.min().abs().max(self.max().abs())
    }

    /// `V diag(f(λ)) V*`.
    pub fn recompose(&self, mut f: impl FnMut(T) -> T) -> ComplexMatrix<T> {
        let n = self.dim();
        let fl: Vec<T> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (k, &w) in fl.iter().enumerate() {
                    if w != T::zero() {
                        acc = acc + v.get(i, k) * v.get(j, k).conj() * w;
                    }
                }
                if i == j {
                    acc.im = T::zero();
                }
                out.set(i, j, acc);
                out.set(j, i, acc.conj());
            }
        }
        out
    }
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(H + H*)/2` after checking that its
/// asymmetry is within `tol·‖H‖_F`. Deterministic for identical inputs.
pub fn hermitian_eigen<T: Real>(h: &ComplexMatrix<T>, tol: T) -> Result<HermitianEigen<T>> {
    let n = h.dim();
    let mut v = ComplexMatrix::<T>::identity(n);
    let a = diagonalize(h, tol, Some(&mut v))?;
    Ok(sorted(a, v))
}

/// Eigenvalues only, ascending. Same rotations as [`hermitian_eigen`] without
/// accumulating eigenvectors.
pub fn hermitian_eigenvalues<T: Real>(h: &ComplexMatrix<T>, tol: T) -> Result<Vec<T>> {
    let a = diagonalize(h, tol, None)?;
    let mut values: Vec<T> = (0..a.dim()).map(|i| a.get(i, i).re).collect();
    values.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

fn diagonalize<T: Real>(h: &ComplexMatrix<T>, tol: T, mut v: Option<&mut ComplexMatrix<T>>) -> Result<ComplexMatrix<T>> {
    let n = h.dim();
    let fro = h.frobenius_norm();
    let defect = h.hermitian_defect();
    if defect > tol * fro {
        return Err(Error::NotHermitian {
            asymmetry: defect.as_f64(),
            limit: (tol * fro).as_f64(),
        });
    }
    let mut a = h.hermitian_part();
    if fro == T::zero() || n == 1 {
        return Ok(a);
    }

    let eps = T::epsilon();
    let rel = T::lit(JACOBI_THRESHOLD).max(T::lit(8.0) * eps);
    let thresh = rel * fro;
    let skip = eps * T::lit(1e-2) * fro / T::lit(n as f64);

    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while off > thresh {
        if sweeps == JACOBI_SWEEPS {
            return Err(Error::Convergence {
                off_diagonal: off.as_f64(),
                sweeps,
            });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= skip {
                    continue;
                }
                rotate(&mut a, v.as_deref_mut(), p, q, apq / r, r);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a);
    }
    Ok(a)
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc = acc + a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `a[p][q]` with `U = diag(1, conj(e)) · J(c, s)`, where `e` is the
/// phase of `a[p][q]` and `J` is the real Jacobi rotation of the phased block.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, mut v: Option<&mut ComplexMatrix<T>>, p: usize, q: usize, e: Complex<T>, r: T) {
    let n = a.dim();
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    let tau = (aqq - app) / (T::lit(2.0) * r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let ec = e.conj();

    // U entries in (p, q) coordinates.
    let upp = Complex::new(c, T::zero());
    let upq = Complex::new(s, T::zero());
    let uqp = ec * (-s);
    let uqq = ec * c;

    for k in 0..n {
        let hp = a.get(k, p);
        let hq = a.get(k, q);
        a.set(k, p, hp * upp + hq * uqp);
        a.set(k, q, hp * upq + hq * uqq);
        if let Some(v) = v.as_deref_mut() {
            let vp = v.get(k, p);
            let vq = v.get(k, q);
            v.set(k, p, vp * upp + vq * uqp);
            v.set(k, q, vp * upq + vq * uqq);
        }
    }
    for k in 0..n {
        let hp = a.get(p, k);
        let hq = a.get(q, k);
        a.set(p, k, hp * upp.conj() + hq * uqp.conj());
        a.set(q, k, hp * upq.conj() + hq * uqq.conj());
    }
    let zero = Complex::new(T::zero(), T::zero());
    a.set(p, q, zero);
    a.set(q, p, zero);
    a.set(p, p, Complex::new(a.get(p, p).re, T::zero()));
    a.set(q, q, Complex::new(a.get(q, q).re, T::zero()));
}

fn sorted<T: Real>(a: ComplexMatrix<T>, v: ComplexMatrix<T>) -> HermitianEigen<T> {
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |row, col| v.get(row, order[col]));
    HermitianEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::inner;

    type M = ComplexMatrix<f64>;

    fn check_decomposition(h: &M, eig: &HermitianEigen<f64>) {
        let n = h.dim();
        let fro = h.frobenius_norm().max(1e-300);
        for i in 0..n {
            let x = eig.vector(i);
            let hx = h.mul_vec(&x);
            let res: f64 = hx
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b * eig.values[i]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-10 * fro, "residual {res:e}");
            for j in 0..n {
                let ip = inner(&eig.vector(i), &eig.vector(j));
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((ip - target).norm() < 1e-10);
            }
        }
        let rec = eig.recompose(|l| l);
        assert!((&rec - h).frobenius_norm() <= 1e-9 * fro);
    }

    #[test]
    fn diagonal_input() {
        let h = M::from_real_diag(&[3.0, 1.0]);
        let e = hermitian_eigen(&h, 1e-10).unwrap();
        assert_eq!(e.values, vec![1.0, 3.0]);
        check_decomposition(&h, &e);
    }

    #[test]
    fn pauli_x() {
        let h = M::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = hermitian_eigen(&h, 1e-10).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        check_decomposition(&h, &e);
    }

    #[test]
    fn complex_two_by_two() {
        // (2 - λ)² - 1 = 0
        let h = M::from_rows(&[&[(2.0, 0.0), (0.0, 1.0)], &[(0.0, -1.0), (2.0, 0.0)]]).unwrap();
        let e = hermitian_eigen(&h, 1e-10).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] - 3.0).abs() < 1e-14);
        check_decomposition(&h, &e);
    }

    #[test]
    fn dense_complex_hermitian() {
        let n = 7;
        let g = M::from_fn(n, |i, j| {
            Complex::new(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i * 5 + j * 2) % 7) as f64 - 3.0)
        });
        let h = g.hermitian_part();
        let e = hermitian_eigen(&h, 1e-10).unwrap();
        check_decomposition(&h, &e);
        let tr: f64 = e.values.iter().sum();
        assert!((tr - h.trace().re).abs() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(hermitian_eigenvalues(&h, 1e-10).unwrap(), e.values);
    }

    #[test]
    fn rejects_non_hermitian_and_symmetrizes_small_defects() {
        let a = M::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigen(&a, 1e-10), Err(Error::NotHermitian { .. })));
        let nearly = M::from_real_rows(&[&[1.0, 1.0 + 1e-13], &[1.0, 1.0]]).unwrap();
        let e = hermitian_eigen(&nearly, 1e-10).unwrap();
        assert!(e.values[0].abs() < 1e-12 && (e.values[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_and_scalar_matrices() {
        let z = M::zeros(3);
        let e = hermitian_eigen(&z, 1e-10).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        let one = M::identity(1).scale_real(4.0);
        assert_eq!(hermitian_eigen(&one, 1e-10).unwrap().values, vec![4.0]);
    }

    #[test]
    fn deterministic() {
        let h = M::from_rows(&[&[(1.0, 0.0), (0.3, 0.7)], &[(0.3, -0.7), (-2.0, 0.0)]]).unwrap();
        assert_eq!(hermitian_eigen(&h, 1e-10).unwrap(), hermitian_eigen(&h, 1e-10).unwrap());
    }

    #[test]
    fn single_precision() {
        let h = ComplexMatrix::<f32>::from_rows(&[&[(2.0, 0.0), (0.0, 1.0)], &[(0.0, -1.0), (2.0, 0.0)]]).unwrap();
        let e = hermitian_eigen(&h, 1e-5f32).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-5 && (e.values[1] - 3.0).abs() < 1e-5);
    }
}
