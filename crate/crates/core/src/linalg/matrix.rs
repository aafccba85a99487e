use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds an `n × n` matrix from row-major entries; every entry must be finite.
    pub fn new(n: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Shape("matrix dimension must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} entries for a {n}x{n} matrix, found {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain(format!("entry {pos} is not finite")));
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { n, data }
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::from_diag(&d)
    }

    /// Row-major real/imaginary pairs, convenient for literals in tests.
    pub fn from_rows(rows: &[&[(f64, f64)]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            data.extend(row.iter().map(|&(re, im)| Complex::new(T::lit(re), T::lit(im))));
        }
        Self::new(n, data)
    }

    /// Real matrix from rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            data.extend(row.iter().map(|&re| Complex::new(T::lit(re), T::zero())));
        }
        Self::new(n, data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex<T>) {
        self.data[i * self.n + j] = z;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik.re == T::zero() && aik.im == T::zero() {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d = *d + aik * b;
                }
            }
        }
        out
    }

    /// `A* A`, built with exact Hermitian symmetry.
    pub fn gram(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..n {
                    acc = acc + self.get(k, i).conj() * self.get(k, j);
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

    /// `A A*`.
    pub fn gram_adjoint(&self) -> Self {
        self.adjoint().gram()
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.get(i, i))
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        let n = self.n;
        Self::from_fn(n, |i, j| {
            if i == j {
                Complex::new(self.get(i, i).re, T::zero())
            } else {
                (self.get(i, j) + self.get(j, i).conj()) * half
            }
        })
    }

    /// Frobenius norm of `M - M*`.
    pub fn hermitian_defect(&self) -> T {
        let n = self.n;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc = acc + (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }

    /// Converts the scalar type; used to move between `f32` and `f64`.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.n, rhs.n, "add dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.n, rhs.n, "sub dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn neg(self) -> ComplexMatrix<T> {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|&z| -z).collect(),
        }
    }
}

pub(crate) fn vec_norm<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `⟨x, y⟩ = Σ x_i conj(y_i)`, linear in the first slot.
pub(crate) fn inner<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter()
        .zip(y)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &b)| acc + a * b.conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn construction_validates_shape_and_finiteness() {
        assert!(matches!(M::new(2, vec![Complex::new(0.0, 0.0); 3]), Err(Error::Shape(_))));
        assert!(matches!(M::new(0, vec![]), Err(Error::Shape(_))));
        let mut d = vec![Complex::new(0.0, 0.0); 4];
        d[2] = Complex::new(f64::NAN, 0.0);
        assert!(matches!(M::new(2, d), Err(Error::Domain(_))));
        assert!(M::from_real_rows(&[&[1.0, 2.0], &[3.0]]).is_err());
    }

    #[test]
    fn products_and_adjoint() {
        let a = M::from_rows(&[&[(1.0, 1.0), (2.0, 0.0)], &[(0.0, -1.0), (3.0, 2.0)]]).unwrap();
        let g = a.gram();
        let direct = a.adjoint().matmul(&a);
        assert!((&g - &direct).frobenius_norm() < 1e-14);
        assert_eq!(g.hermitian_defect(), 0.0);
        let x = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)];
        let y = a.mul_vec(&x);
        assert_eq!(y[0], Complex::new(1.0, 3.0));
        assert_eq!(a.trace(), Complex::new(4.0, 3.0));
        assert_eq!(a.adjoint().adjoint(), a);
    }
}
