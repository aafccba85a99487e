//! Seeded instance generators, one per hypothesis class.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::operator_norm;
use crate::sampling::{complex_gaussian, ginibre, haar_unitary, rng_from_seed};
use crate::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Independent standard complex Gaussian entries.
    Ginibre,
    /// `U diag(z) U*` with Haar `U` and Gaussian `z`.
    Normal,
    /// `U N U*` with `N` supported on the top-right block, so `N² = 0`.
    Nilpotent2,
    /// `L L*` with Ginibre `L`.
    Psd,
    /// `a = U D` with distinct positive diagonal `D` and real diagonal `b`,
    /// so `|a| = D` commutes with `b = b*`.
    Lemma32Pair,
    /// `G + 1.5‖G‖e^{iθ}I`, keeping the origin outside the numerical range.
    Shifted,
    /// `(G + G*)/2`.
    Hermitian,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 7] = [
        GeneratorKind::Ginibre,
        GeneratorKind::Normal,
        GeneratorKind::Nilpotent2,
        GeneratorKind::Psd,
        GeneratorKind::Lemma32Pair,
        GeneratorKind::Shifted,
        GeneratorKind::Hermitian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Ginibre => "ginibre",
            GeneratorKind::Normal => "normal",
            GeneratorKind::Nilpotent2 => "nilpotent2",
            GeneratorKind::Psd => "psd",
            GeneratorKind::Lemma32Pair => "lemma32_pair",
            GeneratorKind::Shifted => "shifted",
            GeneratorKind::Hermitian => "hermitian",
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorKind::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown generator `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub a: Matrix,
    pub b: Option<Matrix>,
}

fn conjugate(u: &Matrix, m: &Matrix) -> Matrix {
    u.matmul(m).matmul(&u.adjoint())
}

pub fn generate(kind: GeneratorKind, dim: usize, seed: u64) -> Generated {
    let mut rng = rng_from_seed(seed);
    let n = dim.max(1);
    let single = |a| Generated { a, b: None };
    match kind {
        GeneratorKind::Ginibre => single(ginibre(&mut rng, n)),
        GeneratorKind::Normal => {
            let u = haar_unitary(&mut rng, n);
            let d: Vec<Complex<f64>> = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
            single(conjugate(&u, &Matrix::from_diag(&d)))
        }
        GeneratorKind::Nilpotent2 => {
            let u = haar_unitary(&mut rng, n);
            let k = n / 2;
            let nmat = Matrix::from_fn(n, |i, j| {
                if i < k && j >= k {
                    complex_gaussian(&mut rng)
                } else {
                    Complex::new(0.0, 0.0)
                }
            });
            single(conjugate(&u, &nmat))
        }
        GeneratorKind::Psd => {
            let l = ginibre(&mut rng, n);
            single(l.gram_adjoint())
        }
        GeneratorKind::Lemma32Pair => {
            let u = haar_unitary(&mut rng, n);
            let d: Vec<f64> = (0..n).map(|_| 0.25 + complex_gaussian::<f64, _>(&mut rng).norm()).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            Generated {
                a: u.matmul(&Matrix::from_real_diag(&d)),
                b: Some(Matrix::from_real_diag(&b)),
            }
        }
        GeneratorKind::Shifted => {
            let g = ginibre(&mut rng, n);
            let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
            let shift = Complex::from_polar(1.5 * operator_norm(&g), theta);
            single(&g + &Matrix::identity(n).scale(shift))
        }
        GeneratorKind::Hermitian => single(ginibre(&mut rng, n).hermitian_part()),
    }
}
