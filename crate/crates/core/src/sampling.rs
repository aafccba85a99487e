//! Seeded samplers. Everything draws `f64` from a ChaCha stream and converts,
//! so a given seed yields the same values for every scalar type.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent child seed from a parent seed and a stream label.
pub fn derive_seed(parent: u64, label: &str, index: u64) -> u64 {
    // FNV-1a over the label, then a splitmix64 finalizer.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = parent ^ h.rotate_left(17) ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<T: Real, R: Rng>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

pub fn complex_gaussian_vec<T: Real, R: Rng>(rng: &mut R, n: usize) -> Vec<Complex<T>> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn ginibre<T: Real, R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(n, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary from Gram–Schmidt on a Ginibre matrix.
pub fn haar_unitary<T: Real, R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix<T> {
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex<T>> = complex_gaussian_vec(rng, n);
        // Two passes of modified Gram–Schmidt keep columns orthonormal to rounding.
        for _ in 0..2 {
            for c in &cols {
                let proj = crate::linalg::inner(&v, c);
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi = *vi - *ci * proj;
                }
            }
        }
        let norm = crate::linalg::vec_norm(&v);
        if norm > T::lit(1e-6) {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}
