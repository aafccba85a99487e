//! Support-function sweeps over `θ`: numerical radius and Crawford number.

use num_complex::Complex;

use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, ComplexMatrix};
use crate::scalar::Real;
use crate::states::PureState;

/// Number of equally spaced `θ` samples on `[0, 2π)`.
pub const THETA_GRID: usize = 720;
/// Golden-section refinement stops once the bracket is this narrow.
pub const THETA_WINDOW: f64 = 1e-10;
/// Grid maxima within this fraction of the best (times `max(1, ‖A‖_F)`) are refined.
const CANDIDATE_BAND: f64 = 1e-3;
const MAX_CANDIDATES: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Branch {
    Top,
    Bottom,
}

/// `Re(e^{-iθ}A) = (e^{-iθ}A + e^{iθ}A*)/2`, built exactly Hermitian.
pub fn rotated_real_part<T: Real>(a: &ComplexMatrix<T>, theta: T) -> ComplexMatrix<T> {
    let n = a.dim();
    let ph = Complex::new(theta.cos(), -theta.sin());
    let half = T::lit(0.5);
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        m.set(i, i, Complex::new((ph * a.get(i, i)).re, T::zero()));
        for j in i + 1..n {
            let z = (ph * a.get(i, j) + (ph * a.get(j, i)).conj()) * half;
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    m
}

fn branch_value<T: Real>(a: &ComplexMatrix<T>, theta: T, branch: Branch) -> T {
    let m = rotated_real_part(a, theta);
    // Exactly Hermitian, so the only possible failure is non-convergence; fall
    // back to the Rayleigh bound that keeps the sweep monotone-safe.
    match hermitian_eigenvalues(&m, T::one()) {
        Ok(v) => match branch {
            Branch::Top => v[v.len() - 1],
            Branch::Bottom => v[0],
        },
        Err(_) => match branch {
            Branch::Top => m.frobenius_norm(),
            Branch::Bottom => -m.frobenius_norm(),
        },
    }
}

/// Maximizes the chosen eigenvalue branch of `Re(e^{-iθ}A)` over `θ`.
fn sweep<T: Real>(a: &ComplexMatrix<T>, branch: Branch) -> (T, T) {
    let two_pi = T::lit(2.0) * T::PI();
    let step = two_pi / T::lit(THETA_GRID as f64);
    let thetas: Vec<T> = (0..THETA_GRID).map(|k| T::lit(k as f64) * step).collect();
    let vals: Vec<T> = thetas.iter().map(|&t| branch_value(a, t, branch)).collect();

    let mut best_k = 0;
    for k in 1..THETA_GRID {
        if vals[k] > vals[best_k] {
            best_k = k;
        }
    }
    let band = T::lit(CANDIDATE_BAND) * T::one().max(a.frobenius_norm());
    let mut candidates: Vec<usize> = (0..THETA_GRID)
        .filter(|&k| {
            let prev = vals[(k + THETA_GRID - 1) % THETA_GRID];
            let next = vals[(k + 1) % THETA_GRID];
            vals[k] >= prev && vals[k] >= next && vals[k] >= vals[best_k] - band
        })
        .collect();
    candidates.sort_by(|&i, &j| vals[j].partial_cmp(&vals[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    candidates.truncate(MAX_CANDIDATES);
    if candidates.is_empty() {
        candidates.push(best_k);
    }

    let mut best = (vals[best_k], thetas[best_k]);
    for k in candidates {
        let (v, t) = golden_max(|t| branch_value(a, t, branch), thetas[k] - step, thetas[k] + step);
        if v > best.0 {
            best = (v, t);
        }
    }
    best
}

fn golden_max<T: Real>(f: impl Fn(T) -> T, mut lo: T, mut hi: T) -> (T, T) {
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let window = T::lit(THETA_WINDOW).max(T::epsilon().sqrt());
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > window {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (f1, x1)
    } else {
        (f2, x2)
    }
}

/// `v(A) = max_θ λ_max(Re(e^{-iθ}A))` and a unit vector attaining it.
pub fn numerical_radius<T: Real>(a: &ComplexMatrix<T>) -> (T, PureState<T>) {
    let n = a.dim();
    if a.is_zero() {
        return (T::zero(), PureState::basis(n, 0));
    }
    let (v, theta) = sweep(a, Branch::Top);
    let m = rotated_real_part(a, theta);
    let witness = match hermitian_eigen(&m, T::one()) {
        Ok(e) => PureState::from_vector(e.vector(n - 1)).unwrap_or_else(|_| PureState::basis(n, 0)),
        Err(_) => PureState::basis(n, 0),
    };
    (v.max(T::zero()), witness)
}

/// Crawford number `m(A) = max(0, max_θ λ_min(Re(e^{-iθ}A)))`, the distance
/// from the origin to the numerical range.
pub fn crawford<T: Real>(a: &ComplexMatrix<T>) -> T {
    if a.is_zero() {
        return T::zero();
    }
    sweep(a, Branch::Bottom).0.max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::operator_norm;
    use crate::sampling::{ginibre, rng_from_seed};

    type M = ComplexMatrix<f64>;

    fn nilpotent() -> M {
        M::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap()
    }

    #[test]
    fn numerical_radius_examples() {
        let (v, x) = numerical_radius(&nilpotent());
        assert!((v - 1.0).abs() < 1e-8);
        assert!((x.eval(&nilpotent()).unwrap().norm() - 1.0).abs() < 1e-8);
        let d = M::from_diag(&[Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)]);
        assert!((numerical_radius(&d).0 - 1.0).abs() < 1e-10);
        let h = M::from_real_rows(&[&[-3.0, 1.0], &[1.0, 1.0]]).unwrap();
        // λ = -1 ± √5
        assert!((numerical_radius(&h).0 - (1.0 + 5f64.sqrt())).abs() < 1e-10);
        assert_eq!(numerical_radius(&M::zeros(3)).0, 0.0);
    }

    #[test]
    fn crawford_examples() {
        assert!((crawford(&M::from_real_diag(&[1.0, 2.0])) - 1.0).abs() < 1e-10);
        assert_eq!(crawford(&nilpotent()), 0.0);
        assert!((crawford(&M::identity(3)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn witness_attains_value_and_sandwich_holds() {
        let mut rng = rng_from_seed(21);
        for n in 2..6 {
            let a: M = ginibre(&mut rng, n);
            let (v, x) = numerical_radius(&a);
            let fx = x.eval(&a).unwrap().norm();
            assert!((fx - v).abs() <= 1e-9 * v.max(1.0), "n={n} v={v} |f|={fx}");
            let norm = operator_norm(&a);
            assert!(norm / 2.0 <= v + 1e-12 && v <= norm + 1e-12);
        }
    }

    #[test]
    fn crawford_of_shifted_normal() {
        // W(diag(2+i, 3-i, 4)) is the triangle with those vertices; the closest
        // point to the origin is the vertex 2+i.
        let d = M::from_diag(&[Complex::new(2.0, 1.0), Complex::new(3.0, -1.0), Complex::new(4.0, 0.0)]);
        let want = 5f64.sqrt();
        assert!((crawford(&d) - want).abs() < 1e-10);
    }
}
