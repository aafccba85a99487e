//! Multi-start gradient ascent of `u σ_μ w` over unit vectors of `(I_r ⊗ B)`.
//!
//! A pure state is a unit vector `x ∈ ℂⁿ` (`r = 1`). A mixed state is
//! `ρ = LL*/‖L‖_F²`; stacking the columns of `L` gives a vector in `ℂ^{nr}` with
//! `tr(ρB) = x*(I_r ⊗ B)x / ‖x‖²` and `tr(ρB*B) = ‖(I_r ⊗ B)x‖² / ‖x‖²`, so
//! both classes share one sphere optimizer.

use num_complex::Complex;

use crate::linalg::ComplexMatrix;
use crate::meanlib::{path_unchecked, MeanKind};
use crate::scalar::Real;

/// Smallest `u` fed to the mean while estimating gradients.
pub const SINGULAR_GUARD: f64 = 1e-14;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Settings<T> {
    pub max_iterations: usize,
    pub gradient_tolerance: T,
    pub objective_tolerance: T,
    pub step: T,
}

pub(crate) struct Problem<'a, T> {
    b: &'a ComplexMatrix<T>,
    blocks: usize,
    diag: Vec<Complex<T>>,
    col_norm2: Vec<T>,
    kind: MeanKind,
    mu: T,
    guard: bool,
}

/// Quantities reused by every coordinate perturbation at a point.
struct Point<T> {
    x: Vec<Complex<T>>,
    y: Vec<Complex<T>>,
    z: Vec<Complex<T>>,
    w: Vec<Complex<T>>,
    q: Complex<T>,
    nn: T,
    ww: T,
}

pub(crate) struct Ascent<T> {
    pub value: T,
    pub x: Vec<Complex<T>>,
    pub iterations: usize,
}

impl<'a, T: Real> Problem<'a, T> {
    pub fn new(b: &'a ComplexMatrix<T>, blocks: usize, kind: MeanKind, mu: T) -> Self {
        let n = b.dim();
        let diag = (0..n).map(|i| b.get(i, i)).collect();
        let col_norm2 = (0..n).map(|j| (0..n).map(|i| b.get(i, j).norm_sqr()).sum()).collect();
        let guard = matches!(kind, MeanKind::Geometric | MeanKind::Harmonic);
        Problem {
            b,
            blocks,
            diag,
            col_norm2,
            kind,
            mu,
            guard,
        }
    }

    pub fn len(&self) -> usize {
        self.b.dim() * self.blocks
    }

    fn apply(&self, x: &[Complex<T>], adjoint: bool) -> Vec<Complex<T>> {
        let n = self.b.dim();
        let mut out = vec![Complex::new(T::zero(), T::zero()); x.len()];
        for k in 0..self.blocks {
            let xs = &x[k * n..(k + 1) * n];
            let dst = &mut out[k * n..(k + 1) * n];
            for i in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for j in 0..n {
                    let bij = if adjoint { self.b.get(j, i).conj() } else { self.b.get(i, j) };
                    acc = acc + bij * xs[j];
                }
                dst[i] = acc;
            }
        }
        out
    }

    fn point(&self, x: Vec<Complex<T>>) -> Point<T> {
        let y = self.apply(&x, false);
        let z = self.apply(&x, true);
        let w = self.apply(&y, true);
        let q = x.iter().zip(&y).fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
        let nn = x.iter().map(|c| c.norm_sqr()).sum();
        let ww = y.iter().map(|c| c.norm_sqr()).sum();
        Point { x, y, z, w, q, nn, ww }
    }

    fn mean(&self, u: T, w: T, guarded: bool) -> T {
        let u = if guarded && self.guard { u.max(T::lit(SINGULAR_GUARD)) } else { u };
        path_unchecked(self.kind, self.mu, u.max(T::zero()), w.max(T::zero()))
    }

    fn value(&self, q: Complex<T>, nn: T, ww: T, guarded: bool) -> T {
        let u = q.norm_sqr() / (nn * nn);
        let w = ww / nn;
        self.mean(u, w, guarded)
    }

    /// Exact objective at a point (no singular guard).
    pub fn objective(&self, x: &[Complex<T>]) -> T {
        let p = self.point(x.to_vec());
        self.value(p.q, p.nn, p.ww, false)
    }

    /// Objective after `x_j += eps`, in O(1) from the cached point.
    fn perturbed(&self, p: &Point<T>, j: usize, eps: Complex<T>) -> T {
        let n = self.b.dim();
        let i = j % n;
        let e2 = eps.norm_sqr();
        let q = p.q + eps * p.z[j].conj() + eps.conj() * p.y[j] + self.diag[i] * e2;
        let nn = p.nn + T::lit(2.0) * (p.x[j].conj() * eps).re + e2;
        let ww = p.ww + T::lit(2.0) * (eps.conj() * p.w[j]).re + self.col_norm2[i] * e2;
        self.value(q, nn, ww, true)
    }

    fn gradient(&self, p: &Point<T>, h: T) -> Vec<Complex<T>> {
        let two_h = h + h;
        let mut g: Vec<Complex<T>> = (0..p.x.len())
            .map(|j| {
                let re = (self.perturbed(p, j, Complex::new(h, T::zero())) - self.perturbed(p, j, Complex::new(-h, T::zero())))
                    / two_h;
                let im = (self.perturbed(p, j, Complex::new(T::zero(), h)) - self.perturbed(p, j, Complex::new(T::zero(), -h)))
                    / two_h;
                Complex::new(re, im)
            })
            .collect();
        // Tangent-space projection at the unit vector x.
        let radial = g.iter().zip(&p.x).fold(T::zero(), |acc, (gj, xj)| acc + (gj * xj.conj()).re) / p.nn;
        for (gj, xj) in g.iter_mut().zip(&p.x) {
            *gj = *gj - *xj * radial;
        }
        g
    }

    /// Armijo-backtracking gradient ascent from `x0` with renormalization.
    pub fn ascend(&self, x0: Vec<Complex<T>>, s: &Settings<T>) -> Ascent<T> {
        let mut p = self.point(normalize(x0));
        let mut f = self.value(p.q, p.nn, p.ww, true);
        let mut iterations = 0;
        while iterations < s.max_iterations {
            let g = self.gradient(&p, s.step);
            let g2: T = g.iter().map(|c| c.norm_sqr()).sum();
            if g2.sqrt() <= s.gradient_tolerance {
                break;
            }
            iterations += 1;
            let mut t = T::one();
            let mut accepted = None;
            for _ in 0..=MAX_HALVINGS {
                let cand: Vec<Complex<T>> = p.x.iter().zip(&g).map(|(xj, gj)| *xj + *gj * t).collect();
                let cp = self.point(normalize(cand));
                let cf = self.value(cp.q, cp.nn, cp.ww, true);
                if cf >= f + T::lit(ARMIJO) * t * g2 {
                    accepted = Some((cp, cf));
                    break;
                }
                t = t * T::lit(0.5);
            }
            // Keep halving while it helps; a fixed accepted step can oscillate.
            if let Some((mut cp, mut cf)) = accepted.take() {
                for _ in 0..MAX_HALVINGS {
                    t = t * T::lit(0.5);
                    let cand: Vec<Complex<T>> = p.x.iter().zip(&g).map(|(xj, gj)| *xj + *gj * t).collect();
                    let np = self.point(normalize(cand));
                    let nf = self.value(np.q, np.nn, np.ww, true);
                    if nf <= cf {
                        break;
                    }
                    cp = np;
                    cf = nf;
                }
                accepted = Some((cp, cf));
            }
            let Some((cp, cf)) = accepted else { break };
            let gain = cf - f;
            p = cp;
            f = cf;
            if gain <= s.objective_tolerance * T::one().max(f) {
                break;
            }
        }
        let value = self.value(p.q, p.nn, p.ww, false);
        Ascent {
            value,
            x: p.x,
            iterations,
        }
    }
}

/// Armijo ascent of an arbitrary smooth `f` on the unit sphere, with central
/// finite-difference gradients. Each gradient costs `4·len` evaluations of `f`.
pub(crate) fn sphere_ascent<T: Real>(f: impl Fn(&[Complex<T>]) -> T, x0: Vec<Complex<T>>, s: &Settings<T>) -> Ascent<T> {
    let mut x = normalize(x0);
    let mut fx = f(&x);
    let mut iterations = 0;
    let two_h = s.step + s.step;
    while iterations < s.max_iterations {
        let mut g = Vec::with_capacity(x.len());
        let mut probe = x.clone();
        for j in 0..x.len() {
            let mut d = [T::zero(); 2];
            for (k, dir) in [Complex::new(s.step, T::zero()), Complex::new(T::zero(), s.step)].into_iter().enumerate() {
                probe[j] = x[j] + dir;
                let up = f(&normalize(probe.clone()));
                probe[j] = x[j] - dir;
                let down = f(&normalize(probe.clone()));
                probe[j] = x[j];
                d[k] = (up - down) / two_h;
            }
            g.push(Complex::new(d[0], d[1]));
        }
        let radial = g.iter().zip(&x).fold(T::zero(), |acc, (gj, xj)| acc + (gj * xj.conj()).re);
        for (gj, xj) in g.iter_mut().zip(&x) {
            *gj = *gj - *xj * radial;
        }
        let g2: T = g.iter().map(|c| c.norm_sqr()).sum();
        if g2.sqrt() <= s.gradient_tolerance {
            break;
        }
        iterations += 1;
        let mut t = T::one();
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = normalize(x.iter().zip(&g).map(|(xj, gj)| *xj + *gj * t).collect());
            let cf = f(&cand);
            if cf >= fx + T::lit(ARMIJO) * t * g2 {
                accepted = Some((cand, cf));
                break;
            }
            t = t * T::lit(0.5);
        }
        if let Some((mut cx, mut cf)) = accepted.take() {
            for _ in 0..MAX_HALVINGS {
                t = t * T::lit(0.5);
                let cand = normalize(x.iter().zip(&g).map(|(xj, gj)| *xj + *gj * t).collect());
                let nf = f(&cand);
                if nf <= cf {
                    break;
                }
                cx = cand;
                cf = nf;
            }
            accepted = Some((cx, cf));
        }
        let Some((cx, cf)) = accepted else { break };
        let gain = cf - fx;
        x = cx;
        fx = cf;
        if gain <= s.objective_tolerance * T::one().max(fx.abs()) {
            break;
        }
    }
    Ascent { value: fx, x, iterations }
}

pub(crate) fn normalize<T: Real>(x: Vec<Complex<T>>) -> Vec<Complex<T>> {
    let norm = x.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    if norm > T::zero() && norm.is_finite() {
        x.into_iter().map(|c| c / norm).collect()
    } else {
        let mut e = vec![Complex::new(T::zero(), T::zero()); x.len()];
        e[0] = Complex::new(T::one(), T::zero());
        e
    }
}
