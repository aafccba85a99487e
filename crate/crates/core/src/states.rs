//! Normalized states on `M_n(ℂ)`: unit vectors and density matrices.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, inner, vec_norm, ComplexMatrix};
use crate::sampling::{complex_gaussian_vec, ginibre, rng_from_seed};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateClass {
    Pure,
    Mixed,
}

impl std::str::FromStr for StateClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(StateClass::Pure),
            "mixed" => Ok(StateClass::Mixed),
            other => Err(Error::Domain(format!("unknown state class `{other}` (expected pure or mixed)"))),
        }
    }
}

impl std::fmt::Display for StateClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateClass::Pure => "pure",
            StateClass::Mixed => "mixed",
        })
    }
}

/// Vector state `a ↦ ⟨ax, x⟩` for a unit vector `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T> {
    x: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Validates `‖x‖ = 1` within `1e-12` (or a few ulps for low precision).
    pub fn new(x: Vec<Complex<T>>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidState("empty vector".into()));
        }
        let norm = vec_norm(&x);
        let tol = T::lit(1e-12).max(T::lit(16.0) * T::epsilon());
        if (norm - T::one()).abs() > tol {
            return Err(Error::InvalidState(format!("vector norm {norm} is not 1")));
        }
        Ok(PureState { x })
    }

    /// Normalizes a nonzero vector.
    pub fn from_vector(x: Vec<Complex<T>>) -> Result<Self> {
        let norm = vec_norm(&x);
        if x.is_empty() || !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(PureState {
            x: x.into_iter().map(|z| z / norm).collect(),
        })
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut x = vec![Complex::new(T::zero(), T::zero()); n];
        x[i] = Complex::new(T::one(), T::zero());
        PureState { x }
    }

    pub fn vector(&self) -> &[Complex<T>] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `⟨Ax, x⟩`.
    pub fn eval(&self, a: &ComplexMatrix<T>) -> Result<Complex<T>> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        Ok(inner(&a.mul_vec(&self.x), &self.x))
    }

    /// `ρ = x x*`.
    pub fn to_mixed(&self) -> MixedState<T> {
        let n = self.dim();
        let rho = ComplexMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex::new(self.x[i].norm_sqr(), T::zero())
            } else {
                self.x[i] * self.x[j].conj()
            }
        });
        MixedState { rho }
    }
}

/// Density-matrix state `a ↦ tr(ρa)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState<T> {
    rho: ComplexMatrix<T>,
}

impl<T: Real> MixedState<T> {
    /// Validates Hermitian within `1e-10`, `λ_min ≥ -1e-10`, `tr ρ = 1` within `1e-12`.
    pub fn new(rho: ComplexMatrix<T>) -> Result<Self> {
        let loose = T::lit(1e-10).max(T::lit(64.0) * T::epsilon());
        let tight = T::lit(1e-12).max(T::lit(16.0) * T::epsilon());
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > tight || tr.im.abs() > tight {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        if rho.hermitian_defect() > loose {
            return Err(Error::InvalidState("density matrix is not Hermitian".into()));
        }
        let e = hermitian_eigen(&rho, loose)?;
        if e.min() < -loose {
            return Err(Error::InvalidState(format!("density matrix has eigenvalue {}", e.min())));
        }
        Ok(MixedState {
            rho: rho.hermitian_part(),
        })
    }

    /// `ρ = L L* / tr(L L*)` for a nonzero factor `L`.
    pub fn from_factor(l: &ComplexMatrix<T>) -> Result<Self> {
        let ll = l.adjoint().gram();
        let tr = ll.trace().re;
        if !(tr > T::zero()) {
            return Err(Error::InvalidState("zero factor".into()));
        }
        Ok(MixedState {
            rho: ll.scale_real(T::one() / tr),
        })
    }

    pub fn rho(&self) -> &ComplexMatrix<T> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `tr(ρA)`.
    pub fn eval(&self, a: &ComplexMatrix<T>) -> Result<Complex<T>> {
        let n = self.dim();
        if a.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.dim() });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                acc = acc + self.rho.get(i, j) * a.get(j, i);
            }
        }
        Ok(acc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum State<T> {
    Pure(PureState<T>),
    Mixed(MixedState<T>),
}

impl<T: Real> State<T> {
    pub fn dim(&self) -> usize {
        match self {
            State::Pure(p) => p.dim(),
            State::Mixed(m) => m.dim(),
        }
    }

    pub fn class(&self) -> StateClass {
        match self {
            State::Pure(_) => StateClass::Pure,
            State::Mixed(_) => StateClass::Mixed,
        }
    }

    pub fn to_mixed(&self) -> MixedState<T> {
        match self {
            State::Pure(p) => p.to_mixed(),
            State::Mixed(m) => m.clone(),
        }
    }

    /// Report payload: `{"kind": "pure", "vector": [[re, im], ...]}` or
    /// `{"kind": "mixed", "rho": <Matrix JSON>}`.
    pub fn to_json_value(&self) -> Value {
        match self {
            State::Pure(p) => {
                let v: Vec<Value> = p.x.iter().map(|z| json!([z.re.as_f64(), z.im.as_f64()])).collect();
                json!({ "kind": "pure", "vector": v })
            }
            State::Mixed(m) => json!({ "kind": "mixed", "rho": m.rho.to_json_value() }),
        }
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let bad = |field: &str, reason: &str| Error::Parse {
            field: field.into(),
            reason: reason.into(),
        };
        match v.get("kind").and_then(Value::as_str) {
            Some("pure") => {
                let arr = v.get("vector").and_then(Value::as_array).ok_or_else(|| bad("vector", "missing"))?;
                let mut x = Vec::with_capacity(arr.len());
                for (k, pair) in arr.iter().enumerate() {
                    let re = pair.get(0).and_then(Value::as_f64);
                    let im = pair.get(1).and_then(Value::as_f64);
                    match (re, im) {
                        (Some(re), Some(im)) => x.push(Complex::new(T::lit(re), T::lit(im))),
                        _ => return Err(bad(&format!("vector[{k}]"), "expected a [re, im] pair")),
                    }
                }
                Ok(State::Pure(PureState::new(x)?))
            }
            Some("mixed") => {
                let rho = ComplexMatrix::from_json_value(v.get("rho").ok_or_else(|| bad("rho", "missing"))?)?;
                Ok(State::Mixed(MixedState::new(rho)?))
            }
            _ => Err(bad("kind", "expected \"pure\" or \"mixed\"")),
        }
    }
}

/// `f(a)` for a state `f`: `⟨Ax, x⟩` or `tr(ρA)`.
pub fn state_eval<T: Real>(s: &State<T>, a: &ComplexMatrix<T>) -> Result<Complex<T>> {
    match s {
        State::Pure(p) => p.eval(a),
        State::Mixed(m) => m.eval(a),
    }
}

pub fn pure_to_mixed<T: Real>(s: &PureState<T>) -> MixedState<T> {
    s.to_mixed()
}

pub fn random_pure<T: Real, R: Rng>(rng: &mut R, dim: usize) -> PureState<T> {
    loop {
        if let Ok(s) = PureState::from_vector(complex_gaussian_vec(rng, dim)) {
            return s;
        }
    }
}

/// `ρ = L L* / tr(L L*)` with `L` a `dim × rank` complex Gaussian factor.
pub fn random_mixed<T: Real, R: Rng>(rng: &mut R, dim: usize, rank: usize) -> Result<MixedState<T>> {
    if rank == 0 || rank > dim {
        return Err(Error::Domain(format!("rank must satisfy 1 <= rank <= dim, got {rank} for dim {dim}")));
    }
    let g: ComplexMatrix<T> = ginibre(rng, dim);
    let l = ComplexMatrix::from_fn(dim, |i, j| if j < rank { g.get(i, j) } else { Complex::new(T::zero(), T::zero()) });
    MixedState::from_factor(&l)
}

/// Seeded random state; `rank` is ignored for pure states.
pub fn random_state<T: Real>(dim: usize, class: StateClass, rank: usize, seed: u64) -> Result<State<T>> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    match class {
        StateClass::Pure => Ok(State::Pure(random_pure(&mut rng, dim))),
        StateClass::Mixed => Ok(State::Mixed(random_mixed(&mut rng, dim, rank)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn eval_examples() {
        let a = M::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        let e2 = State::Pure(PureState::basis(2, 1));
        assert_eq!(state_eval(&e2, &a).unwrap(), c(0.0, 0.0));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = State::Pure(PureState::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap());
        assert!((state_eval(&x, &a).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let half = State::Mixed(MixedState::new(M::identity(2).scale_real(0.5)).unwrap());
        assert!((state_eval(&half, &M::from_real_diag(&[0.0, 4.0])).unwrap() - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eval_identity_is_one() {
        for seed in 0..5 {
            for class in [StateClass::Pure, StateClass::Mixed] {
                let s: State<f64> = random_state(4, class, 3, seed).unwrap();
                assert!((state_eval(&s, &M::identity(4)).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_to_mixed_examples() {
        let e1 = PureState::<f64>::basis(2, 0);
        assert_eq!(pure_to_mixed(&e1).rho(), &M::from_real_diag(&[1.0, 0.0]));
        let e2 = PureState::<f64>::basis(2, 1);
        assert_eq!(pure_to_mixed(&e2).rho(), &M::from_real_diag(&[0.0, 1.0]));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = PureState::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let want = M::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!((pure_to_mixed(&x).rho() - &want).frobenius_norm() < 1e-15);
    }

    #[test]
    fn pure_and_mixed_agree() {
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let x: PureState<f64> = random_pure(&mut rng, 3);
            let a: M = ginibre(&mut rng, 3);
            let d = x.eval(&a).unwrap() - x.to_mixed().eval(&a).unwrap();
            assert!(d.norm() <= 1e-12 * crate::linalg::operator_norm(&a));
        }
    }

    #[test]
    fn random_state_examples() {
        let s1: State<f64> = random_state(2, StateClass::Pure, 1, 7).unwrap();
        let s2: State<f64> = random_state(2, StateClass::Pure, 1, 7).unwrap();
        assert_eq!(s1, s2);
        let m: State<f64> = random_state(3, StateClass::Mixed, 3, 7).unwrap();
        let State::Mixed(m) = m else { panic!() };
        assert!((m.rho().trace().re - 1.0).abs() < 1e-12);
        let r1: State<f64> = random_state(3, StateClass::Mixed, 1, 7).unwrap();
        let State::Mixed(r1) = r1 else { panic!() };
        let e = hermitian_eigen(r1.rho(), 1e-10).unwrap();
        assert_eq!(e.values.iter().filter(|&&l| l > 1e-10).count(), 1);
        assert!(random_state::<f64>(3, StateClass::Mixed, 4, 7).is_err());
        assert!(random_state::<f64>(3, StateClass::Mixed, 0, 7).is_err());
    }

    #[test]
    fn validation() {
        assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(PureState::<f64>::from_vector(vec![c(0.0, 0.0)]).is_err());
        assert!(MixedState::new(M::identity(2)).is_err());
        assert!(MixedState::new(M::from_real_diag(&[1.5, -0.5])).is_err());
        let x = PureState::<f64>::basis(2, 0);
        assert!(matches!(x.eval(&M::identity(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn json_round_trip() {
        for class in [StateClass::Pure, StateClass::Mixed] {
            let s: State<f64> = random_state(3, class, 2, 11).unwrap();
            let text = serde_json::to_string(&s.to_json_value()).unwrap();
            let back = State::<f64>::from_json_value(&serde_json::from_str(&text).unwrap()).unwrap();
            let a: M = ginibre(&mut rng_from_seed(1), 3);
            let d = state_eval(&s, &a).unwrap() - state_eval(&back, &a).unwrap();
            assert!(d.norm() < 1e-14);
        }
    }
}
