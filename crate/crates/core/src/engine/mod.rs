//! The semi-norm `‖a‖_{σ_μ} = sup_f sqrt(|f(a)|² σ_μ f(a*a))` and the closed-path
//! quantities around it.

mod optimizer;
mod oracle;
mod theta;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{top_singular, ComplexMatrix};
use crate::meanlib::{path_unchecked, MeanKind};
use crate::sampling::{complex_gaussian_vec, derive_seed, rng_from_seed};
use crate::scalar::Real;
use crate::states::{state_eval, MixedState, PureState, State, StateClass};

use optimizer::{normalize, Problem};
pub(crate) use optimizer::{sphere_ascent, Settings};

pub use optimizer::SINGULAR_GUARD;
pub use oracle::{oracle_2x2, oracle_2x2_many, ORACLE_GRID};
pub use theta::{crawford, numerical_radius, rotated_real_part, THETA_GRID, THETA_WINDOW};

/// Relative tolerance for the endpoint cross-checks in [`mu_sweep`].
pub const ENDPOINT_TOL: f64 = 1e-6;
/// Scale of the random perturbation added to the pure optimum when seeding mixed starts.
const MIXED_PERTURBATION: f64 = 0.1;
const PERTURBED_MIXED_SEEDS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub starts: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub objective_tolerance: f64,
    pub finite_difference_step: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            starts: 32,
            max_iterations: 500,
            gradient_tolerance: 1e-10,
            objective_tolerance: 1e-12,
            finite_difference_step: 1e-6,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.starts == 0 || self.max_iterations == 0 {
            return Err(Error::Domain("starts and max_iterations must be at least 1".into()));
        }
        for (name, v) in [
            ("gradient_tolerance", self.gradient_tolerance),
            ("objective_tolerance", self.objective_tolerance),
            ("finite_difference_step", self.finite_difference_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub(crate) fn settings<T: Real>(&self) -> Settings<T> {
        let eps = T::epsilon();
        Settings {
            max_iterations: self.max_iterations,
            gradient_tolerance: T::lit(self.gradient_tolerance).max(T::lit(4.0) * eps),
            objective_tolerance: T::lit(self.objective_tolerance).max(T::lit(4.0) * eps),
            step: T::lit(self.finite_difference_step).max(T::lit(8.0) * eps.sqrt()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeminormQuery<T> {
    pub matrix: ComplexMatrix<T>,
    pub mean: MeanKind,
    pub mu: T,
    pub state_class: StateClass,
    pub config: OptimizerConfig,
}

impl<T: Real> SeminormQuery<T> {
    /// Mixed states and default optimizer settings.
    pub fn new(matrix: ComplexMatrix<T>, mean: MeanKind, mu: T) -> Self {
        SeminormQuery {
            matrix,
            mean,
            mu,
            state_class: StateClass::Mixed,
            config: OptimizerConfig::default(),
        }
    }

    pub fn states(mut self, class: StateClass) -> Self {
        self.state_class = class;
        self
    }

    pub fn config(mut self, config: OptimizerConfig) -> Self {
        self.config = config;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeminormResult<T> {
    pub value: T,
    pub witness: State<T>,
    pub converged: bool,
    pub starts_agreeing: usize,
    pub iterations_total: usize,
}

fn check_mu<T: Real>(mu: T) -> Result<()> {
    if mu >= T::zero() && mu <= T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("mu must lie in [0, 1], got {mu}")))
    }
}

/// `u σ_μ w` with `u = |f(A)|²` and `w = f(A*A)`.
pub fn objective<T: Real>(a: &ComplexMatrix<T>, mean: MeanKind, mu: T, s: &State<T>) -> Result<T> {
    check_mu(mu)?;
    let u = state_eval(s, a)?.norm_sqr();
    let w = state_eval(s, &a.gram())?.re.max(T::zero());
    Ok(path_unchecked(mean, mu, u, w))
}

/// Everything about one matrix that every `(mean, μ, class)` query reuses.
#[derive(Clone, Debug)]
pub struct SeminormContext<T> {
    a: ComplexMatrix<T>,
    norm: T,
    unit: ComplexMatrix<T>,
    singular: Vec<Complex<T>>,
    radius: T,
    radius_witness: PureState<T>,
}

impl<T: Real> SeminormContext<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let (norm, singular) = if a.is_zero() {
            (T::zero(), PureState::<T>::basis(n, 0).vector().to_vec())
        } else {
            top_singular(a)?
        };
        let unit = if norm > T::zero() { a.scale_real(T::one() / norm) } else { a.clone() };
        let (unit_radius, radius_witness) = numerical_radius(&unit);
        Ok(SeminormContext {
            a: a.clone(),
            norm,
            unit,
            singular,
            radius: unit_radius * norm,
            radius_witness,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.a
    }

    pub fn operator_norm(&self) -> T {
        self.norm
    }

    pub fn numerical_radius(&self) -> T {
        self.radius
    }

    pub fn radius_witness(&self) -> &PureState<T> {
        &self.radius_witness
    }

    /// `sqrt(v(A)² σ_μ ‖A‖²)`.
    pub fn upper_envelope(&self, mean: MeanKind, mu: T) -> Result<T> {
        check_mu(mu)?;
        Ok(path_unchecked(mean, mu, self.radius * self.radius, self.norm * self.norm).sqrt())
    }

    pub fn seminorm(&self, mean: MeanKind, mu: T, class: StateClass, config: &OptimizerConfig) -> Result<SeminormResult<T>> {
        check_mu(mu)?;
        config.validate()?;
        let n = self.a.dim();
        if self.norm == T::zero() {
            let e = PureState::basis(n, 0);
            let witness = match class {
                StateClass::Pure => State::Pure(e),
                StateClass::Mixed => State::Mixed(e.to_mixed()),
            };
            return Ok(SeminormResult {
                value: T::zero(),
                witness,
                converged: true,
                starts_agreeing: config.starts,
                iterations_total: 0,
            });
        }
        let settings = config.settings::<T>();
        let pure = self.pure_runs(mean, mu, config, &settings);
        let (best, runs, extra_iterations) = match class {
            StateClass::Pure => (best_index(&pure), pure, 0),
            StateClass::Mixed => {
                let pure_iterations = pure.iter().map(|r| r.iterations).sum::<usize>();
                let seed = pure[best_index(&pure)].x.clone();
                let mixed = self.mixed_runs(mean, mu, config, &settings, seed);
                (best_index(&mixed), mixed, pure_iterations)
            }
        };

        let scale2 = self.norm * self.norm;
        let best_value = runs[best].value * scale2;
        let tol = T::lit(config.objective_tolerance) * T::one().max(best_value);
        let starts_agreeing = runs.iter().filter(|r| (r.value * scale2 - best_value).abs() <= tol).count();
        let witness = match class {
            StateClass::Pure => State::Pure(PureState::from_vector(runs[best].x.clone())?),
            StateClass::Mixed => {
                let x = &runs[best].x;
                let l = ComplexMatrix::from_fn(n, |i, k| x[k * n + i]);
                State::Mixed(MixedState::from_factor(&l)?)
            }
        };
        Ok(SeminormResult {
            value: self.norm * runs[best].value.max(T::zero()).sqrt(),
            witness,
            converged: starts_agreeing >= 2,
            starts_agreeing,
            iterations_total: extra_iterations + runs.iter().map(|r| r.iterations).sum::<usize>(),
        })
    }

    fn pure_runs(&self, mean: MeanKind, mu: T, config: &OptimizerConfig, s: &Settings<T>) -> Vec<optimizer::Ascent<T>> {
        let n = self.a.dim();
        let problem = Problem::new(&self.unit, 1, mean, mu);
        (0..config.starts)
            .into_par_iter()
            .map(|k| {
                let x0 = match k {
                    0 => self.singular.clone(),
                    1 => self.radius_witness.vector().to_vec(),
                    _ => complex_gaussian_vec(&mut rng_from_seed(derive_seed(config.seed, "pure-start", k as u64)), n),
                };
                problem.ascend(x0, s)
            })
            .collect()
    }

    fn mixed_runs(
        &self,
        mean: MeanKind,
        mu: T,
        config: &OptimizerConfig,
        s: &Settings<T>,
        pure_best: Vec<Complex<T>>,
    ) -> Vec<optimizer::Ascent<T>> {
        let n = self.a.dim();
        let problem = Problem::new(&self.unit, n, mean, mu);
        let len = problem.len();
        let zero = Complex::new(T::zero(), T::zero());
        (0..config.starts)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_from_seed(derive_seed(config.seed, "mixed-start", k as u64));
                let mut x0 = vec![zero; len];
                if k == 0 {
                    x0[..n].copy_from_slice(&pure_best);
                    // The embedded pure optimum is already stationary in the
                    // first block; report it exactly.
                    let value = problem.objective(&x0);
                    let ascent = problem.ascend(x0.clone(), s);
                    if ascent.value >= value {
                        return ascent;
                    }
                    return optimizer::Ascent {
                        value,
                        x: normalize(x0),
                        iterations: ascent.iterations,
                    };
                } else if k <= PERTURBED_MIXED_SEEDS {
                    let noise = complex_gaussian_vec::<T, _>(&mut rng, len);
                    for (j, z) in noise.into_iter().enumerate() {
                        x0[j] = z * T::lit(MIXED_PERTURBATION);
                    }
                    for i in 0..n {
                        x0[i] = x0[i] + pure_best[i];
                    }
                } else {
                    x0 = complex_gaussian_vec(&mut rng, len);
                }
                problem.ascend(x0, s)
            })
            .collect()
    }
}

fn best_index<T: Real>(runs: &[optimizer::Ascent<T>]) -> usize {
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = k;
        }
    }
    best
}

/// `‖A‖_{σ_μ}` by multi-start ascent over the requested state class.
pub fn seminorm<T: Real>(q: &SeminormQuery<T>) -> Result<SeminormResult<T>> {
    SeminormContext::new(&q.matrix)?.seminorm(q.mean, q.mu, q.state_class, &q.config)
}

/// `sqrt(v(A)² σ_μ ‖A‖²)`.
pub fn seminorm_upper_envelope<T: Real>(a: &ComplexMatrix<T>, mean: MeanKind, mu: T) -> Result<T> {
    SeminormContext::new(a)?.upper_envelope(mean, mu)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub mu: f64,
    pub value: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndpointCheck {
    pub mu: f64,
    pub value: f64,
    pub reference: f64,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MuSweep {
    pub points: Vec<SweepPoint>,
    pub endpoint_checks: Vec<EndpointCheck>,
}

impl MuSweep {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// Semi-norm at each `μ`; `μ = 0` and `μ = 1` are cross-checked against `v(A)`
/// and `‖A‖` within `1e-6·max(1, reference)`.
pub fn mu_sweep<T: Real>(
    a: &ComplexMatrix<T>,
    mean: MeanKind,
    mus: &[T],
    class: StateClass,
    config: &OptimizerConfig,
) -> Result<MuSweep> {
    for &mu in mus {
        check_mu(mu)?;
    }
    let ctx = SeminormContext::new(a)?;
    let mut points = Vec::with_capacity(mus.len());
    let mut endpoint_checks = Vec::new();
    for &mu in mus {
        let r = ctx.seminorm(mean, mu, class, config)?;
        let value = r.value.as_f64();
        points.push(SweepPoint {
            mu: mu.as_f64(),
            value,
            converged: r.converged,
        });
        let reference = if mu == T::zero() {
            Some(ctx.numerical_radius().as_f64())
        } else if mu == T::one() {
            Some(ctx.operator_norm().as_f64())
        } else {
            None
        };
        if let Some(reference) = reference {
            let residual = (value - reference).abs();
            endpoint_checks.push(EndpointCheck {
                mu: mu.as_f64(),
                value,
                reference,
                residual,
                passed: residual <= ENDPOINT_TOL * reference.max(1.0),
            });
        }
    }
    Ok(MuSweep { points, endpoint_checks })
}
