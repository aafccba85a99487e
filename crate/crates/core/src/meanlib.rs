//! Scalar symmetric means on `[0, ∞)²` and their interpolation paths.
//!
//! Three built-in means are provided, each with its canonical path:
//!
//! | kind       | mean `a σ b`            | path `a σ_μ b`                 |
//! |------------|-------------------------|--------------------------------|
//! | arithmetic | `(a + b) / 2`           | `(1 - μ) a + μ b`              |
//! | geometric  | `√(ab)`                 | `a^(1-μ) b^μ`                  |
//! | harmonic   | `2ab / (a + b)`         | `((1-μ)/a + μ/b)^-1`           |
//!
//! Zero arguments are handled by continuous extension, and the path
//! endpoints `σ_0 = a`, `σ_1 = b` are returned exactly.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{relative_residual, Real};

/// Tolerance used by the axiom checks, relative to `max(1, |lhs|, |rhs|)`.
pub const AXIOM_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Harmonic,
}

impl MeanKind {
    pub const ALL: [MeanKind; 3] = [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Harmonic];

    pub fn name(self) -> &'static str {
        match self {
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::Geometric => "geometric",
            MeanKind::Harmonic => "harmonic",
        }
    }

    /// Mean evaluation `a σ b`.
    pub fn mean<T: Real>(self, a: T, b: T) -> Result<T> {
        mean_eval(self, a, b)
    }

    /// Path evaluation `a σ_μ b`.
    pub fn path<T: Real>(self, mu: T, a: T, b: T) -> Result<T> {
        path_eval(self, mu, a, b)
    }
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arithmetic" => Ok(MeanKind::Arithmetic),
            "geometric" => Ok(MeanKind::Geometric),
            "harmonic" => Ok(MeanKind::Harmonic),
            other => Err(Error::Domain(format!(
                "unknown mean `{other}` (expected arithmetic, geometric or harmonic)"
            ))),
        }
    }
}

/// A symmetric mean together with its interpolation path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeanPath {
    pub kind: MeanKind,
    /// Whether `a σ_μ b ≤ (1-μ) a + μ b` pointwise. True for all built-ins (AM–GM–HM).
    pub is_below_arithmetic: bool,
}

impl MeanPath {
    pub fn new(kind: MeanKind) -> Self {
        MeanPath {
            kind,
            is_below_arithmetic: true,
        }
    }

    pub fn eval<T: Real>(&self, mu: T, a: T, b: T) -> Result<T> {
        path_eval(self.kind, mu, a, b)
    }
}

impl From<MeanKind> for MeanPath {
    fn from(kind: MeanKind) -> Self {
        MeanPath::new(kind)
    }
}

fn check_arg<T: Real>(name: &str, x: T) -> Result<()> {
    if !x.is_finite() || x < T::zero() {
        return Err(Error::Domain(format!(
            "mean argument `{name}` must be finite and non-negative, got {x}"
        )));
    }
    Ok(())
}

/// Returns `a σ b` for the symmetric mean `kind`.
pub fn mean_eval<T: Real>(kind: MeanKind, a: T, b: T) -> Result<T> {
    path_eval(kind, T::lit(0.5), a, b)
}

/// Returns `a σ_μ b` on the interpolation path of `kind`.
pub fn path_eval<T: Real>(kind: MeanKind, mu: T, a: T, b: T) -> Result<T> {
    if !mu.is_finite() || mu < T::zero() || mu > T::one() {
        return Err(Error::Domain(format!("path parameter mu must lie in [0, 1], got {mu}")));
    }
    check_arg("a", a)?;
    check_arg("b", b)?;
    Ok(path_unchecked(kind, mu, a, b))
}

/// Path evaluation without argument validation; callers guarantee the preconditions.
#[inline]
pub(crate) fn path_unchecked<T: Real>(kind: MeanKind, mu: T, a: T, b: T) -> T {
    if mu == T::zero() {
        return a;
    }
    if mu == T::one() {
        return b;
    }
    let one = T::one();
    match kind {
        MeanKind::Arithmetic => (one - mu) * a + mu * b,
        MeanKind::Geometric => {
            if a == T::zero() || b == T::zero() {
                T::zero()
            } else {
                a.powf(one - mu) * b.powf(mu)
            }
        }
        MeanKind::Harmonic => {
            if a == T::zero() || b == T::zero() {
                T::zero()
            } else {
                // ((1-μ)/a + μ/b)^-1 rewritten to avoid the two divisions.
                a * b / ((one - mu) * b + mu * a)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub kind: MeanKind,
    pub samples: usize,
    pub seed: u64,
    pub axioms: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.axioms.iter().all(|a| a.passed)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomOutcome> {
        self.axioms.iter().find(|a| a.name == name)
    }
}

/// Residual accumulator for one axiom.
struct Worst {
    name: &'static str,
    max: f64,
}

impl Worst {
    fn new(name: &'static str) -> Self {
        Worst { name, max: 0.0 }
    }

    fn record(&mut self, r: f64) {
        // NaN residuals must never pass silently.
        if r.is_nan() {
            self.max = f64::INFINITY;
        } else if r > self.max {
            self.max = r;
        }
    }

    fn finish(self) -> AxiomOutcome {
        AxiomOutcome {
            name: self.name.to_string(),
            passed: self.max <= AXIOM_TOLERANCE,
            max_residual: self.max,
        }
    }
}

/// One-sided violation of `lhs ≤ rhs`, relative to `max(1, |lhs|, |rhs|)`.
fn leq_violation(lhs: f64, rhs: f64) -> f64 {
    let scale = 1f64.max(lhs.abs()).max(rhs.abs());
    ((lhs - rhs) / scale).max(0.0)
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (l, h) = (lo.ln(), hi.ln());
    (l + (h - l) * rng.random::<f64>()).exp()
}

/// Checks the mean axioms (non-negativity, betweenness, monotonicity,
/// homogeneity, continuity, symmetry) and the path axioms (endpoints,
/// interpolation identity, monotonicity) on seeded random samples.
///
/// Samples are drawn log-uniformly from `[1e-3, 1e3]`, with a fixed battery of
/// zero-argument corner cases appended for every axiom except continuity.
/// Continuity is checked as shrinkage of `|σ(a+h, b+h) - σ(a, b)|` along the
/// ladder `h = s·10^-k`, `k = 1..14`, `s = max(a, b)`: the increments must be
/// nonincreasing and the last one at most `1e-6·s`.
pub fn verify_axioms(kind: MeanKind, sample_count: usize, seed: u64) -> Result<AxiomReport> {
    if sample_count == 0 {
        return Err(Error::Domain("sample_count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mean = |a: f64, b: f64| path_unchecked(kind, 0.5, a, b);
    let path = |mu: f64, a: f64, b: f64| path_unchecked(kind, mu, a, b);

    let mut nonneg = Worst::new("mean_nonnegative");
    let mut between = Worst::new("mean_between");
    let mut monotone = Worst::new("mean_monotone");
    let mut homogeneous = Worst::new("mean_homogeneous");
    let mut continuous = Worst::new("mean_continuous");
    let mut symmetric = Worst::new("mean_symmetric");
    let mut endpoints = Worst::new("path_endpoints");
    let mut interpolation = Worst::new("path_interpolation");
    let mut path_monotone = Worst::new("path_monotone");
    let mut path_homogeneous = Worst::new("path_homogeneous");

    let mut triples: Vec<(f64, f64, f64, f64)> = (0..sample_count)
        .map(|_| {
            let a = log_uniform(&mut rng, 1e-3, 1e3);
            let b = log_uniform(&mut rng, 1e-3, 1e3);
            let mu = rng.random::<f64>();
            let nu = rng.random::<f64>();
            (a, b, mu, nu)
        })
        .collect();
    let sampled = triples.len();
    for &(a, b) in &[(0.0, 0.0), (0.0, 5.0), (5.0, 0.0), (0.0, 1e-3), (2.0, 2.0)] {
        for &mu in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            triples.push((a, b, mu, 1.0 - mu));
        }
    }

    for (idx, &(a, b, mu, nu)) in triples.iter().enumerate() {
        let m = mean(a, b);
        nonneg.record(leq_violation(0.0, m));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        between.record(leq_violation(lo, m).max(leq_violation(m, hi)));
        symmetric.record(relative_residual(m, mean(b, a)));

        let bump = 1.0 + rng.random::<f64>();
        monotone.record(leq_violation(m, mean(a * bump, b)).max(leq_violation(m, mean(a, b * bump))));
        let p = path(mu, a, b);
        path_monotone
            .record(leq_violation(p, path(mu, a * bump, b)).max(leq_violation(p, path(mu, a, b * bump))));

        let alpha = log_uniform(&mut rng, 1e-3, 1e3);
        homogeneous.record(relative_residual(mean(alpha * a, alpha * b), alpha * m));
        path_homogeneous.record(relative_residual(path(mu, alpha * a, alpha * b), alpha * p));

        // Endpoints are exact; any deviation is recorded as an infinite residual.
        let exact = path(0.0, a, b) == a && path(1.0, a, b) == b;
        endpoints.record(if exact { 0.0 } else { f64::INFINITY });
        endpoints.record(relative_residual(path(0.5, a, b), m));

        let lhs = mean(path(mu, a, b), path(nu, a, b));
        interpolation.record(relative_residual(lhs, path(0.5 * (mu + nu), a, b)));

        if idx < sampled {
            continuous.record(continuity_residual(&path, mu, a, b));
        }
    }

    let axioms = vec![
        nonneg.finish(),
        between.finish(),
        monotone.finish(),
        homogeneous.finish(),
        continuous.finish(),
        symmetric.finish(),
        endpoints.finish(),
        interpolation.finish(),
        path_monotone.finish(),
        path_homogeneous.finish(),
    ];
    Ok(AxiomReport {
        kind,
        samples: sample_count,
        seed,
        axioms,
    })
}

fn continuity_residual(path: &impl Fn(f64, f64, f64) -> f64, mu: f64, a: f64, b: f64) -> f64 {
    let s = a.max(b);
    let base = path(mu, a, b);
    let scale = 1f64.max(s);
    let mut worst: f64 = 0.0;
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for k in 1..=14 {
        let h = s * 10f64.powi(-k);
        let delta = (path(mu, a + h, b + h) - base).abs();
        if delta > prev {
            worst = worst.max((delta - prev) / scale);
        }
        prev = delta;
        last = delta;
    }
    worst.max((last - 1e-6 * s).max(0.0) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_examples() {
        assert_eq!(mean_eval(MeanKind::Arithmetic, 2.0, 4.0).unwrap(), 3.0);
        assert!((mean_eval(MeanKind::Geometric, 4.0, 9.0).unwrap() - 6.0f64).abs() < 1e-15);
        assert!((mean_eval(MeanKind::Harmonic, 2.0, 6.0).unwrap() - 3.0f64).abs() < 1e-15);
        assert_eq!(mean_eval(MeanKind::Harmonic, 0.0, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn path_examples() {
        assert!((path_eval(MeanKind::Arithmetic, 0.25, 4.0, 8.0).unwrap() - 5.0f64).abs() < 1e-15);
        assert!((path_eval(MeanKind::Geometric, 0.25, 16.0, 81.0).unwrap() - 24.0f64).abs() < 1e-12);
        assert_eq!(path_eval(MeanKind::Harmonic, 1.0, 0.0, 7.0).unwrap(), 7.0);
        assert_eq!(path_eval(MeanKind::Geometric, 0.5, 0.0, 9.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_corners_follow_continuous_extension() {
        assert_eq!(path_eval(MeanKind::Geometric, 0.0, 0.0, 3.0).unwrap(), 0.0);
        assert_eq!(path_eval(MeanKind::Geometric, 1.0, 0.0, 3.0).unwrap(), 3.0);
        assert_eq!(path_eval(MeanKind::Harmonic, 0.3, 0.0, 3.0).unwrap(), 0.0);
        assert_eq!(path_eval(MeanKind::Harmonic, 0.0, 4.0, 0.0).unwrap(), 4.0);
        assert_eq!(path_eval(MeanKind::Harmonic, 0.5, 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(mean_eval(MeanKind::Arithmetic, -1.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(mean_eval(MeanKind::Geometric, f64::NAN, 2.0), Err(Error::Domain(_))));
        assert!(matches!(mean_eval(MeanKind::Harmonic, 1.0, f64::INFINITY), Err(Error::Domain(_))));
        assert!(matches!(path_eval(MeanKind::Arithmetic, 1.5, 1.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(path_eval(MeanKind::Arithmetic, -0.1, 1.0, 2.0), Err(Error::Domain(_))));
        assert!(verify_axioms(MeanKind::Arithmetic, 0, 1).is_err());
    }

    #[test]
    fn names_round_trip() {
        for kind in MeanKind::ALL {
            assert_eq!(kind.name().parse::<MeanKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.name()));
        }
        assert!("Arithmetic".parse::<MeanKind>().is_err());
    }

    #[test]
    fn geometric_interpolation_identity_by_direct_evaluation() {
        // sqrt(a^(1-μ) b^μ · a^(1-ν) b^ν) = a^(1-(μ+ν)/2) b^((μ+ν)/2)
        let (a, b, mu, nu) = (3.7f64, 0.42f64, 0.13f64, 0.88f64);
        let direct = a.powf(1.0 - 0.5 * (mu + nu)) * b.powf(0.5 * (mu + nu));
        let lhs = (a.powf(1.0 - mu) * b.powf(mu) * a.powf(1.0 - nu) * b.powf(nu)).sqrt();
        assert!(relative_residual(lhs, direct) < 1e-14);
        let via_lib = mean_eval(
            MeanKind::Geometric,
            path_eval(MeanKind::Geometric, mu, a, b).unwrap(),
            path_eval(MeanKind::Geometric, nu, a, b).unwrap(),
        )
        .unwrap();
        assert!(relative_residual(via_lib, direct) < 1e-14);
    }

    #[test]
    fn axiom_suites_pass() {
        for kind in MeanKind::ALL {
            let report = verify_axioms(kind, 2000, 42).unwrap();
            for ax in &report.axioms {
                assert!(ax.passed, "{kind}: {} residual {:e}", ax.name, ax.max_residual);
            }
        }
    }

    #[test]
    fn f32_paths_work() {
        let v: f32 = path_eval(MeanKind::Geometric, 0.25f32, 16.0, 81.0).unwrap();
        assert!((v - 24.0).abs() < 1e-4);
    }
}
