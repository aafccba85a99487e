//! Named inequality checks. Each evaluates to a signed slack (`≥ 0` means the
//! inequality holds) and a scale; a check passes when `slack ≥ -tol·scale`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::classify::{alpha_beta, is_p_hyponormal};
use crate::engine::{crawford, OptimizerConfig, SeminormContext, SeminormResult};
use crate::error::{Error, Result};
use crate::linalg::{
    abs_matrix, apply_scalar_function, hermitian_eigen, lambda_min, operator_norm, psd_power, spectral_radius,
    SpectralFunction, HERMITIAN_TOL, LOEWNER_TOL, PSD_TOL,
};
use crate::meanlib::{path_unchecked, MeanKind, MeanPath};
use crate::states::{state_eval, State, StateClass};
use crate::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Assert,
    ReportOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    ReportOnly,
}

/// Which instance generator a check draws from in the suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ginibre,
    Crawford,
    Normal,
    Pair,
    Lemma32,
    Nilpotent,
    Jensen,
    Equality,
}

/// How a check's variants are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variants {
    /// Every configured mean and `μ`.
    MeansMus,
    /// Every configured mean at `μ = ½`.
    MeansHalf,
    /// Every configured mean at `μ = ½`, crossed with `ν ∈ {¼, ½, ¾}`.
    MeansHalfNu,
    /// Every configured mean at `μ = ½`, crossed with `α ∈ {0, ¼, ½, 1}`.
    MeansHalfAlpha,
    /// `ν ∈ {¼, ½, ¾}`, no mean.
    Nu,
    /// Jensen functions, no mean.
    Functions,
    /// Arithmetic mean at `μ = ½` only.
    Nabla,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckSpec {
    pub name: &'static str,
    pub reference: &'static str,
    pub mode: CheckMode,
    pub family: Family,
    pub variants: Variants,
}

const fn entry(name: &'static str, reference: &'static str, mode: CheckMode, family: Family, variants: Variants) -> CheckSpec {
    CheckSpec {
        name,
        reference,
        mode,
        family,
        variants,
    }
}

use CheckMode::{Assert, ReportOnly};

pub const CHECKS: &[CheckSpec] = &[
    entry("sandwich", "v(a) <= ||a||_{sigma_mu} <= ||a||", Assert, Family::Ginibre, Variants::MeansMus),
    entry("envelope", "||a||_{sigma_mu} <= sqrt(v(a)^2 sigma_mu ||a||^2)", Assert, Family::Ginibre, Variants::MeansMus),
    entry(
        "normal_collapse",
        "a normal => v(a) = ||a||_{sigma_mu} = ||a*||_{sigma_mu} = ||a||",
        Assert,
        Family::Normal,
        Variants::MeansMus,
    ),
    entry(
        "semi_hypo_abs",
        "a semi-hyponormal => ||a||_{sigma_mu} <= || |a| ||_{sigma_mu}",
        Assert,
        Family::Normal,
        Variants::MeansMus,
    ),
    entry("hypo_adjoint", "a hyponormal => ||a*||_{sigma_mu} <= ||a||_{sigma_mu}", Assert, Family::Normal, Variants::MeansMus),
    entry(
        "alpha_beta_sandwich",
        "alpha ||a||_{sigma_mu} <= ||a*||_{sigma_mu} <= beta ||a||_{sigma_mu}",
        Assert,
        Family::Ginibre,
        Variants::MeansMus,
    ),
    entry("triangle_nabla", "||a+b||_nabla <= ||a||_nabla + ||b||_nabla", Assert, Family::Pair, Variants::Nabla),
    entry(
        "triangle_path",
        "||a+b||_{sigma_mu} <= ||a||_{sigma_mu} + ||b||_{sigma_mu}",
        ReportOnly,
        Family::Pair,
        Variants::MeansMus,
    ),
    entry("mixed_schwarz", "|f(a)|^2 <= f(|a|^{2nu}) f(|a*|^{2(1-nu)})", Assert, Family::Ginibre, Variants::Nu),
    entry(
        "lemma32_product",
        "|a|b = b*|a| => |f(ab)|^2 <= r(b)^2 f(|a|^{2nu}) f(|a*|^{2(1-nu)})",
        Assert,
        Family::Lemma32,
        Variants::Nu,
    ),
    entry(
        "lemma32_product_stated",
        "|a|b = b*|a| => |f(ab)|^2 <= r(b) f(|a|^{2nu}) f(|a*|^{2(1-nu)})",
        ReportOnly,
        Family::Lemma32,
        Variants::Nu,
    ),
    entry(
        "jensen_state",
        "phi convex => phi(f(a)) <= f(phi(a)); reversed for concave phi",
        Assert,
        Family::Jensen,
        Variants::Functions,
    ),
    entry(
        "thm34_first",
        "||ab||_sigma <= sqrt(|| r(b)^2/4 (|a|^{4nu} + |a*|^{4(1-nu)}) + |ab|^2/2 ||)",
        Assert,
        Family::Lemma32,
        Variants::MeansHalfNu,
    ),
    entry(
        "thm34_first_stated",
        "||ab||_sigma <= sqrt(|| r(b)/4 (|a|^{4nu} + |a*|^{4(1-nu)}) + |ab|^2/2 ||)",
        ReportOnly,
        Family::Lemma32,
        Variants::MeansHalfNu,
    ),
    entry(
        "thm34_second",
        "||ab||_sigma^2 <= 1/2 sqrt(|| r(b)|a|^{4nu} + |a|^{4(1-nu)} || || |a|^{4nu} + r(b)|a*|^{4(1-nu)} ||)",
        ReportOnly,
        Family::Lemma32,
        Variants::MeansHalfNu,
    ),
    entry(
        "cor_nu_first",
        "||a||_sigma <= sqrt(|| (|a|^{4nu} + |a*|^{4(1-nu)})/4 + |a|^2/2 ||)",
        Assert,
        Family::Ginibre,
        Variants::MeansHalfNu,
    ),
    entry(
        "cor_nu_second",
        "||a||_sigma^2 <= 1/2 sqrt(|| |a|^{4nu} + |a|^{4(1-nu)} || || |a|^{4nu} + |a*|^{4(1-nu)} ||)",
        ReportOnly,
        Family::Ginibre,
        Variants::MeansHalfNu,
    ),
    entry(
        "alpha_bound",
        "||a||_sigma^2 <= 1/2 || (1+alpha)|a|^2 + (1-alpha)|a*|^2 ||",
        Assert,
        Family::Ginibre,
        Variants::MeansHalfAlpha,
    ),
    entry(
        "crawford_lower",
        "max(sqrt(v(a)^2 sigma m(a*a)), sqrt(m(a)^2 sigma ||a||^2)) <= ||a||_sigma",
        Assert,
        Family::Crawford,
        Variants::MeansHalf,
    ),
    entry("sqrt2_nabla", "||a|| / sqrt(2) <= ||a||_nabla", Assert, Family::Ginibre, Variants::Nabla),
    entry(
        "crawford_nabla_proof",
        "||a||_nabla^2 >= max(v(a) m(a*a), m(a) ||a||^2)",
        ReportOnly,
        Family::Crawford,
        Variants::Nabla,
    ),
    entry(
        "crawford_nabla_amgm",
        "||a||_nabla^2 >= max(v(a) sqrt(m(a*a)), m(a) ||a||)",
        Assert,
        Family::Crawford,
        Variants::Nabla,
    ),
    entry(
        "crawford_nabla_stated",
        "max(sqrt(v(a)^2 m(a*a)), sqrt(m(a)^2 ||a||^2)) <= ||a||_nabla",
        ReportOnly,
        Family::Crawford,
        Variants::Nabla,
    ),
    entry("nilpotent_sigma_zero", "a^2 = 0 => || |a||a*| ||_sigma = 0", Assert, Family::Nilpotent, Variants::MeansHalf),
];

pub const EQUALITY_CHECK: CheckSpec = entry(
    "equality_characterization",
    "||a+b||_nabla = ||a||_nabla + ||b||_nabla <=> sup_f Re(f(b*a) + conj(f(a)) f(b)) = 2 ||a||_nabla ||b||_nabla",
    Assert,
    Family::Equality,
    Variants::Nabla,
);

pub const NU_VALUES: [f64; 3] = [0.25, 0.5, 0.75];
pub const ALPHA_VALUES: [f64; 4] = [0.0, 0.25, 0.5, 1.0];

/// Looks up a check by name, including the equality characterization.
pub fn check_spec(name: &str) -> Result<&'static CheckSpec> {
    if name == EQUALITY_CHECK.name {
        return Ok(&EQUALITY_CHECK);
    }
    CHECKS
        .iter()
        .find(|c| c.name == name)
        .ok_or_else(|| Error::UnknownCheck(name.to_string()))
}

pub fn all_check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).chain(std::iter::once(EQUALITY_CHECK.name)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JensenFunction {
    Square,
    Exp,
    Sqrt,
}

impl JensenFunction {
    pub const ALL: [JensenFunction; 3] = [JensenFunction::Square, JensenFunction::Exp, JensenFunction::Sqrt];

    pub fn is_convex(self) -> bool {
        !matches!(self, JensenFunction::Sqrt)
    }

    fn scalar(self, t: f64) -> f64 {
        match self {
            JensenFunction::Square => t * t,
            JensenFunction::Exp => t.exp(),
            JensenFunction::Sqrt => t.max(0.0).sqrt(),
        }
    }

    fn spectral(self) -> SpectralFunction<f64> {
        match self {
            JensenFunction::Square => SpectralFunction::Square,
            JensenFunction::Exp => SpectralFunction::Exp,
            JensenFunction::Sqrt => SpectralFunction::Power(0.5),
        }
    }
}

/// Matrices, states and parameters a check is evaluated on.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckInputs {
    pub a: Matrix,
    pub b: Option<Matrix>,
    /// States for checks quantified over every state; the slack is the minimum.
    pub states: Vec<State<f64>>,
    pub nu: Option<f64>,
    pub alpha: Option<f64>,
    pub function: Option<JensenFunction>,
    pub trial_seed: u64,
    pub generator: Option<String>,
}

impl CheckInputs {
    pub fn single(a: Matrix) -> Self {
        CheckInputs {
            a,
            b: None,
            states: Vec::new(),
            nu: None,
            alpha: None,
            function: None,
            trial_seed: 0,
            generator: None,
        }
    }

    pub fn pair(a: Matrix, b: Matrix) -> Self {
        CheckInputs {
            b: Some(b),
            ..Self::single(a)
        }
    }

    pub fn with_states(mut self, states: Vec<State<f64>>) -> Self {
        self.states = states;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = Some(nu);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_function(mut self, f: JensenFunction) -> Self {
        self.function = Some(f);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.trial_seed = seed;
        self
    }
}

/// State class and optimizer settings used for every semi-norm inside a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub state_class: StateClass,
    pub optimizer: OptimizerConfig,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            state_class: StateClass::Mixed,
            optimizer: OptimizerConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputsDigest {
    pub dim: usize,
    pub generator: Option<String>,
    pub mean: Option<MeanKind>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub alpha: Option<f64>,
    pub function: Option<JensenFunction>,
    pub states: usize,
    pub state_class: StateClass,
    pub optimizer: OptimizerConfig,
}

/// Everything needed to re-run a check: matrices in Matrix JSON and states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub a: Value,
    pub b: Option<Value>,
    pub states: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub paper_ref: String,
    pub mode: CheckMode,
    pub status: CheckStatus,
    pub slack: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub trial_seed: u64,
    pub inputs: InputsDigest,
    /// The quantities on both sides of the inequality.
    pub values: BTreeMap<String, f64>,
    pub counterexample: Option<Counterexample>,
}

impl PropertyCheck {
    pub fn holds(&self) -> bool {
        self.slack >= -self.tolerance * self.scale
    }

    /// Report-only record whose slack is beyond the tolerance.
    pub fn is_finding(&self) -> bool {
        self.status == CheckStatus::ReportOnly && !self.holds()
    }
}

type Key = Vec<u64>;
type ResultCache = HashMap<(Key, MeanKind, u64), Rc<SeminormResult<f64>>>;

fn key(m: &Matrix) -> Key {
    m.entries().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect()
}

/// Per-instance memo of semi-norm contexts and values.
pub(crate) struct Workbench<'o> {
    opts: &'o EvalOptions,
    contexts: RefCell<HashMap<Key, Rc<SeminormContext<f64>>>>,
    values: RefCell<ResultCache>,
    crawford: RefCell<HashMap<Key, f64>>,
}

impl<'o> Workbench<'o> {
    pub fn new(opts: &'o EvalOptions) -> Self {
        Workbench {
            opts,
            contexts: RefCell::new(HashMap::new()),
            values: RefCell::new(HashMap::new()),
            crawford: RefCell::new(HashMap::new()),
        }
    }

    pub fn options(&self) -> &EvalOptions {
        self.opts
    }

    pub fn context(&self, m: &Matrix) -> Result<Rc<SeminormContext<f64>>> {
        let k = key(m);
        if let Some(c) = self.contexts.borrow().get(&k) {
            return Ok(c.clone());
        }
        let c = Rc::new(SeminormContext::new(m)?);
        self.contexts.borrow_mut().insert(k, c.clone());
        Ok(c)
    }

    pub fn result(&self, m: &Matrix, mean: MeanKind, mu: f64) -> Result<Rc<SeminormResult<f64>>> {
        let k = (key(m), mean, mu.to_bits());
        if let Some(r) = self.values.borrow().get(&k) {
            return Ok(r.clone());
        }
        let r = Rc::new(
            self.context(m)?
                .seminorm(mean, mu, self.opts.state_class, &self.opts.optimizer)?,
        );
        self.values.borrow_mut().insert(k, r.clone());
        Ok(r)
    }

    pub fn seminorm(&self, m: &Matrix, mean: MeanKind, mu: f64) -> Result<f64> {
        Ok(self.result(m, mean, mu)?.value)
    }

    pub fn radius(&self, m: &Matrix) -> Result<f64> {
        Ok(self.context(m)?.numerical_radius())
    }

    pub fn norm(&self, m: &Matrix) -> Result<f64> {
        Ok(self.context(m)?.operator_norm())
    }

    pub fn crawford(&self, m: &Matrix) -> f64 {
        let k = key(m);
        if let Some(&v) = self.crawford.borrow().get(&k) {
            return v;
        }
        let v = crawford(m);
        self.crawford.borrow_mut().insert(k, v);
        v
    }
}

struct Eval {
    slack: f64,
    scale: f64,
    values: Vec<(&'static str, f64)>,
}

fn precondition(check: &str, reason: impl Into<String>) -> Error {
    Error::Precondition {
        check: check.to_string(),
        reason: reason.into(),
    }
}

fn need_b<'a>(spec: &CheckSpec, inputs: &'a CheckInputs) -> Result<&'a Matrix> {
    let b = inputs
        .b
        .as_ref()
        .ok_or_else(|| precondition(spec.name, "a second matrix is required"))?;
    if b.dim() != inputs.a.dim() {
        return Err(Error::DimensionMismatch {
            expected: inputs.a.dim(),
            found: b.dim(),
        });
    }
    Ok(b)
}

fn need_states<'a>(spec: &CheckSpec, inputs: &'a CheckInputs) -> Result<&'a [State<f64>]> {
    if inputs.states.is_empty() {
        return Err(precondition(spec.name, "at least one state is required"));
    }
    if let Some(s) = inputs.states.iter().find(|s| s.dim() != inputs.a.dim()) {
        return Err(Error::DimensionMismatch {
            expected: inputs.a.dim(),
            found: s.dim(),
        });
    }
    Ok(&inputs.states)
}

fn need_nu(spec: &CheckSpec, inputs: &CheckInputs) -> Result<f64> {
    match inputs.nu {
        Some(nu) if (0.0..=1.0).contains(&nu) => Ok(nu),
        Some(nu) => Err(Error::Domain(format!("nu must lie in [0, 1], got {nu}"))),
        None => Err(precondition(spec.name, "parameter nu is required")),
    }
}

fn need_below_arithmetic(spec: &CheckSpec, mean: MeanKind) -> Result<()> {
    if MeanPath::new(mean).is_below_arithmetic {
        Ok(())
    } else {
        Err(precondition(spec.name, format!("{mean} is not below the arithmetic mean")))
    }
}

/// `|x|^p` as `(x*x)^{p/2}`.
fn abs_pow(x: &Matrix, p: f64) -> Result<Matrix> {
    psd_power(&x.gram(), p / 2.0, PSD_TOL)
}

/// `|x*|^p` as `(xx*)^{p/2}`.
fn abs_adj_pow(x: &Matrix, p: f64) -> Result<Matrix> {
    psd_power(&x.gram_adjoint(), p / 2.0, PSD_TOL)
}

fn f_real(s: &State<f64>, x: &Matrix) -> Result<f64> {
    Ok(state_eval(s, x)?.re)
}

/// Minimum of a per-state slack, plus the index of the minimizing state.
fn min_over_states(states: &[State<f64>], mut slack: impl FnMut(&State<f64>) -> Result<(f64, f64, f64)>) -> Result<(f64, usize, f64, f64)> {
    let mut worst = (f64::INFINITY, 0, 0.0, 0.0);
    for (k, s) in states.iter().enumerate() {
        let (sl, lhs, rhs) = slack(s)?;
        if sl < worst.0 {
            worst = (sl, k, lhs, rhs);
        }
    }
    Ok(worst)
}

fn commutation_defect(a: &Matrix, b: &Matrix) -> Result<f64> {
    let abs_a = abs_matrix(a)?;
    Ok((&abs_a.matmul(b) - &b.adjoint().matmul(&abs_a)).frobenius_norm())
}

fn lemma32_hypothesis(spec: &CheckSpec, a: &Matrix, b: &Matrix) -> Result<()> {
    let defect = commutation_defect(a, b)?;
    let limit = 1e-8 * (operator_norm(a) * operator_norm(b)).max(1.0);
    if defect > limit {
        return Err(precondition(spec.name, format!("|a|b - b*|a| has norm {defect:e} > {limit:e}")));
    }
    Ok(())
}

fn evaluate_inner(spec: &CheckSpec, inputs: &CheckInputs, mean: MeanKind, mu: f64, bench: &Workbench) -> Result<Eval> {
    let a = &inputs.a;
    let s = |m: &Matrix, mean: MeanKind, mu: f64| bench.seminorm(m, mean, mu);
    let nabla = MeanKind::Arithmetic;
    let norm_a = bench.norm(a)?;
    let deg1 = norm_a.max(1.0);
    let deg2 = (norm_a * norm_a).max(1.0);
    let e = match spec.name {
        "sandwich" => {
            let (sv, v) = (s(a, mean, mu)?, bench.radius(a)?);
            Eval {
                slack: (sv - v).min(norm_a - sv),
                scale: deg1,
                values: vec![("v", v), ("seminorm", sv), ("norm", norm_a)],
            }
        }
        "envelope" => {
            let sv = s(a, mean, mu)?;
            let env = bench.context(a)?.upper_envelope(mean, mu)?;
            Eval {
                slack: env - sv,
                scale: deg1,
                values: vec![("seminorm", sv), ("envelope", env)],
            }
        }
        "normal_collapse" => {
            let commutator = (&a.gram() - &a.gram_adjoint()).frobenius_norm();
            if commutator > LOEWNER_TOL * deg2 {
                return Err(precondition(spec.name, format!("a is not normal (‖[a*, a]‖ = {commutator:e})")));
            }
            let (sv, sadj, v) = (s(a, mean, mu)?, s(&a.adjoint(), mean, mu)?, bench.radius(a)?);
            let gap = (sv - v).abs().max((sv - norm_a).abs()).max((sadj - norm_a).abs());
            Eval {
                slack: -gap,
                scale: deg1,
                values: vec![("v", v), ("seminorm", sv), ("seminorm_adjoint", sadj), ("norm", norm_a)],
            }
        }
        "semi_hypo_abs" => {
            if !is_p_hyponormal(a, 0.5, LOEWNER_TOL)? {
                return Err(precondition(spec.name, "a is not semi-hyponormal"));
            }
            let (sv, sabs) = (s(a, mean, mu)?, s(&abs_matrix(a)?, mean, mu)?);
            Eval {
                slack: sabs - sv,
                scale: deg1,
                values: vec![("seminorm", sv), ("seminorm_abs", sabs)],
            }
        }
        "hypo_adjoint" => {
            if !is_p_hyponormal(a, 1.0, LOEWNER_TOL)? {
                return Err(precondition(spec.name, "a is not hyponormal"));
            }
            let (sv, sadj) = (s(a, mean, mu)?, s(&a.adjoint(), mean, mu)?);
            Eval {
                slack: sv - sadj,
                scale: deg1,
                values: vec![("seminorm", sv), ("seminorm_adjoint", sadj)],
            }
        }
        "alpha_beta_sandwich" => {
            let ab = alpha_beta(a, LOEWNER_TOL * deg2)?
                .ok_or_else(|| precondition(spec.name, "a is not invertible, so no (alpha, beta) pair exists"))?;
            let (sv, sadj) = (s(a, mean, mu)?, s(&a.adjoint(), mean, mu)?);
            Eval {
                slack: (sadj - ab.alpha * sv).min(ab.beta * sv - sadj),
                scale: (ab.beta * norm_a).max(1.0),
                values: vec![("alpha", ab.alpha), ("beta", ab.beta), ("seminorm", sv), ("seminorm_adjoint", sadj)],
            }
        }
        "triangle_nabla" | "triangle_path" => {
            let b = need_b(spec, inputs)?;
            let (mean, mu) = if spec.name == "triangle_nabla" { (nabla, 0.5) } else { (mean, mu) };
            let sum = a + b;
            let (sa, sb, ssum) = (s(a, mean, mu)?, s(b, mean, mu)?, s(&sum, mean, mu)?);
            Eval {
                slack: sa + sb - ssum,
                scale: (norm_a + bench.norm(b)?).max(1.0),
                values: vec![("seminorm_a", sa), ("seminorm_b", sb), ("seminorm_sum", ssum)],
            }
        }
        "mixed_schwarz" => {
            let nu = need_nu(spec, inputs)?;
            let states = need_states(spec, inputs)?;
            let (p, q) = (abs_pow(a, 2.0 * nu)?, abs_adj_pow(a, 2.0 * (1.0 - nu))?);
            let (slack, k, lhs, rhs) = min_over_states(states, |st| {
                let lhs = state_eval(st, a)?.norm_sqr();
                let rhs = f_real(st, &p)? * f_real(st, &q)?;
                Ok((rhs - lhs, lhs, rhs))
            })?;
            Eval {
                slack,
                scale: deg2,
                values: vec![("lhs", lhs), ("rhs", rhs), ("worst_state", k as f64)],
            }
        }
        "lemma32_product" | "lemma32_product_stated" => {
            let nu = need_nu(spec, inputs)?;
            let b = need_b(spec, inputs)?;
            let states = need_states(spec, inputs)?;
            lemma32_hypothesis(spec, a, b)?;
            let r = spectral_radius(b);
            let factor = if spec.name == "lemma32_product" { r * r } else { r };
            let ab = a.matmul(b);
            let (p, q) = (abs_pow(a, 2.0 * nu)?, abs_adj_pow(a, 2.0 * (1.0 - nu))?);
            let (slack, k, lhs, rhs) = min_over_states(states, |st| {
                let lhs = state_eval(st, &ab)?.norm_sqr();
                let rhs = factor * f_real(st, &p)? * f_real(st, &q)?;
                Ok((rhs - lhs, lhs, rhs))
            })?;
            let nab = operator_norm(&ab);
            Eval {
                slack,
                scale: (factor * norm_a * norm_a).max(nab * nab).max(1.0),
                values: vec![("lhs", lhs), ("rhs", rhs), ("spectral_radius_b", r), ("worst_state", k as f64)],
            }
        }
        "jensen_state" => {
            let f = inputs
                .function
                .ok_or_else(|| precondition(spec.name, "a scalar function is required"))?;
            let states = need_states(spec, inputs)?;
            if a.hermitian_defect() > HERMITIAN_TOL * a.frobenius_norm() {
                return Err(precondition(spec.name, "a must be Hermitian"));
            }
            if f == JensenFunction::Sqrt && lambda_min(a)? < -PSD_TOL * norm_a {
                return Err(precondition(spec.name, "sqrt requires a positive semidefinite a"));
            }
            let fa = apply_scalar_function(a, f.spectral(), PSD_TOL)?;
            let (slack, k, lhs, rhs) = min_over_states(states, |st| {
                let outer = f.scalar(f_real(st, a)?);
                let inner = f_real(st, &fa)?;
                let (lo, hi) = if f.is_convex() { (outer, inner) } else { (inner, outer) };
                Ok((hi - lo, lo, hi))
            })?;
            Eval {
                slack,
                scale: lhs.abs().max(rhs.abs()).max(1.0),
                values: vec![("lhs", lhs), ("rhs", rhs), ("worst_state", k as f64)],
            }
        }
        "thm34_first" | "thm34_first_stated" | "thm34_second" => {
            need_below_arithmetic(spec, mean)?;
            let nu = need_nu(spec, inputs)?;
            let b = need_b(spec, inputs)?;
            lemma32_hypothesis(spec, a, b)?;
            let r = spectral_radius(b);
            let ab = a.matmul(b);
            let sv = s(&ab, mean, 0.5)?;
            let p4 = abs_pow(a, 4.0 * nu)?;
            let q4 = abs_adj_pow(a, 4.0 * (1.0 - nu))?;
            if spec.name == "thm34_second" {
                let q4_self = abs_pow(a, 4.0 * (1.0 - nu))?;
                let left = operator_norm(&(&p4.scale_real(r) + &q4_self));
                let right = operator_norm(&(&p4 + &q4.scale_real(r)));
                let rhs = 0.5 * (left * right).sqrt();
                Eval {
                    slack: rhs - sv * sv,
                    scale: (sv * sv).max(rhs).max(1.0),
                    values: vec![("lhs", sv * sv), ("rhs", rhs), ("spectral_radius_b", r)],
                }
            } else {
                let factor = if spec.name == "thm34_first" { r * r } else { r };
                let m = &(&p4 + &q4).scale_real(factor / 4.0) + &ab.gram().scale_real(0.5);
                let rhs = operator_norm(&m).sqrt();
                Eval {
                    slack: rhs - sv,
                    scale: sv.max(rhs).max(1.0),
                    values: vec![("lhs", sv), ("rhs", rhs), ("spectral_radius_b", r)],
                }
            }
        }
        "cor_nu_first" | "cor_nu_second" => {
            need_below_arithmetic(spec, mean)?;
            let nu = need_nu(spec, inputs)?;
            let sv = s(a, mean, 0.5)?;
            let p4 = abs_pow(a, 4.0 * nu)?;
            let q4 = abs_adj_pow(a, 4.0 * (1.0 - nu))?;
            if spec.name == "cor_nu_first" {
                let m = &(&p4 + &q4).scale_real(0.25) + &a.gram().scale_real(0.5);
                let rhs = operator_norm(&m).sqrt();
                Eval {
                    slack: rhs - sv,
                    scale: sv.max(rhs).max(1.0),
                    values: vec![("lhs", sv), ("rhs", rhs)],
                }
            } else {
                let q4_self = abs_pow(a, 4.0 * (1.0 - nu))?;
                let rhs = 0.5 * (operator_norm(&(&p4 + &q4_self)) * operator_norm(&(&p4 + &q4))).sqrt();
                Eval {
                    slack: rhs - sv * sv,
                    scale: (sv * sv).max(rhs).max(1.0),
                    values: vec![("lhs", sv * sv), ("rhs", rhs)],
                }
            }
        }
        "alpha_bound" => {
            need_below_arithmetic(spec, mean)?;
            let alpha = match inputs.alpha {
                Some(x) if (0.0..=1.0).contains(&x) => x,
                Some(x) => return Err(Error::Domain(format!("alpha must lie in [0, 1], got {x}"))),
                None => return Err(precondition(spec.name, "parameter alpha is required")),
            };
            let sv = s(a, mean, 0.5)?;
            let m = &a.gram().scale_real(1.0 + alpha) + &a.gram_adjoint().scale_real(1.0 - alpha);
            let rhs = 0.5 * operator_norm(&m);
            Eval {
                slack: rhs - sv * sv,
                scale: deg2,
                values: vec![("lhs", sv * sv), ("rhs", rhs)],
            }
        }
        "crawford_lower" => {
            let sv = s(a, mean, 0.5)?;
            let v = bench.radius(a)?;
            let m = bench.crawford(a);
            let mgram = lambda_min(&a.gram())?.max(0.0);
            let first = path_unchecked(mean, 0.5, v * v, mgram).sqrt();
            let second = path_unchecked(mean, 0.5, m * m, norm_a * norm_a).sqrt();
            Eval {
                slack: sv - first.max(second),
                scale: deg1,
                values: vec![("seminorm", sv), ("first", first), ("second", second), ("crawford", m)],
            }
        }
        "sqrt2_nabla" => {
            let sv = s(a, nabla, 0.5)?;
            let bound = norm_a / 2f64.sqrt();
            Eval {
                slack: sv - bound,
                scale: deg1,
                values: vec![("seminorm", sv), ("bound", bound)],
            }
        }
        "crawford_nabla_proof" | "crawford_nabla_amgm" | "crawford_nabla_stated" => {
            let sv = s(a, nabla, 0.5)?;
            let v = bench.radius(a)?;
            let m = bench.crawford(a);
            let mgram = lambda_min(&a.gram())?.max(0.0);
            let (lhs, first, second, scale) = match spec.name {
                "crawford_nabla_proof" => (sv * sv, v * mgram, m * norm_a * norm_a, deg2),
                "crawford_nabla_amgm" => (sv * sv, v * mgram.sqrt(), m * norm_a, deg2),
                _ => (sv, v * mgram.sqrt(), m * norm_a, deg1),
            };
            Eval {
                slack: lhs - first.max(second),
                scale,
                values: vec![("lhs", lhs), ("first", first), ("second", second), ("v", v), ("crawford", m), ("m_gram", mgram)],
            }
        }
        "nilpotent_sigma_zero" => {
            let sq = a.matmul(a).frobenius_norm();
            if sq > LOEWNER_TOL * deg2 {
                return Err(precondition(spec.name, format!("a^2 is not zero (‖a²‖ = {sq:e})")));
            }
            let prod = abs_matrix(a)?.matmul(&abs_matrix(&a.adjoint())?);
            let sv = s(&prod, mean, 0.5)?;
            Eval {
                slack: -sv,
                scale: deg2,
                values: vec![("seminorm", sv), ("square_norm", sq)],
            }
        }
        other => return Err(Error::UnknownCheck(other.to_string())),
    };
    Ok(e)
}

/// Which mean and `μ` a check actually uses, for the digest.
fn effective_mean_mu(spec: &CheckSpec, mean: MeanKind, mu: f64) -> (Option<MeanKind>, Option<f64>) {
    match spec.variants {
        Variants::MeansMus => (Some(mean), Some(mu)),
        Variants::MeansHalf | Variants::MeansHalfNu | Variants::MeansHalfAlpha => (Some(mean), Some(0.5)),
        Variants::Nabla => (Some(MeanKind::Arithmetic), Some(0.5)),
        Variants::Nu | Variants::Functions => (None, None),
    }
}

pub(crate) fn digest(spec: &CheckSpec, inputs: &CheckInputs, mean: MeanKind, mu: f64, opts: &EvalOptions) -> InputsDigest {
    let (mean, mu) = effective_mean_mu(spec, mean, mu);
    InputsDigest {
        dim: inputs.a.dim(),
        generator: inputs.generator.clone(),
        mean,
        mu,
        nu: inputs.nu,
        alpha: inputs.alpha,
        function: inputs.function,
        states: inputs.states.len(),
        state_class: opts.state_class,
        optimizer: opts.optimizer.clone(),
    }
}

pub(crate) fn counterexample(inputs: &CheckInputs) -> Counterexample {
    Counterexample {
        a: inputs.a.to_json_value(),
        b: inputs.b.as_ref().map(|b| b.to_json_value()),
        states: inputs.states.iter().map(|s| s.to_json_value()).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn finish(
    spec: &CheckSpec,
    inputs: &CheckInputs,
    mean: MeanKind,
    mu: f64,
    tol: f64,
    opts: &EvalOptions,
    slack: f64,
    scale: f64,
    values: Vec<(&'static str, f64)>,
) -> PropertyCheck {
    let holds = slack >= -tol * scale;
    let status = match spec.mode {
        CheckMode::ReportOnly => CheckStatus::ReportOnly,
        CheckMode::Assert if holds => CheckStatus::Pass,
        CheckMode::Assert => CheckStatus::Fail,
    };
    let attach = match spec.mode {
        CheckMode::Assert => !holds,
        CheckMode::ReportOnly => slack < 0.0,
    };
    PropertyCheck {
        name: spec.name.to_string(),
        paper_ref: spec.reference.to_string(),
        mode: spec.mode,
        status,
        slack,
        scale,
        tolerance: tol,
        trial_seed: inputs.trial_seed,
        inputs: digest(spec, inputs, mean, mu, opts),
        values: values.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        counterexample: attach.then(|| counterexample(inputs)),
    }
}

pub(crate) fn evaluate(
    spec: &CheckSpec,
    inputs: &CheckInputs,
    mean: MeanKind,
    mu: f64,
    tol: f64,
    bench: &Workbench,
) -> Result<PropertyCheck> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("mu must lie in [0, 1], got {mu}")));
    }
    if spec.family == Family::Equality {
        let b = need_b(spec, inputs)?;
        return super::equality::evaluate_equality(inputs, b, tol, bench);
    }
    let e = evaluate_inner(spec, inputs, mean, mu, bench)?;
    Ok(finish(spec, inputs, mean, mu, tol, bench.options(), e.slack, e.scale, e.values))
}

/// Evaluates one named check with mixed states and default optimizer settings.
pub fn check_inequality(name: &str, inputs: &CheckInputs, mean: MeanKind, mu: f64, tol: f64) -> Result<PropertyCheck> {
    check_inequality_with(name, inputs, mean, mu, tol, &EvalOptions::default())
}

pub fn check_inequality_with(
    name: &str,
    inputs: &CheckInputs,
    mean: MeanKind,
    mu: f64,
    tol: f64,
    opts: &EvalOptions,
) -> Result<PropertyCheck> {
    let spec = check_spec(name)?;
    evaluate(spec, inputs, mean, mu, tol, &Workbench::new(opts))
}

/// Rebuilds the inputs of a record from its counterexample payload.
pub fn inputs_from_record(check: &PropertyCheck) -> Result<CheckInputs> {
    let cx = check
        .counterexample
        .as_ref()
        .ok_or_else(|| Error::Parse {
            field: "counterexample".into(),
            reason: "record carries no counterexample payload".into(),
        })?;
    let a = Matrix::from_json_value(&cx.a)?;
    let b = cx.b.as_ref().map(Matrix::from_json_value).transpose()?;
    let states = cx.states.iter().map(State::from_json_value).collect::<Result<Vec<_>>>()?;
    Ok(CheckInputs {
        a,
        b,
        states,
        nu: check.inputs.nu,
        alpha: check.inputs.alpha,
        function: check.inputs.function,
        trial_seed: check.trial_seed,
        generator: check.inputs.generator.clone(),
    })
}

/// Re-runs a record from its counterexample payload and returns the slack.
pub fn reevaluate(check: &PropertyCheck) -> Result<f64> {
    let inputs = inputs_from_record(check)?;
    let opts = EvalOptions {
        state_class: check.inputs.state_class,
        optimizer: check.inputs.optimizer.clone(),
    };
    let mean = check.inputs.mean.unwrap_or(MeanKind::Arithmetic);
    let mu = check.inputs.mu.unwrap_or(0.5);
    Ok(check_inequality_with(&check.name, &inputs, mean, mu, check.tolerance, &opts)?.slack)
}

/// Random pure and mixed states plus the eigenvectors of `a*a` and `aa*`.
pub fn state_battery(a: &Matrix, seed: u64) -> Result<Vec<State<f64>>> {
    use crate::sampling::{derive_seed, rng_from_seed};
    use crate::states::{random_mixed, random_pure, PureState};
    let n = a.dim();
    let mut rng = rng_from_seed(derive_seed(seed, "states", 0));
    let mut out: Vec<State<f64>> = (0..4).map(|_| State::Pure(random_pure(&mut rng, n))).collect();
    out.push(State::Mixed(random_mixed(&mut rng, n, 1)?));
    out.push(State::Mixed(random_mixed(&mut rng, n, n)?));
    for h in [a.gram(), a.gram_adjoint()] {
        let e = hermitian_eigen(&h, HERMITIAN_TOL)?;
        for i in 0..n {
            out.push(State::Pure(PureState::from_vector(e.vector(i))?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generate::{generate, GeneratorKind};

    fn nilpotent() -> Matrix {
        Matrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap()
    }

    fn run(name: &str, inputs: &CheckInputs, mean: MeanKind, mu: f64) -> PropertyCheck {
        check_inequality(name, inputs, mean, mu, 1e-7).unwrap()
    }

    #[test]
    fn sandwich_on_nilpotent() {
        let c = run("sandwich", &CheckInputs::single(nilpotent()), MeanKind::Arithmetic, 0.5);
        assert_eq!(c.status, CheckStatus::Pass);
        // 1 ≤ √2 ≤ 2
        assert!((c.slack - (2f64.sqrt() - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn triangle_with_negation_is_tight_at_zero() {
        let a = generate(GeneratorKind::Ginibre, 3, 1).a;
        let c = run("triangle_nabla", &CheckInputs::pair(a.clone(), -&a), MeanKind::Arithmetic, 0.5);
        assert_eq!(c.status, CheckStatus::Pass);
        assert_eq!(c.values["seminorm_sum"], 0.0);
        assert!((c.slack - 2.0 * c.values["seminorm_a"]).abs() < 1e-12);
    }

    #[test]
    fn sqrt2_equality_case() {
        let c = run("sqrt2_nabla", &CheckInputs::single(nilpotent()), MeanKind::Arithmetic, 0.5);
        assert_eq!(c.status, CheckStatus::Pass);
        assert!(c.slack.abs() < 1e-9);
    }

    #[test]
    fn nilpotent_product_vanishes() {
        let c = run("nilpotent_sigma_zero", &CheckInputs::single(nilpotent()), MeanKind::Geometric, 0.5);
        assert_eq!(c.status, CheckStatus::Pass);
        assert!(c.values["seminorm"] <= 1e-10);
        let g = generate(GeneratorKind::Nilpotent2, 4, 3).a;
        let c = run("nilpotent_sigma_zero", &CheckInputs::single(g), MeanKind::Harmonic, 0.5);
        assert!(c.values["seminorm"] <= 1e-10, "{}", c.values["seminorm"]);
    }

    #[test]
    fn preconditions_and_unknown_names() {
        let a = generate(GeneratorKind::Ginibre, 3, 2).a;
        assert!(matches!(
            check_inequality("no_such_check", &CheckInputs::single(a.clone()), MeanKind::Arithmetic, 0.5, 1e-7),
            Err(Error::UnknownCheck(_))
        ));
        assert!(matches!(
            check_inequality("normal_collapse", &CheckInputs::single(a.clone()), MeanKind::Arithmetic, 0.5, 1e-7),
            Err(Error::Precondition { .. })
        ));
        let b = generate(GeneratorKind::Ginibre, 3, 3).a;
        let inputs = CheckInputs::pair(a.clone(), b).with_nu(0.5).with_states(state_battery(&a, 1).unwrap());
        assert!(matches!(
            check_inequality("lemma32_product", &inputs, MeanKind::Arithmetic, 0.5, 1e-7),
            Err(Error::Precondition { .. })
        ));
        assert!(matches!(
            check_inequality("mixed_schwarz", &CheckInputs::single(a), MeanKind::Arithmetic, 0.5, 1e-7),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn scaled_identity_breaks_the_literal_crawford_forms() {
        // ‖2I‖_∇ = 2, v = m = 2, m(a*a) = 4: 4 < 2·4 and 2 < 2·2.
        let a = Matrix::identity(2).scale_real(2.0);
        let proof = run("crawford_nabla_proof", &CheckInputs::single(a.clone()), MeanKind::Arithmetic, 0.5);
        assert_eq!(proof.status, CheckStatus::ReportOnly);
        assert!((proof.slack + 4.0).abs() < 1e-6);
        assert!(proof.counterexample.is_some() && proof.is_finding());
        let stated = run("crawford_nabla_stated", &CheckInputs::single(a.clone()), MeanKind::Arithmetic, 0.5);
        assert!((stated.slack + 2.0).abs() < 1e-6);
        let amgm = run("crawford_nabla_amgm", &CheckInputs::single(a), MeanKind::Arithmetic, 0.5);
        assert_eq!(amgm.status, CheckStatus::Pass);
    }

    #[test]
    fn scaled_identity_breaks_the_literal_product_lemma() {
        // a = I, b = 2I: |f(ab)|² = 4 but r(b) f(1) f(1) = 2.
        let a = Matrix::identity(2);
        let b = Matrix::identity(2).scale_real(2.0);
        let states = state_battery(&a, 0).unwrap();
        let inputs = CheckInputs::pair(a, b).with_nu(0.5).with_states(states);
        let stated = run("lemma32_product_stated", &inputs, MeanKind::Arithmetic, 0.5);
        assert!((stated.slack + 2.0).abs() < 1e-9);
        let corrected = run("lemma32_product", &inputs, MeanKind::Arithmetic, 0.5);
        assert_eq!(corrected.status, CheckStatus::Pass);
        assert!(corrected.slack.abs() < 1e-9);
    }

    #[test]
    fn counterexamples_reevaluate_to_the_same_slack() {
        let a = Matrix::identity(3).scale_real(1.5);
        let c = run("crawford_nabla_proof", &CheckInputs::single(a).with_seed(77), MeanKind::Arithmetic, 0.5);
        let text = serde_json::to_string(&c).unwrap();
        let back: PropertyCheck = serde_json::from_str(&text).unwrap();
        assert!((reevaluate(&back).unwrap() - c.slack).abs() <= 1e-9);
    }

    #[test]
    fn jensen_functions() {
        let h = generate(GeneratorKind::Hermitian, 3, 4).a;
        let p = generate(GeneratorKind::Psd, 3, 4).a;
        for f in JensenFunction::ALL {
            let m = if f.is_convex() { h.clone() } else { p.clone() };
            let states = state_battery(&m, 2).unwrap();
            let c = run("jensen_state", &CheckInputs::single(m).with_function(f).with_states(states), MeanKind::Arithmetic, 0.5);
            assert_eq!(c.status, CheckStatus::Pass, "{f:?}");
        }
    }

    #[test]
    fn names_are_unique() {
        let names = all_check_names();
        let set: std::collections::BTreeSet<_> = names.iter().collect();
        assert_eq!(set.len(), names.len());
    }
}
