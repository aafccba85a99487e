//! Randomized verification of the published inequalities.

pub mod checks;
pub mod classify;
mod equality;
pub mod generate;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checks::{
    all_check_names, check_inequality, check_inequality_with, check_spec, inputs_from_record, reevaluate, state_battery,
    CheckInputs, CheckMode, CheckSpec, CheckStatus, Counterexample, EvalOptions, Family, InputsDigest, JensenFunction,
    PropertyCheck, Variants, ALPHA_VALUES, CHECKS, EQUALITY_CHECK, NU_VALUES,
};
pub use classify::{alpha_beta, classify, is_p_hyponormal, AlphaBeta, StructureReport};
pub use generate::{generate, Generated, GeneratorKind};

use checks::{evaluate, Workbench};
use crate::engine::OptimizerConfig;
use crate::error::{Error, Result};
use crate::meanlib::MeanKind;
use crate::sampling::derive_seed;
use crate::states::StateClass;
use crate::Matrix;

pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub dims: Vec<usize>,
    /// Trials per instance family.
    pub trials: usize,
    pub seed: u64,
    pub means: Vec<MeanKind>,
    pub mus: Vec<f64>,
    pub relative_tolerance: f64,
    pub state_class: StateClass,
    /// Optimizer settings; the seed is replaced by one derived per trial.
    pub optimizer: OptimizerConfig,
    /// Restricts the run to these checks when present.
    pub checks: Option<Vec<String>>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            dims: vec![2, 3, 4],
            trials: 6,
            seed: 0,
            means: MeanKind::ALL.to_vec(),
            mus: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            relative_tolerance: DEFAULT_RELATIVE_TOLERANCE,
            state_class: StateClass::Mixed,
            optimizer: OptimizerConfig::default(),
            checks: None,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return Err(Error::Domain("dims must be non-empty and every dimension at least 2".into()));
        }
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.means.is_empty() {
            return Err(Error::Domain("at least one mean is required".into()));
        }
        if self.mus.is_empty() || self.mus.iter().any(|mu| !(0.0..=1.0).contains(mu)) {
            return Err(Error::Domain("mus must be non-empty and lie in [0, 1]".into()));
        }
        if !(self.relative_tolerance.is_finite() && self.relative_tolerance >= 0.0) {
            return Err(Error::Domain("relative_tolerance must be finite and non-negative".into()));
        }
        self.optimizer.validate()?;
        if let Some(names) = &self.checks {
            for name in names {
                check_spec(name)?;
            }
        }
        Ok(())
    }

    fn selected(&self) -> Vec<(usize, &'static CheckSpec)> {
        all_specs()
            .filter(|(_, s)| self.checks.as_ref().is_none_or(|names| names.iter().any(|n| n == s.name)))
            .collect()
    }
}

fn all_specs() -> impl Iterator<Item = (usize, &'static CheckSpec)> {
    CHECKS.iter().chain(std::iter::once(&EQUALITY_CHECK)).enumerate()
}

/// One parameter combination of a check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Variant {
    pub mean: MeanKind,
    pub mu: f64,
    pub nu: Option<f64>,
    pub alpha: Option<f64>,
    pub function: Option<JensenFunction>,
}

impl Variant {
    fn at(mean: MeanKind, mu: f64) -> Self {
        Variant {
            mean,
            mu,
            nu: None,
            alpha: None,
            function: None,
        }
    }
}

pub fn variants(spec: &CheckSpec, means: &[MeanKind], mus: &[f64]) -> Vec<Variant> {
    let half = |f: &dyn Fn(MeanKind) -> Vec<Variant>| means.iter().flat_map(|&m| f(m)).collect::<Vec<_>>();
    match spec.variants {
        Variants::MeansMus => means.iter().flat_map(|&m| mus.iter().map(move |&mu| Variant::at(m, mu))).collect(),
        Variants::MeansHalf => half(&|m| vec![Variant::at(m, 0.5)]),
        Variants::MeansHalfNu => half(&|m| NU_VALUES.iter().map(|&nu| Variant { nu: Some(nu), ..Variant::at(m, 0.5) }).collect()),
        Variants::MeansHalfAlpha => half(&|m| {
            ALPHA_VALUES
                .iter()
                .map(|&alpha| Variant {
                    alpha: Some(alpha),
                    ..Variant::at(m, 0.5)
                })
                .collect()
        }),
        Variants::Nu => NU_VALUES
            .iter()
            .map(|&nu| Variant {
                nu: Some(nu),
                ..Variant::at(MeanKind::Arithmetic, 0.5)
            })
            .collect(),
        Variants::Functions => JensenFunction::ALL
            .iter()
            .map(|&f| Variant {
                function: Some(f),
                ..Variant::at(MeanKind::Arithmetic, 0.5)
            })
            .collect(),
        Variants::Nabla => vec![Variant::at(MeanKind::Arithmetic, 0.5)],
    }
}

fn family_label(f: Family) -> &'static str {
    match f {
        Family::Ginibre => "ginibre",
        Family::Crawford => "crawford",
        Family::Normal => "normal",
        Family::Pair => "pair",
        Family::Lemma32 => "lemma32",
        Family::Nilpotent => "nilpotent",
        Family::Jensen => "jensen",
        Family::Equality => "equality",
    }
}

/// Random instance shared by every check of a family in one trial.
pub struct Instance {
    pub a: Matrix,
    pub b: Option<Matrix>,
    /// Positive semidefinite companion, used by concave Jensen functions.
    pub psd: Option<Matrix>,
    pub generator: String,
    pub trial_seed: u64,
}

pub fn instance(family: Family, dim: usize, suite_seed: u64, trial: usize) -> Instance {
    let seed = derive_seed(suite_seed, family_label(family), trial as u64);
    let one = |kind: GeneratorKind| generate(kind, dim, seed);
    let (a, b, psd, generator) = match family {
        Family::Ginibre => (one(GeneratorKind::Ginibre).a, None, None, "ginibre".to_string()),
        Family::Crawford => {
            let kind = if trial.is_multiple_of(2) { GeneratorKind::Ginibre } else { GeneratorKind::Shifted };
            (one(kind).a, None, None, kind.name().to_string())
        }
        Family::Normal => (one(GeneratorKind::Normal).a, None, None, "normal".to_string()),
        Family::Pair => {
            let b = generate(GeneratorKind::Ginibre, dim, derive_seed(seed, "b", 0)).a;
            (one(GeneratorKind::Ginibre).a, Some(b), None, "ginibre".to_string())
        }
        Family::Lemma32 => {
            let g = one(GeneratorKind::Lemma32Pair);
            (g.a, g.b, None, "lemma32_pair".to_string())
        }
        Family::Nilpotent => (one(GeneratorKind::Nilpotent2).a, None, None, "nilpotent2".to_string()),
        Family::Jensen => {
            let psd = generate(GeneratorKind::Psd, dim, derive_seed(seed, "psd", 0)).a;
            (one(GeneratorKind::Hermitian).a, None, Some(psd), "hermitian".to_string())
        }
        Family::Equality => {
            let a = one(GeneratorKind::Ginibre).a;
            let (b, label) = match trial % 3 {
                0 => (a.clone(), "ginibre/same"),
                1 => (-&a, "ginibre/negated"),
                _ => (generate(GeneratorKind::Ginibre, dim, derive_seed(seed, "b", 0)).a, "ginibre/independent"),
            };
            (a, Some(b), None, label.to_string())
        }
    };
    Instance {
        a,
        b,
        psd,
        generator,
        trial_seed: seed,
    }
}

fn inputs_for(spec: &CheckSpec, inst: &Instance, v: &Variant) -> Result<CheckInputs> {
    let uses_states = matches!(spec.variants, Variants::Nu | Variants::Functions);
    let a = match (v.function, &inst.psd) {
        (Some(f), Some(p)) if !f.is_convex() => p.clone(),
        _ => inst.a.clone(),
    };
    let states = if uses_states { state_battery(&a, inst.trial_seed)? } else { Vec::new() };
    Ok(CheckInputs {
        a,
        b: inst.b.clone(),
        states,
        nu: v.nu,
        alpha: v.alpha,
        function: v.function,
        trial_seed: inst.trial_seed,
        generator: Some(inst.generator.clone()),
    })
}

/// A check that could not run on an instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub name: String,
    pub trial_seed: u64,
    pub dim: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub paper_ref: String,
    pub mode: CheckMode,
    pub records: usize,
    pub pass: usize,
    pub fail: usize,
    pub report_only: usize,
    pub findings: usize,
    pub skipped: usize,
    pub worst_slack: Option<f64>,
    pub worst_relative_slack: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub records: usize,
    pub pass: usize,
    pub fail: usize,
    pub report_only: usize,
    pub findings: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRef {
    /// Index into `records`.
    pub record: usize,
    pub name: String,
    pub status: CheckStatus,
    pub slack: f64,
    pub trial_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: TrialConfig,
    pub records: Vec<PropertyCheck>,
    pub summary: Vec<CheckSummary>,
    pub totals: Totals,
    pub counterexamples: Vec<CounterexampleRef>,
    pub skipped: Vec<SkipRecord>,
}

impl SuiteReport {
    pub fn summary_for(&self, name: &str) -> Option<&CheckSummary> {
        self.summary.iter().find(|s| s.name == name)
    }

    pub fn assert_failures(&self) -> usize {
        self.totals.fail
    }

    pub fn records_for<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a PropertyCheck> + 'a {
        self.records.iter().filter(move |r| r.name == name)
    }
}

struct Keyed {
    check: usize,
    trial: usize,
    variant: usize,
    outcome: std::result::Result<PropertyCheck, SkipRecord>,
}

fn run_instance(cfg: &TrialConfig, family: Family, trial: usize, specs: &[(usize, &'static CheckSpec)]) -> Vec<Keyed> {
    let dim = cfg.dims[trial % cfg.dims.len()];
    let inst = instance(family, dim, cfg.seed, trial);
    let mut optimizer = cfg.optimizer.clone();
    optimizer.seed = derive_seed(inst.trial_seed, "optimizer", 0);
    let opts = EvalOptions {
        state_class: cfg.state_class,
        optimizer,
    };
    let bench = Workbench::new(&opts);
    let mut out = Vec::new();
    for &(ci, spec) in specs.iter().filter(|(_, s)| s.family == family) {
        for (vi, v) in variants(spec, &cfg.means, &cfg.mus).iter().enumerate() {
            let outcome = inputs_for(spec, &inst, v)
                .and_then(|inputs| evaluate(spec, &inputs, v.mean, v.mu, cfg.relative_tolerance, &bench))
                .map_err(|e| SkipRecord {
                    name: spec.name.to_string(),
                    trial_seed: inst.trial_seed,
                    dim,
                    reason: e.to_string(),
                });
            out.push(Keyed {
                check: ci,
                trial,
                variant: vi,
                outcome,
            });
        }
    }
    out
}

fn run_keyed(cfg: &TrialConfig, specs: &[(usize, &'static CheckSpec)]) -> Vec<Keyed> {
    let mut families: Vec<Family> = specs.iter().map(|(_, s)| s.family).collect();
    families.sort();
    families.dedup();
    let tasks: Vec<(Family, usize)> = families.iter().flat_map(|&f| (0..cfg.trials).map(move |t| (f, t))).collect();
    let mut keyed: Vec<Keyed> = tasks
        .into_par_iter()
        .map(|(f, t)| run_instance(cfg, f, t, specs))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    keyed.sort_by_key(|k| (k.check, k.trial, k.variant));
    keyed
}

fn min_opt(a: Option<f64>, b: f64) -> Option<f64> {
    Some(a.map_or(b, |x| x.min(b)))
}

/// Runs every selected check over `trials` random instances per family.
pub fn run_suite(cfg: &TrialConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let specs = cfg.selected();
    let keyed = run_keyed(cfg, &specs);
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    let mut summary: Vec<CheckSummary> = specs
        .iter()
        .map(|(_, s)| CheckSummary {
            name: s.name.to_string(),
            paper_ref: s.reference.to_string(),
            mode: s.mode,
            records: 0,
            pass: 0,
            fail: 0,
            report_only: 0,
            findings: 0,
            skipped: 0,
            worst_slack: None,
            worst_relative_slack: None,
        })
        .collect();
    let slot = |ci: usize| specs.iter().position(|(i, _)| *i == ci).expect("selected check");
    let mut totals = Totals::default();
    let mut counterexamples = Vec::new();
    for k in keyed {
        let sum = &mut summary[slot(k.check)];
        match k.outcome {
            Ok(rec) => {
                sum.records += 1;
                totals.records += 1;
                match rec.status {
                    CheckStatus::Pass => {
                        sum.pass += 1;
                        totals.pass += 1;
                    }
                    CheckStatus::Fail => {
                        sum.fail += 1;
                        totals.fail += 1;
                    }
                    CheckStatus::ReportOnly => {
                        sum.report_only += 1;
                        totals.report_only += 1;
                    }
                }
                if rec.is_finding() {
                    sum.findings += 1;
                    totals.findings += 1;
                }
                sum.worst_slack = min_opt(sum.worst_slack, rec.slack);
                sum.worst_relative_slack = min_opt(sum.worst_relative_slack, rec.slack / rec.scale);
                if rec.counterexample.is_some() {
                    counterexamples.push(CounterexampleRef {
                        record: records.len(),
                        name: rec.name.clone(),
                        status: rec.status,
                        slack: rec.slack,
                        trial_seed: rec.trial_seed,
                    });
                }
                records.push(rec);
            }
            Err(skip) => {
                sum.skipped += 1;
                totals.skipped += 1;
                skipped.push(skip);
            }
        }
    }
    Ok(SuiteReport {
        config: cfg.clone(),
        records,
        summary,
        totals,
        counterexamples,
        skipped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub property: String,
    /// Restricts mean-dependent variants to one mean.
    pub mean: Option<MeanKind>,
    pub mus: Vec<f64>,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub relative_tolerance: f64,
    pub state_class: StateClass,
    pub optimizer: OptimizerConfig,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            property: "triangle_path".into(),
            mean: None,
            mus: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            dims: vec![2, 3, 4],
            trials: 20,
            seed: 0,
            relative_tolerance: DEFAULT_RELATIVE_TOLERANCE,
            state_class: StateClass::Mixed,
            optimizer: OptimizerConfig::default(),
        }
    }
}

/// Short names accepted for fuzzing.
pub fn resolve_property(name: &str) -> Result<&'static CheckSpec> {
    let canonical = match name {
        "triangle" => "triangle_path",
        other => other,
    };
    check_spec(canonical)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub property: String,
    pub paper_ref: String,
    pub config: FuzzConfig,
    pub evaluated: usize,
    pub skipped: usize,
    pub worst_slack: Option<f64>,
    pub worst_relative_slack: Option<f64>,
    /// Every trial whose slack is beyond the tolerance, with its payload.
    pub findings: Vec<PropertyCheck>,
}

/// Searches for violations of one property. Nothing here is asserted; every
/// violation is reported as a finding.
pub fn run_fuzz(cfg: &FuzzConfig) -> Result<FuzzReport> {
    let spec = resolve_property(&cfg.property)?;
    let means = cfg.mean.map_or_else(|| MeanKind::ALL.to_vec(), |m| vec![m]);
    let trial_cfg = TrialConfig {
        dims: cfg.dims.clone(),
        trials: cfg.trials,
        seed: cfg.seed,
        means,
        mus: cfg.mus.clone(),
        relative_tolerance: cfg.relative_tolerance,
        state_class: cfg.state_class,
        optimizer: cfg.optimizer.clone(),
        checks: Some(vec![spec.name.to_string()]),
    };
    trial_cfg.validate()?;
    let (mut evaluated, mut skipped) = (0, 0);
    let (mut worst, mut worst_rel) = (None, None);
    let mut findings = Vec::new();
    for k in run_keyed(&trial_cfg, &trial_cfg.selected()) {
        match k.outcome {
            Ok(mut rec) => {
                evaluated += 1;
                worst = min_opt(worst, rec.slack);
                worst_rel = min_opt(worst_rel, rec.slack / rec.scale);
                if !rec.holds() {
                    rec.status = CheckStatus::ReportOnly;
                    findings.push(rec);
                }
            }
            Err(_) => skipped += 1,
        }
    }
    Ok(FuzzReport {
        property: spec.name.to_string(),
        paper_ref: spec.reference.to_string(),
        config: cfg.clone(),
        evaluated,
        skipped,
        worst_slack: worst,
        worst_relative_slack: worst_rel,
        findings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(checks: &[&str]) -> TrialConfig {
        TrialConfig {
            dims: vec![2, 3],
            trials: 2,
            seed: 5,
            mus: vec![0.0, 0.5, 1.0],
            checks: Some(checks.iter().map(|s| s.to_string()).collect()),
            ..TrialConfig::default()
        }
    }

    #[test]
    fn suite_is_deterministic_and_green_on_asserted_checks() {
        let cfg = small(&["sandwich", "envelope", "mixed_schwarz", "sqrt2_nabla", "jensen_state"]);
        let r1 = run_suite(&cfg).unwrap();
        let r2 = run_suite(&cfg).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.assert_failures(), 0, "{:?}", r1.summary);
        assert_eq!(r1.summary_for("sandwich").unwrap().records, 2 * 3 * 3);
        assert_eq!(r1.summary_for("jensen_state").unwrap().records, 2 * 3);
    }

    #[test]
    fn one_trial_gives_one_instance_per_variant() {
        let cfg = TrialConfig {
            dims: vec![2],
            trials: 1,
            mus: vec![0.5, 1.0],
            ..TrialConfig::default()
        };
        let r = run_suite(&cfg).unwrap();
        for (_, spec) in all_specs() {
            let s = r.summary_for(spec.name).unwrap();
            assert_eq!(s.records + s.skipped, variants(spec, &cfg.means, &cfg.mus).len(), "{}", spec.name);
        }
        assert_eq!(r.summary.len(), CHECKS.len() + 1);
    }

    #[test]
    fn unknown_checks_and_bad_configs_are_rejected() {
        assert!(matches!(run_suite(&small(&["bogus"])), Err(Error::UnknownCheck(_))));
        let cfg = TrialConfig {
            dims: vec![1],
            ..TrialConfig::default()
        };
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn preconditions_are_skips_not_failures() {
        // Ginibre instances are not hyponormal, but normal ones are.
        let r = run_suite(&small(&["hypo_adjoint", "normal_collapse"])).unwrap();
        assert_eq!(r.totals.fail, 0);
        assert!(r.totals.pass > 0);
    }

    #[test]
    fn fuzz_alias_and_scaled_identity_findings() {
        assert_eq!(resolve_property("triangle").unwrap().name, "triangle_path");
        let cfg = FuzzConfig {
            property: "crawford_nabla_proof".into(),
            trials: 4,
            dims: vec![2],
            ..FuzzConfig::default()
        };
        let r = run_fuzz(&cfg).unwrap();
        assert_eq!(r.evaluated, 4);
        assert!(r.findings.iter().all(|f| f.counterexample.is_some() && f.status == CheckStatus::ReportOnly));
    }
}
