//! Command-line front end: `compute`, `sweep`, `verify`, `fuzz`, `oracle`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::engine::{crawford, mu_sweep, oracle_2x2, OptimizerConfig, SeminormContext, ORACLE_GRID};
use crate::error::{Error, Result};
use crate::harness::{run_fuzz, run_suite, CheckStatus, FuzzConfig, TrialConfig};
use crate::linalg::spectral_radius;
use crate::meanlib::MeanKind;
use crate::report::{serialize_report, Report, Timing};
use crate::states::StateClass;
use crate::Matrix;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "seminorm", version, about = "Mean-interpolated semi-norms of complex matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Include wall-clock timing in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Semi-norm of one matrix, with v(A), ‖A‖, m(A) and r(A).
    Compute {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        mean: MeanKind,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value = "mixed")]
        states: StateClass,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Semi-norm at `steps + 1` evenly spaced values of μ.
    Sweep {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        mean: MeanKind,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value = "mixed")]
        states: StateClass,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the verification suite.
    Verify {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 6)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        checks: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        means: Option<Vec<MeanKind>>,
        #[arg(long, value_delimiter = ',')]
        mus: Option<Vec<f64>>,
        #[arg(long, default_value = "mixed")]
        states: StateClass,
        #[command(flatten)]
        common: Common,
    },
    /// Searches for violations of one property; never fails.
    Fuzz {
        #[arg(long)]
        property: String,
        #[arg(long)]
        mean: Option<MeanKind>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        mus: Option<Vec<f64>>,
        #[arg(long, default_value = "mixed")]
        states: StateClass,
        #[command(flatten)]
        common: Common,
    },
    /// Brute-force value for a 2×2 matrix.
    Oracle {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        mean: MeanKind,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = ORACLE_GRID)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Exit code plus what goes to standard output and standard error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn usage(msg: String) -> Self {
        CommandOutput {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        field: "matrix".into(),
        reason: format!("cannot read {}: {e}", path.display()),
    })?;
    Matrix::from_json_str(&text)
}

fn to_value<S: serde::Serialize>(x: &S) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Parse {
        field: "results".into(),
        reason: e.to_string(),
    })
}

fn default_mus(mus: Option<Vec<f64>>) -> Vec<f64> {
    mus.unwrap_or_else(|| TrialConfig::default().mus)
}

struct Outcome {
    results: Value,
    findings: Vec<Value>,
    failed: bool,
    timing: bool,
}

fn execute(cmd: Command) -> Result<Outcome> {
    let ok = |results, timing| Outcome {
        results,
        findings: Vec::new(),
        failed: false,
        timing,
    };
    match cmd {
        Command::Compute {
            matrix,
            mean,
            mu,
            states,
            seed,
            common,
        } => {
            let a = read_matrix(&matrix)?;
            let ctx = SeminormContext::new(&a)?;
            let r = ctx.seminorm(mean, mu, states, &OptimizerConfig::with_seed(seed))?;
            Ok(ok(
                json!({
                    "mean": mean,
                    "mu": mu,
                    "states": states,
                    "seed": seed,
                    "value": r.value,
                    "converged": r.converged,
                    "starts_agreeing": r.starts_agreeing,
                    "iterations_total": r.iterations_total,
                    "witness": r.witness.to_json_value(),
                    "numerical_radius": ctx.numerical_radius(),
                    "operator_norm": ctx.operator_norm(),
                    "crawford": crawford(&a),
                    "spectral_radius": spectral_radius(&a),
                }),
                common.timing,
            ))
        }
        Command::Sweep {
            matrix,
            mean,
            steps,
            states,
            seed,
            common,
        } => {
            if steps == 0 {
                return Err(Error::Parse {
                    field: "steps".into(),
                    reason: "must be at least 1".into(),
                });
            }
            let a = read_matrix(&matrix)?;
            let mus: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
            let sweep = mu_sweep(&a, mean, &mus, states, &OptimizerConfig::with_seed(seed))?;
            let mut results = to_value(&sweep)?;
            results["mean"] = json!(mean);
            results["states"] = json!(states);
            results["seed"] = json!(seed);
            Ok(ok(results, common.timing))
        }
        Command::Verify {
            dims,
            trials,
            seed,
            checks,
            means,
            mus,
            states,
            common,
        } => {
            let cfg = TrialConfig {
                dims,
                trials,
                seed,
                means: means.unwrap_or_else(|| MeanKind::ALL.to_vec()),
                mus: default_mus(mus),
                state_class: states,
                checks,
                ..TrialConfig::default()
            };
            let report = run_suite(&cfg)?;
            let findings = report
                .counterexamples
                .iter()
                .filter(|c| c.status == CheckStatus::ReportOnly && report.records[c.record].is_finding())
                .map(to_value)
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome {
                failed: report.assert_failures() > 0,
                results: to_value(&report)?,
                findings,
                timing: common.timing,
            })
        }
        Command::Fuzz {
            property,
            mean,
            trials,
            seed,
            dims,
            mus,
            states,
            common,
        } => {
            let cfg = FuzzConfig {
                property,
                mean,
                mus: default_mus(mus),
                dims,
                trials,
                seed,
                state_class: states,
                ..FuzzConfig::default()
            };
            let mut report = run_fuzz(&cfg)?;
            let findings = std::mem::take(&mut report.findings)
                .iter()
                .map(to_value)
                .collect::<Result<Vec<_>>>()?;
            let mut results = to_value(&report)?;
            if let Value::Object(map) = &mut results {
                map.remove("findings");
            }
            Ok(Outcome {
                results,
                findings,
                failed: false,
                timing: common.timing,
            })
        }
        Command::Oracle {
            matrix,
            mean,
            mu,
            grid,
            common,
        } => {
            let a = read_matrix(&matrix)?;
            let value = oracle_2x2(&a, mean, mu, grid)?;
            Ok(ok(
                json!({"mean": mean, "mu": mu, "grid": grid, "value": value}),
                common.timing,
            ))
        }
    }
}

/// Parses `argv` (program name first), runs the verb and renders the report.
pub fn run_command<I, S>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                return CommandOutput::usage(text);
            }
            return CommandOutput {
                code: EXIT_OK,
                stdout: text,
                stderr: String::new(),
            };
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect();
    let start = Instant::now();
    let outcome = match execute(cli.command) {
        Ok(o) => o,
        Err(e) => return CommandOutput::usage(format!("error: {e}\n")),
    };
    let mut report = Report::new(echo, outcome.results);
    report.findings = outcome.findings;
    if outcome.timing {
        report.timing = Some(Timing {
            elapsed_seconds: start.elapsed().as_secs_f64(),
        });
    }
    match serialize_report(&report) {
        Ok(stdout) => CommandOutput {
            code: if outcome.failed { EXIT_ASSERT_FAILURE } else { EXIT_OK },
            stdout,
            stderr: if outcome.failed {
                "assert-mode property failure; counterexamples are in the report\n".into()
            } else {
                String::new()
            },
        },
        Err(e) => CommandOutput::usage(format!("error: {e}\n")),
    }
}

/// Applies `SEMINORM_THREADS` to the global thread pool.
pub fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("SEMINORM_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("invalid SEMINORM_THREADS `{raw}`: expected a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot configure thread pool: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    }

    const NILPOTENT: &str = r#"{"n": 2, "entries": [[0,0],[2,0],[0,0],[0,0]]}"#;

    #[test]
    fn compute_nilpotent() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(&dir, "a.json", NILPOTENT);
        let out = run_command(["seminorm", "compute", "--matrix", &f, "--mean", "arithmetic", "--mu", "0.5"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert!((v["results"]["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-6);
        assert_eq!(v["findings"], json!([]));
        assert_eq!(v["timing"], Value::Null);
    }

    #[test]
    fn usage_and_input_errors_exit_2() {
        let dir = tempfile::tempdir().unwrap();
        let bad = write(&dir, "bad.json", r#"{"n": 2, "entries": [[0,0],[2,0],[0,0]]}"#);
        let out = run_command(["seminorm", "compute", "--matrix", &bad, "--mean", "arithmetic", "--mu", "0.5"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("entries"), "{}", out.stderr);
        let out = run_command(["seminorm", "compute", "--mean", "arithmetic"]);
        assert_eq!(out.code, 2);
        let f = write(&dir, "a.json", NILPOTENT);
        let out = run_command(["seminorm", "compute", "--matrix", &f, "--mean", "quadratic", "--mu", "0.5"]);
        assert_eq!(out.code, 2);
        let out = run_command(["seminorm", "compute", "--matrix", &f, "--mean", "arithmetic", "--mu", "1.5"]);
        assert_eq!(out.code, 2);
        let out = run_command(["seminorm", "verify", "--checks", "nope"]);
        assert_eq!(out.code, 2);
    }

    #[test]
    fn sweep_emits_steps_plus_one_points() {
        let dir = tempfile::tempdir().unwrap();
        let f = write(&dir, "a.json", NILPOTENT);
        let out = run_command(["seminorm", "sweep", "--matrix", &f, "--mean", "geometric", "--steps", "4"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["results"]["points"].as_array().unwrap().len(), 5);
    }
}
