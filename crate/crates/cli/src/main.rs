//! Command-line front door: load problems, run the solvers and approximation
//! schedules, emit machine-readable reports, run the verification suite.
//!
//! Reports are JSON on stdout with every float rounded to 12 significant
//! digits; `--pretty` switches to human-readable tables. Exit codes: 0
//! success, 1 verification failure, 2 input error, 3 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use minimax_core::catalog::{bernoulli_family, clamp_family};
use minimax_core::discretize::{lf_prior_sequence, DiscretizeError};
use minimax_core::game::{fictitious_play, solve_report, GameError};
use minimax_core::lp::LpError;
use minimax_core::model::{FiniteDecisionProblem, ModelError, ProblemSpec};
use minimax_core::suite::{run_all, Injection};
use minimax_core::transport::{line_metric, w1_1d, wk_discrete, DiscreteMeasure, MeasureSpec};
use minimax_core::MetricFamily;

#[derive(Parser)]
#[command(
    name = "minimax",
    about = "Minimax values, procedures and least favorable priors for statistical decision problems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Human-readable tables instead of JSON
    #[arg(long, global = true)]
    pretty: bool,
    /// Suppress timestamp and timing fields so identical invocations
    /// produce byte-identical reports
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a finite decision problem exactly
    Solve {
        /// Problem JSON file
        #[arg(long)]
        input: PathBuf,
        /// Saddle certificate tolerance
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Discretize a built-in family along a mesh schedule and solve each net
    Approximate {
        /// Family name: location[:lo,hi], bernoulli, clamp[:lo,hi]
        #[arg(long)]
        family: String,
        /// Comma-separated strictly decreasing mesh list
        #[arg(long)]
        mesh: String,
    },
    /// k-Wasserstein distance between two measure files
    Wasserstein {
        /// First measure JSON file
        mu: PathBuf,
        /// Second measure JSON file
        nu: PathBuf,
        /// Lipschitz constant
        #[arg(long, default_value_t = 1.0)]
        k: f64,
    },
    /// Bracket the game value by fictitious play
    Fp {
        /// Problem JSON file
        #[arg(long)]
        input: PathBuf,
        /// Number of best-response iterations
        #[arg(long)]
        iters: u64,
    },
    /// Run the verification suite
    Verify {
        /// Only run checks whose name contains this string
        #[arg(long)]
        filter: Option<String>,
        /// Self-test hook: perturb a fixture so the suite must fail
        #[arg(long, hide = true)]
        inject_loss_perturbation: bool,
    },
}

enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::Internal(_) | GameError::Lp(LpError::IterationLimit(_)) => {
                CliError::Internal(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<DiscretizeError> for CliError {
    fn from(e: DiscretizeError) -> Self {
        match e {
            DiscretizeError::Game(g) => g.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

/// Rounds to 12 significant digits; reports print the rounded values so
/// certificates are reproducible across platforms.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(0.0);
                if let Some(rounded) = serde_json::Number::from_f64(sig12(x)) {
                    *n = rounded;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn emit(cli: &Cli, mut report: Value) {
    round_floats(&mut report);
    if !cli.deterministic {
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        if let Value::Object(map) = &mut report {
            map.insert("timestamp".into(), json!(ts));
        }
    }
    println!("{report}");
}

fn fmt(x: f64) -> String {
    format!("{}", sig12(x))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{} is not valid JSON: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<FiniteDecisionProblem, CliError> {
    let value = read_json(path)?;
    let spec: ProblemSpec = serde_json::from_value(value).map_err(|e| {
        CliError::Input(format!("{} is not a problem document: {e}", path.display()))
    })?;
    FiniteDecisionProblem::from_spec(&spec)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_measure(path: &Path) -> Result<DiscreteMeasure, CliError> {
    let value = read_json(path)?;
    let spec: MeasureSpec = serde_json::from_value(value).map_err(|e| {
        CliError::Input(format!("{} is not a measure document: {e}", path.display()))
    })?;
    DiscreteMeasure::from_spec(spec)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_family(name: &str) -> Result<MetricFamily, CliError> {
    let (head, params) = match name.split_once(':') {
        Some((h, p)) => (h, Some(p)),
        None => (name, None),
    };
    let interval = |params: Option<&str>, default: (f64, f64)| -> Result<(f64, f64), CliError> {
        match params {
            None => Ok(default),
            Some(p) => {
                let parts: Vec<&str> = p.split(',').collect();
                if parts.len() != 2 {
                    return Err(CliError::Input(format!(
                        "family parameters must be lo,hi — got '{p}'"
                    )));
                }
                let lo = parts[0]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Input(format!("bad interval endpoint: {e}")))?;
                let hi = parts[1]
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Input(format!("bad interval endpoint: {e}")))?;
                Ok((lo, hi))
            }
        }
    };
    match head {
        "location" => {
            let (lo, hi) = interval(params, (0.0, 1.0))?;
            let domain = minimax_core::Interval::new(lo, hi)
                .map_err(|e| CliError::Input(e.to_string()))?;
            Ok(MetricFamily::location(domain))
        }
        "bernoulli" => {
            if params.is_some() {
                return Err(CliError::Input(
                    "the bernoulli family takes no parameters".into(),
                ));
            }
            Ok(bernoulli_family())
        }
        "clamp" => {
            let (lo, hi) = interval(params, (0.0, 5.0))?;
            clamp_family(lo, hi).map_err(|e| CliError::Input(e.to_string()))
        }
        other => Err(CliError::Input(format!(
            "unknown family '{other}'; available: location[:lo,hi], bernoulli, clamp[:lo,hi]"
        ))),
    }
}

fn parse_mesh(list: &str) -> Result<Vec<f64>, CliError> {
    let items: Vec<&str> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if items.is_empty() {
        return Err(CliError::Input("empty mesh schedule".into()));
    }
    items
        .into_iter()
        .map(|s| {
            s.parse::<f64>()
                .map_err(|e| CliError::Input(format!("bad mesh entry '{s}': {e}")))
        })
        .collect()
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Solve { input, tol } => cmd_solve(cli, input, *tol),
        Command::Approximate { family, mesh } => cmd_approximate(cli, family, mesh),
        Command::Wasserstein { mu, nu, k } => cmd_wasserstein(cli, mu, nu, *k),
        Command::Fp { input, iters } => cmd_fp(cli, input, *iters),
        Command::Verify {
            filter,
            inject_loss_perturbation,
        } => cmd_verify(cli, filter.as_deref(), *inject_loss_perturbation),
    }
}

fn cmd_solve(cli: &Cli, input: &Path, tol: f64) -> Result<u8, CliError> {
    let problem = load_problem(input)?;
    let (_, report) = solve_report(&problem, tol)?;
    if cli.pretty {
        println!("value      {}", fmt(report.value));
        println!("gap        {}", fmt(report.gap));
        println!("certified  {}", report.certified);
        println!("prior      [{}]", join(&report.prior));
        println!("procedure (rows = observations)");
        for row in &report.procedure {
            println!("  [{}]", join(row));
        }
    } else {
        emit(cli, serde_json::to_value(&report).unwrap_or_default());
    }
    Ok(0)
}

fn cmd_approximate(cli: &Cli, family: &str, mesh: &str) -> Result<u8, CliError> {
    let fam = parse_family(family)?;
    let schedule = parse_mesh(mesh)?;
    let results = lf_prior_sequence(&fam, &schedule)?;

    if cli.pretty {
        println!(
            "{} on [{}, {}], k = {}",
            fam.family_id(),
            fmt(fam.theta_interval().lo),
            fmt(fam.theta_interval().hi),
            fmt(fam.lipschitz_k())
        );
        println!("{:>12} {:>16} {:>36} {:>16}", "mesh", "value", "interval", "maximin");
        for r in &results {
            println!(
                "{:>12} {:>16} [{:>16}, {:>16}] {:>16}",
                fmt(r.mesh),
                fmt(r.discrete_value),
                fmt(r.value_interval.0),
                fmt(r.value_interval.1),
                fmt(r.prior_maximin)
            );
        }
    } else {
        let rows: Vec<Value> = results
            .iter()
            .map(|r| {
                let support: Vec<f64> = r
                    .net
                    .iter()
                    .zip(r.prior.weights())
                    .filter(|(_, &w)| w > 1e-12)
                    .map(|(&p, _)| p)
                    .collect();
                let weights: Vec<f64> = r
                    .prior
                    .weights()
                    .iter()
                    .copied()
                    .filter(|&w| w > 1e-12)
                    .collect();
                json!({
                    "mesh": r.mesh,
                    "value": r.discrete_value,
                    "interval": [r.value_interval.0, r.value_interval.1],
                    "maximin": r.prior_maximin,
                    "prior_support": support,
                    "prior_weights": weights,
                })
            })
            .collect();
        emit(
            cli,
            json!({
                "family": fam.family_id(),
                "lipschitz_k": fam.lipschitz_k(),
                "results": rows,
            }),
        );
    }
    Ok(0)
}

fn cmd_wasserstein(cli: &Cli, mu: &Path, nu: &Path, k: f64) -> Result<u8, CliError> {
    let mu = load_measure(mu)?;
    let nu = load_measure(nu)?;
    let wk = wk_discrete(&mu, &nu, &line_metric, k)
        .map_err(|e| CliError::Input(e.to_string()))?;

    let oracle = if k == 1.0 { Some(w1_1d(&mu, &nu)) } else { None };
    if cli.pretty {
        println!("wk({k})     {}", fmt(wk));
        if let Some(o) = oracle {
            println!("1d oracle  {}", fmt(o));
            println!("agreement  {}", fmt((wk - o).abs()));
        }
    } else {
        let mut report = json!({ "k": k, "wk": wk });
        if let Some(o) = oracle {
            report["w1_oracle"] = json!(o);
            report["agreement"] = json!((wk - o).abs());
        }
        emit(cli, report);
    }
    Ok(0)
}

fn cmd_fp(cli: &Cli, input: &Path, iters: u64) -> Result<u8, CliError> {
    let problem = load_problem(input)?;
    let fp = fictitious_play(&problem, iters)?;
    if cli.pretty {
        println!("lower   {}", fmt(fp.lower_bound));
        println!("upper   {}", fmt(fp.upper_bound));
        println!("width   {}", fmt(fp.upper_bound - fp.lower_bound));
        println!("prior   [{}]", join(fp.empirical_prior.weights()));
        println!("procedure (rows = observations)");
        for row in fp.empirical_procedure.matrix().to_nested() {
            println!("  [{}]", join(&row));
        }
    } else {
        emit(
            cli,
            json!({
                "iterations": iters,
                "lower_bound": fp.lower_bound,
                "upper_bound": fp.upper_bound,
                "width": fp.upper_bound - fp.lower_bound,
                "empirical_prior": fp.empirical_prior.weights(),
                "empirical_procedure": fp.empirical_procedure.matrix().to_nested(),
            }),
        );
    }
    Ok(0)
}

fn cmd_verify(cli: &Cli, filter: Option<&str>, inject: bool) -> Result<u8, CliError> {
    let injection = if inject {
        Injection::LossPerturbation
    } else {
        Injection::None
    };
    let report = run_all(filter, injection);
    if report.checks.is_empty() {
        return Err(CliError::Input(format!(
            "filter '{}' matched no checks; available: {}",
            filter.unwrap_or(""),
            minimax_core::suite::CHECK_NAMES.join(", ")
        )));
    }

    if cli.pretty {
        for c in &report.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            if cli.deterministic {
                println!("[{status}] {}: {}", c.name, c.details);
            } else {
                println!("[{status}] {}: {} ({:.2}s)", c.name, c.details, c.seconds);
            }
        }
        println!("{}", if report.pass() { "all checks passed" } else { "FAILED" });
    } else {
        let checks: Vec<Value> = report
            .checks
            .iter()
            .map(|c| {
                let mut v = json!({
                    "name": c.name,
                    "pass": c.pass,
                    "details": c.details,
                });
                if !cli.deterministic {
                    v["seconds"] = json!(c.seconds);
                }
                v
            })
            .collect();
        emit(cli, json!({ "pass": report.pass(), "checks": checks }));
    }
    Ok(if report.pass() { 0 } else { 1 })
}

fn join(values: &[f64]) -> String {
    values.iter().map(|&v| fmt(v)).collect::<Vec<_>>().join(", ")
}
