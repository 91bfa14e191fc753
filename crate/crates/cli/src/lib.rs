//! `cocycle-lab`: JSON in, report out.
//!
//! Exit status: 0 success, 1 usage/IO/parse error, 2 the checked claim fails.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cocycle_core::gauge::{LevelScanReport, PureGauge};
use cocycle_core::generator::{classify, ClassificationReport, Generator};
use cocycle_core::numkit::{ComplexMatrix, DEFAULT_TOL};
use cocycle_core::polar::{certify, polar_decompose, PolarPair};
use cocycle_core::powerflow::power_generator;
use cocycle_core::semigroups::{matrix_element, Order, StepFunction};
use cocycle_core::verify::{verify, VerifyReport};
use cocycle_core::Error;
use serde::{Deserialize, Serialize};

pub const TOL_ENV: &str = "COCYCLE_LAB_TOL";

#[derive(Debug, Parser)]
#[command(name = "cocycle-lab", version, about = "Generators of quantum stochastic cocycles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    Json,
    #[default]
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OrderArg {
    #[default]
    Left,
    Right,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Left => Order::Left,
            OrderArg::Right => Order::Right,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Tol {
    /// Relative tolerance (default 1e-9, or $COCYCLE_LAB_TOL).
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the cocycle generated by a generator.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        tol: Tol,
        #[command(flatten)]
        common: Common,
    },
    /// Power transform F ↦ F_α of a positive contraction generator.
    Power {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        tol: Tol,
        #[command(flatten)]
        common: Common,
    },
    /// Polar decomposition F = E + G + EΔG.
    Polar {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        tol: Tol,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        rank_tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Matrix element between exponential vectors of step functions.
    Matelem {
        /// JSON object {"generator", "f", "g"}.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderArg::Left)]
        order: OrderArg,
        #[command(flatten)]
        common: Common,
    },
    /// Levelwise partial-isometry scan of the gauge block D.
    Gauge {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[command(flatten)]
        tol: Tol,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded invariant suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[command(flatten)]
        tol: Tol,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    #[default]
    Classify,
    Power,
    Polar,
    Matelem,
    Gauge,
    Verify,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub tol: f64,
    pub rank_tol: f64,
    pub alpha: f64,
    pub order: Order,
    pub n_max: usize,
    pub seed: u64,
    pub trials: u64,
    pub format: Format,
}

/// Default tolerance, overridden by `$COCYCLE_LAB_TOL`.
pub fn default_tol(env: Option<&str>) -> Result<f64, String> {
    match env {
        None => Ok(DEFAULT_TOL),
        Some(raw) => match raw.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(format!("{TOL_ENV}={raw:?} is not a positive number")),
        },
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli, env_tol: Option<&str>) -> Result<Self, String> {
        let base = default_tol(env_tol)?;
        let resolve = |t: Tol| -> Result<f64, String> {
            match t.tol {
                Some(v) if !(v.is_finite() && v > 0.0) => Err(format!("--tol must be positive, got {v}")),
                Some(v) => Ok(v),
                None => Ok(base),
            }
        };
        let mut cfg = RunConfig {
            command: CommandKind::Classify,
            input_path: None,
            output_path: None,
            tol: base,
            rank_tol: DEFAULT_TOL,
            alpha: 1.0,
            order: Order::Left,
            n_max: 4,
            seed: 0,
            trials: 100,
            format: Format::Text,
        };
        let common = match cli.command {
            Command::Classify { input, tol, common } => {
                cfg.input_path = Some(input);
                cfg.tol = resolve(tol)?;
                common
            }
            Command::Power { input, alpha, tol, common } => {
                cfg.command = CommandKind::Power;
                cfg.input_path = Some(input);
                cfg.alpha = alpha;
                cfg.tol = resolve(tol)?;
                common
            }
            Command::Polar { input, tol, rank_tol, common } => {
                cfg.command = CommandKind::Polar;
                cfg.input_path = Some(input);
                cfg.tol = resolve(tol)?;
                cfg.rank_tol = rank_tol;
                common
            }
            Command::Matelem { input, order, common } => {
                cfg.command = CommandKind::Matelem;
                cfg.input_path = Some(input);
                cfg.order = order.into();
                common
            }
            Command::Gauge { input, n_max, tol, common } => {
                cfg.command = CommandKind::Gauge;
                cfg.input_path = Some(input);
                cfg.n_max = n_max;
                cfg.tol = resolve(tol)?;
                common
            }
            Command::Verify { seed, trials, tol, common } => {
                cfg.command = CommandKind::Verify;
                cfg.seed = seed;
                cfg.trials = trials;
                cfg.tol = resolve(tol)?;
                common
            }
        };
        cfg.output_path = common.output;
        cfg.format = common.format;
        Ok(cfg)
    }
}

/// Result of a run: exit status and the report (or a one-line diagnostic).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: i32,
    pub report: String,
}

impl Outcome {
    fn usage(message: impl Into<String>) -> Self {
        Self { status: 1, report: single_line(&message.into()) }
    }
}

fn single_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Library errors that mean "the input is not of the claimed kind" rather than malformed.
fn is_claim_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::NotPositiveGenerator(_)
            | Error::NotPositiveContractionGenerator(_)
            | Error::SpectrumOutOfRange { .. }
            | Error::NotContraction { .. }
            | Error::NotCommutative(_)
            | Error::WrongNoiseDim { .. }
    )
}

fn failure(e: Error) -> Outcome {
    let status = if is_claim_failure(&e) { 2 } else { 1 };
    Outcome { status, report: single_line(&format!("error: {e}")) }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Outcome::usage(format!("error: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Outcome::usage(format!("error: cannot parse {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Debug, Deserialize)]
struct MatelemInput {
    generator: Generator,
    f: StepFunction,
    g: StepFunction,
}

#[derive(Debug, Serialize)]
struct MatelemReport {
    order: Order,
    horizon: f64,
    matrix: ComplexMatrix,
}

#[derive(Debug, Serialize)]
struct PowerReport {
    alpha: f64,
    generator: Generator,
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match execute(cfg) {
        Ok(outcome) | Err(outcome) => outcome,
    }
}

fn input(cfg: &RunConfig) -> Result<&Path, Outcome> {
    cfg.input_path.as_deref().ok_or_else(|| Outcome::usage("error: --input is required"))
}

fn execute(cfg: &RunConfig) -> Result<Outcome, Outcome> {
    let json = cfg.format == Format::Json;
    Ok(match cfg.command {
        CommandKind::Classify => {
            let f: Generator = read_json(input(cfg)?)?;
            let report = classify(&f, cfg.tol).map_err(failure)?;
            let any = report.entries().iter().any(|(_, v)| v.verdict);
            let text = if json { to_json(&report) } else { classify_text(&report) };
            Outcome { status: if any { 0 } else { 2 }, report: text }
        }
        CommandKind::Power => {
            let f: Generator = read_json(input(cfg)?)?;
            let g = power_generator(&f, cfg.alpha, cfg.tol).map_err(failure)?;
            let report = PowerReport { alpha: cfg.alpha, generator: g };
            let text = if json {
                to_json(&report)
            } else {
                let mut s = format!("F_alpha for alpha = {}\n", cfg.alpha);
                s.push_str(&generator_text(&report.generator));
                s
            };
            Outcome { status: 0, report: text }
        }
        CommandKind::Polar => {
            let f: Generator = read_json(input(cfg)?)?;
            let pair = polar_decompose(&f, None, cfg.tol, cfg.rank_tol).map_err(failure)?;
            let ok = certify(&pair, &f, cfg.tol).map_err(failure)?;
            let text = if json { to_json(&pair) } else { polar_text(&pair, cfg.tol * f.scale()) };
            Outcome { status: if ok { 0 } else { 2 }, report: text }
        }
        CommandKind::Matelem => {
            let inp: MatelemInput = read_json(input(cfg)?)?;
            let m = matrix_element(&inp.generator, &inp.f, &inp.g, cfg.order).map_err(failure)?;
            let report = MatelemReport { order: cfg.order, horizon: inp.f.horizon(), matrix: m };
            let text = if json {
                to_json(&report)
            } else {
                let order = match cfg.order {
                    Order::Left => "left",
                    Order::Right => "right",
                };
                format!("order: {order}\nhorizon: {}\n{}", report.horizon, matrix_text(&report.matrix))
            };
            Outcome { status: 0, report: text }
        }
        CommandKind::Gauge => {
            let f: Generator = read_json(input(cfg)?)?;
            let report = PureGauge::from_generator(&f).scan_partial_isometries(cfg.n_max, cfg.tol).map_err(failure)?;
            let status = if report.first_failure.is_some() { 2 } else { 0 };
            Outcome { status, report: if json { to_json(&report) } else { gauge_text(&report) } }
        }
        CommandKind::Verify => {
            let report = verify(cfg.seed, cfg.trials, cfg.tol);
            let status = if report.all_passed { 0 } else { 2 };
            Outcome { status, report: if json { to_json(&report) } else { verify_text(&report) } }
        }
    })
}

fn classify_text(r: &ClassificationReport) -> String {
    let mut s = String::new();
    for (name, v) in r.entries() {
        let _ = write!(s, "{name}: {} (witness {:e})", v.verdict, v.witness);
        if let Some(p) = v.failing_pair {
            let star = |adj: bool| if adj { "*" } else { "" };
            let _ = write!(
                s,
                " [F^{}_{}{} vs F^{}_{}{}]",
                p.first.alpha,
                p.first.beta,
                star(p.first.adjoint),
                p.second.alpha,
                p.second.beta,
                star(p.second.adjoint)
            );
        }
        s.push('\n');
    }
    s
}

fn matrix_text(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    for row in m.to_rows() {
        let cells: Vec<String> = row.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
        s.push_str("  [");
        s.push_str(&cells.join(", "));
        s.push_str("]\n");
    }
    s
}

fn generator_text(g: &Generator) -> String {
    let mut s = format!("dim_h = {}, dim_k = {}\n", g.dim_h(), g.dim_k());
    for (name, block) in [("A", g.a()), ("B", g.b()), ("C", g.c()), ("D", g.d())] {
        let _ = writeln!(s, "{name}:");
        s.push_str(&matrix_text(block));
    }
    s
}

fn polar_text(p: &PolarPair, threshold: f64) -> String {
    let r = &p.residuals;
    let mut s = String::from("E (partial isometry part)\n");
    s.push_str(&generator_text(&p.e));
    s.push_str("G (positive part)\n");
    s.push_str(&generator_text(&p.g));
    let _ = writeln!(s, "residuals (threshold {threshold:e}):");
    for (name, v) in [
        ("reconstruction", r.reconstruction),
        ("pi_of_e", r.pi_of_e),
        ("n_partial_isometry", r.n_partial_isometry),
        ("cross_term", r.cross_term),
        ("quadratic_term", r.quadratic_term),
    ] {
        let _ = writeln!(s, "  {name}: {v:e}");
    }
    s
}

fn gauge_text(r: &LevelScanReport) -> String {
    let mut s = String::new();
    for l in &r.levels {
        let _ = writeln!(s, "level {}: residual {:e} {}", l.level, l.residual, if l.pass { "pass" } else { "FAIL" });
    }
    let _ = writeln!(s, "{}", r.verdict);
    s
}

fn verify_text(r: &VerifyReport) -> String {
    let mut s = format!("seed {} trials {} tol {:e}\n", r.seed, r.trials, r.tol);
    for suite in &r.suites {
        let _ = write!(s, "{}: {} passed, {} skipped, {} failed", suite.name, suite.passed, suite.skipped, suite.failed);
        if let Some(f) = &suite.first_failure {
            let _ = write!(s, " (trial {}: {})", f.trial, f.message);
        }
        s.push('\n');
    }
    let _ = writeln!(s, "{}", if r.all_passed { "all suites pass" } else { "some suites FAIL" });
    s
}
