//! Command-line front end for the `rkgrgg` library.
//!
//! The binary exposes six subcommands:
//!
//! * `generate` — sample one graph instance and write it as an edge list or
//!   a JSON instance dump;
//! * `analyze` — read an edge list or instance dump and print a
//!   connectivity report;
//! * `sweep` — run a Monte Carlo sweep over a grid of regime points
//!   described by a JSON config file;
//! * `bounds` — evaluate the closed-form probability bounds;
//! * `check-constants` — evaluate every inequality the supercritical
//!   constants must satisfy;
//! * `selftest` — run fast internal cross-validation checks.
//!
//! Exit codes: `0` success, `1` validation error (bad flags or config),
//! `2` runtime failure, `3` selftest failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rkgrgg::bounds::{
    self, ComponentBoundParams, IsolationCase, SufficiencyConstants,
};
use rkgrgg::combinatorics::{self, KeyPoolParams};
use rkgrgg::connectivity;
use rkgrgg::formats;
use rkgrgg::graph::{self, Boundary, EdgeRule, ModelParams};
use rkgrgg::harness::{self, RegimeSpec, SweepOptions};

mod selftest;

/// Random key graphs intersected with random geometric graphs: sampling,
/// connectivity analysis, and threshold verification.
#[derive(Debug, Parser)]
#[command(name = "rkgrgg", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one graph instance and write it out.
    Generate(GenerateArgs),
    /// Compute a connectivity report for a stored instance.
    Analyze(AnalyzeArgs),
    /// Run a Monte Carlo sweep over a grid of regime points.
    Sweep(SweepArgs),
    /// Evaluate closed-form probability bounds.
    Bounds(BoundsArgs),
    /// Check the supercritical constants against their inequalities.
    CheckConstants(CheckConstantsArgs),
    /// Run built-in cross-validation checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceFormat {
    /// Plain-text edge list with a `n m radius boundary rule` header.
    EdgeList,
    /// JSON dump carrying positions and key rings.
    Json,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of nodes.
    #[arg(long)]
    pub n: usize,
    /// Key pool size P.
    #[arg(long)]
    pub pool: u64,
    /// Key ring size K.
    #[arg(long)]
    pub ring: u64,
    /// Connection radius.
    #[arg(long)]
    pub radius: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Metric on the unit square: `square` or `torus`.
    #[arg(long, default_value = "square")]
    pub boundary: Boundary,
    /// Adjacency rule: `intersection`, `geometric_only`, or `key_only`.
    #[arg(long, default_value = "intersection")]
    pub rule: EdgeRule,
    /// Output format.
    #[arg(long, value_enum, default_value_t = InstanceFormat::EdgeList)]
    pub format: InstanceFormat,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Edge-list or JSON instance file produced by `generate`.
    #[arg(long)]
    pub input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON sweep configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the trial count from the config.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Override the base seed from the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the worker count from the config (0 = automatic).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    pub format: SweepFormat,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Echo the fully resolved configuration and exit without running.
    #[arg(long)]
    pub dry_run: bool,
}

fn default_trials() -> u64 {
    100
}

fn default_measure_delta() -> f64 {
    0.5
}

fn default_theta() -> f64 {
    0.5
}

/// Sweep configuration file contents. Command-line flags override the
/// corresponding fields after parsing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Grid points to solve and simulate.
    pub points: Vec<RegimeSpec>,
    /// Monte Carlo trials per grid point.
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Base seed; per-trial seeds are derived from it.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 means RKGRGG_WORKERS or available parallelism.
    #[serde(default)]
    pub workers: usize,
    /// Denseness tolerance used when measuring tessellation events.
    #[serde(default = "default_measure_delta")]
    pub delta: f64,
    /// Tessellation scale: cell side is sqrt(theta) * radius.
    #[serde(default = "default_theta")]
    pub theta: f64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.points.is_empty() {
            return Err(CliError::Validation(
                "points must contain at least one grid point".to_owned(),
            ));
        }
        if self.trials == 0 {
            return Err(CliError::Validation("trials must be at least 1".to_owned()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(CliError::Validation(format!(
                "delta must lie in (0,1), got {}",
                self.delta
            )));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(CliError::Validation(format!(
                "theta must lie in (0,1), got {}",
                self.theta
            )));
        }
        for (index, point) in self.points.iter().enumerate() {
            point
                .validate()
                .map_err(|err| CliError::Validation(format!("points[{index}]: {err}")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    /// Asymptotic disconnection floor `exp(-c1)/4`. Needs --c1.
    #[value(name = "disconnect_floor")]
    DisconnectFloor,
    /// Finite-n disconnection lower bound. Needs --n, --c1; optional --epsilon.
    #[value(name = "disconnect")]
    Disconnect,
    /// Single-node isolation probability with its sandwich. Needs --n, --ab.
    #[value(name = "single_isolation")]
    SingleIsolation,
    /// Joint two-node isolation bound. Needs --n, --area, --pool, --ring,
    /// --case.
    #[value(name = "joint_isolation")]
    JointIsolation,
    /// Chernoff bounds on a non-dense cell. Needs --n, --cell-side; optional
    /// --delta.
    #[value(name = "denseness")]
    Denseness,
    /// Small-component bound inside a dense cell. Needs --occupancy,
    /// --component-size, --distinct-keys, --pool, --ring; optional --beta.
    #[value(name = "component")]
    Component,
    /// Isolated-node-in-dense-cell bound. Needs --n, --alpha; optional
    /// --delta.
    #[value(name = "cell_isolation")]
    CellIsolation,
    /// Exact link probability with its sandwich. Needs --pool, --ring.
    #[value(name = "link_probability")]
    LinkProbability,
    /// Exponential sandwich around (1-x)^n. Needs --x-value, --n-real.
    #[value(name = "exp_sandwich")]
    ExpSandwich,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Near,
    Mid,
    Far,
}

impl From<CaseArg> for IsolationCase {
    fn from(case: CaseArg) -> Self {
        match case {
            CaseArg::Near => IsolationCase::Near,
            CaseArg::Mid => IsolationCase::Mid,
            CaseArg::Far => IsolationCase::Far,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Which bound to evaluate.
    #[arg(long, value_enum)]
    pub eval: BoundKind,
    /// Critical-scaling offset c1.
    #[arg(long)]
    pub c1: Option<f64>,
    /// Number of nodes.
    #[arg(long)]
    pub n: Option<usize>,
    /// Residual-control exponent for the finite-n disconnection bound.
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Edge-probability mass `a * beta`.
    #[arg(long)]
    pub ab: Option<f64>,
    /// Geometric area `a` multiplying the link probability.
    #[arg(long)]
    pub area: Option<f64>,
    /// Key pool size P.
    #[arg(long)]
    pub pool: Option<u64>,
    /// Key ring size K.
    #[arg(long)]
    pub ring: Option<u64>,
    /// Pair-distance case for the joint isolation bound.
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// Tessellation cell side s.
    #[arg(long)]
    pub cell_side: Option<f64>,
    /// Denseness tolerance.
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Edge-density multiplier in `n pi r^2 beta = alpha log n`.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Cell occupancy for the component bound.
    #[arg(long)]
    pub occupancy: Option<u64>,
    /// Component size l.
    #[arg(long)]
    pub component_size: Option<u64>,
    /// Distinct-key threshold x.
    #[arg(long)]
    pub distinct_keys: Option<u64>,
    /// Link probability within the cell (defaults to the exact value for
    /// --pool/--ring).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Base probability x for the exponential sandwich.
    #[arg(long)]
    pub x_value: Option<f64>,
    /// Real exponent n for the exponential sandwich.
    #[arg(long)]
    pub n_real: Option<f64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = TableFormat::Table)]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct CheckConstantsArgs {
    /// Pool floor multiplier sigma.
    #[arg(long)]
    pub sigma: f64,
    /// Key-threshold fraction lambda.
    #[arg(long)]
    pub lambda: f64,
    /// Occupancy-ratio constant mu.
    #[arg(long)]
    pub mu: f64,
    /// Denseness tolerance delta.
    #[arg(long)]
    pub delta: f64,
    /// Key-threshold multiplier R.
    #[arg(long)]
    pub big_r: f64,
    /// Fluctuation tolerance epsilon.
    #[arg(long)]
    pub epsilon: f64,
    /// Edge-density multiplier alpha.
    #[arg(long)]
    pub alpha: f64,
    /// Key pool size P.
    #[arg(long)]
    pub pool: u64,
    /// Key ring size K.
    #[arg(long)]
    pub ring: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = TableFormat::Table)]
    pub format: TableFormat,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Print each check as it runs.
    #[arg(long)]
    pub verbose: bool,
}

/// Errors carrying their process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config: exit code 1.
    Validation(String),
    /// I/O or computation failure: exit code 2.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(message) | CliError::Runtime(message) => message,
        }
    }
}

fn validation(err: impl std::fmt::Display) -> CliError {
    CliError::Validation(err.to_string())
}

fn runtime(err: impl std::fmt::Display) -> CliError {
    CliError::Runtime(err.to_string())
}

/// Parse `argv`, run the selected subcommand, and return the process exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}

pub fn dispatch(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Bounds(args) => cmd_bounds(&args),
        Command::CheckConstants(args) => cmd_check_constants(&args),
        Command::Selftest(args) => cmd_selftest(&args),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|err| runtime(format!("cannot write {}: {err}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<i32, CliError> {
    let pool = KeyPoolParams::new(args.pool, args.ring).map_err(validation)?;
    let params =
        ModelParams::new(args.n, pool, args.radius, args.boundary).map_err(validation)?;
    let graph = graph::sample_graph(&params, args.rule, args.seed).map_err(runtime)?;
    let text = match args.format {
        InstanceFormat::EdgeList => formats::edge_list_string(&graph),
        InstanceFormat::Json => {
            formats::instance_json(&formats::InstanceDump::from_graph(&graph, &pool, args.seed))
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|err| runtime(format!("cannot read {}: {err}", args.input.display())))?;
    let report = if text.trim_start().starts_with('{') {
        let dump = formats::parse_instance(&text).map_err(validation)?;
        let graph = dump.to_graph().map_err(validation)?;
        connectivity::analyze(&graph)
    } else {
        let parsed = formats::parse_edge_list(&text).map_err(validation)?;
        connectivity::analyze_edge_list(parsed.n, &parsed.edges)
    };
    emit(args.out.as_deref(), &formats::report_json(&report))?;
    Ok(0)
}

fn cmd_sweep(args: &SweepArgs) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|err| runtime(format!("cannot read {}: {err}", args.config.display())))?;
    let mut config: SweepConfig = serde_json::from_str(&text)
        .map_err(|err| validation(format!("invalid sweep config: {err}")))?;
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(workers) = args.workers {
        config.workers = workers;
    }
    config.validate()?;
    if args.dry_run {
        let echo = serde_json::to_string_pretty(&config).map_err(runtime)?;
        emit(args.out.as_deref(), &echo)?;
        return Ok(0);
    }
    let options = SweepOptions {
        trials: config.trials,
        base_seed: config.seed,
        workers: config.workers,
        delta: config.delta,
        theta: config.theta,
    };
    let result = harness::sweep(&config.points, &options).map_err(runtime)?;
    let text = match args.format {
        SweepFormat::Csv => formats::sweep_csv(&result),
        SweepFormat::Json => formats::sweep_json(&result),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

struct Table {
    rows: Vec<(String, String)>,
}

impl Table {
    fn new() -> Self {
        Table { rows: Vec::new() }
    }

    fn number(&mut self, name: &str, value: f64) {
        self.rows.push((name.to_owned(), format!("{value:.7}")));
    }

    fn flag(&mut self, name: &str, value: bool) {
        self.rows.push((name.to_owned(), value.to_string()));
    }

    fn text(&mut self, name: &str, value: &str) {
        self.rows.push((name.to_owned(), value.to_owned()));
    }

    fn render(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|(name, _)| name.len())
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        for (name, value) in &self.rows {
            let _ = writeln!(out, "{name:<width$}  {value}");
        }
        out
    }
}

fn require<T: Copy>(value: Option<T>, eval: &str, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| {
        CliError::Validation(format!("bounds --eval {eval} requires --{flag}"))
    })
}

fn pool_params(pool: Option<u64>, ring: Option<u64>, eval: &str) -> Result<KeyPoolParams, CliError> {
    let pool = require(pool, eval, "pool")?;
    let ring = require(ring, eval, "ring")?;
    KeyPoolParams::new(pool, ring).map_err(validation)
}

fn cmd_bounds(args: &BoundsArgs) -> Result<i32, CliError> {
    let mut table = Table::new();
    let json: serde_json::Value = match args.eval {
        BoundKind::DisconnectFloor => {
            let c1 = require(args.c1, "disconnect_floor", "c1")?;
            let floor = bounds::disconnect_floor(c1);
            table.number("disconnect_floor", floor);
            serde_json::json!({ "c1": c1, "disconnect_floor": floor })
        }
        BoundKind::Disconnect => {
            let n = require(args.n, "disconnect", "n")?;
            let c1 = require(args.c1, "disconnect", "c1")?;
            let bound =
                bounds::disconnect_lower_bound(n, c1, args.epsilon).map_err(validation)?;
            table.number("finite_n", bound.finite_n);
            table.number("floor", bound.floor);
            table.flag("vacuous", bound.vacuous);
            serde_json::to_value(bound).map_err(runtime)?
        }
        BoundKind::SingleIsolation => {
            let n = require(args.n, "single_isolation", "n")?;
            let ab = require(args.ab, "single_isolation", "ab")?;
            let result = bounds::single_isolation_probability(n, ab).map_err(validation)?;
            table.number("probability", result.probability);
            table.number("sandwich_lower", result.sandwich.lower());
            table.number("sandwich_upper", result.sandwich.upper());
            serde_json::to_value(result).map_err(runtime)?
        }
        BoundKind::JointIsolation => {
            let n = require(args.n, "joint_isolation", "n")?;
            let area = require(args.area, "joint_isolation", "area")?;
            let case = require(args.case, "joint_isolation", "case")?;
            let pool = pool_params(args.pool, args.ring, "joint_isolation")?;
            let bound = bounds::joint_isolation_bound(n, area, &pool, case.into())
                .map_err(validation)?;
            table.number("gamma", bound.gamma);
            table.number("log_value", bound.log_value);
            table.number("value", bound.value);
            serde_json::to_value(bound).map_err(runtime)?
        }
        BoundKind::Denseness => {
            let n = require(args.n, "denseness", "n")?;
            let cell_side = require(args.cell_side, "denseness", "cell-side")?;
            let bound =
                bounds::denseness_bound(n, cell_side, args.delta).map_err(validation)?;
            table.number("lower_tail", bound.lower_tail);
            table.number("upper_tail", bound.upper_tail);
            table.number("per_cell", bound.per_cell);
            table.text("cells", &bound.cells.to_string());
            table.number("union", bound.union);
            serde_json::to_value(bound).map_err(runtime)?
        }
        BoundKind::Component => {
            let occupancy = require(args.occupancy, "component", "occupancy")?;
            let component_size = require(args.component_size, "component", "component-size")?;
            let distinct_keys = require(args.distinct_keys, "component", "distinct-keys")?;
            let pool = pool_params(args.pool, args.ring, "component")?;
            let beta = match args.beta {
                Some(beta) => beta,
                None => combinatorics::link_probability(&pool).map_err(validation)?.value,
            };
            let params = ComponentBoundParams {
                occupancy,
                component_size,
                distinct_keys,
                pool,
                beta,
            };
            let bound = bounds::component_bound(&params).map_err(validation)?;
            table.number("few_keys_log", bound.few_keys_log);
            table.number("spanning_tree_log", bound.spanning_tree_log);
            table.number("value", bound.value);
            serde_json::to_value(bound).map_err(runtime)?
        }
        BoundKind::CellIsolation => {
            let n = require(args.n, "cell_isolation", "n")?;
            let alpha = require(args.alpha, "cell_isolation", "alpha")?;
            let bound = bounds::cell_isolation_bound(n, alpha, args.delta).map_err(validation)?;
            table.number("exponent", bound.exponent);
            table.number("value", bound.value);
            table.flag("vacuous", bound.vacuous);
            serde_json::to_value(bound).map_err(runtime)?
        }
        BoundKind::LinkProbability => {
            let pool = pool_params(args.pool, args.ring, "link_probability")?;
            let beta = combinatorics::link_probability(&pool).map_err(validation)?;
            table.number("lower", beta.lower);
            table.number("value", beta.value);
            table.number("upper", beta.upper);
            serde_json::to_value(beta).map_err(runtime)?
        }
        BoundKind::ExpSandwich => {
            let x = require(args.x_value, "exp_sandwich", "x-value")?;
            let n = require(args.n_real, "exp_sandwich", "n-real")?;
            let sandwich = combinatorics::exp_sandwich(x, n).map_err(validation)?;
            table.number("lower", sandwich.lower());
            table.number("value", sandwich.value());
            table.number("upper", sandwich.upper());
            serde_json::to_value(sandwich).map_err(runtime)?
        }
    };
    match args.format {
        TableFormat::Table => print!("{}", table.render()),
        TableFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json).map_err(runtime)?
            );
        }
    }
    Ok(0)
}

fn cmd_check_constants(args: &CheckConstantsArgs) -> Result<i32, CliError> {
    let pool = KeyPoolParams::new(args.pool, args.ring).map_err(validation)?;
    let constants = SufficiencyConstants {
        sigma: args.sigma,
        lambda: args.lambda,
        mu: args.mu,
        delta: args.delta,
        big_r: args.big_r,
        epsilon: args.epsilon,
        alpha: args.alpha,
    };
    let report = bounds::sufficiency_constants_check(&constants, &pool);
    match args.format {
        TableFormat::Table => {
            for check in &report.checks {
                println!(
                    "{:<55} {:>14.6} {:>2} {:>14.6}  {}",
                    check.name,
                    check.lhs,
                    check.comparison.symbol(),
                    check.rhs,
                    if check.satisfied { "ok" } else { "VIOLATED" }
                );
            }
            let violated = report.checks.iter().filter(|c| !c.satisfied).count();
            if report.all_satisfied {
                println!("all {} constraints satisfied", report.checks.len());
            } else {
                println!("{violated} of {} constraints violated", report.checks.len());
            }
        }
        TableFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).map_err(runtime)?
            );
        }
    }
    if report.all_satisfied {
        Ok(0)
    } else {
        Ok(2)
    }
}

fn cmd_selftest(args: &SelftestArgs) -> Result<i32, CliError> {
    let outcome = selftest::run(args.verbose);
    match outcome {
        Ok(count) => {
            println!("selftest: {count} checks passed");
            Ok(0)
        }
        Err(failure) => {
            eprintln!("selftest FAILED: {failure}");
            Ok(3)
        }
    }
}
