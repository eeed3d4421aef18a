//! Command-line front end: configuration parsing (flags over an optional
//! key=value config file), sweep execution, and table/histogram emission.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::harness::{
    dump_case, histogram_data, range_ladder, run_sweep, Scenario, ScenarioConfig,
};
use crate::metrics::DecisionThresholds;
use crate::model::Role;
use crate::procedures::Procedure;
use crate::report::{
    write_histogram_csv, write_table, MetricId, RunManifest, TableFormat,
};

/// Environment variable consulted for the default output directory.
pub const OUT_DIR_ENV: &str = "BELIEFSIM_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or config values; exits with status 2.
    #[error("{0}")]
    Usage(String),
    /// Failures after a valid configuration (I/O and the like); exits 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "beliefsim",
    version,
    about = "Monte Carlo robustness lab for uncertain-inference procedures"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a sweep and write one table per error measure
    Simulate(SimulateArgs),
    /// Write relative-belief histogram data files for one error range
    Histogram(HistogramArgs),
    /// Print every intermediate product of a single case
    Case(CaseArgs),
}

#[derive(Debug, Args, Default, Clone)]
struct CommonArgs {
    /// prototypical | direct | frequency | hierarchical
    #[arg(long)]
    scenario: Option<String>,
    /// Monte Carlo cases per error range
    #[arg(long)]
    cases: Option<u32>,
    /// Error-range ladder as start:stop:step (inclusive stop)
    #[arg(long)]
    ranges: Option<String>,
    /// Master seed for the whole sweep
    #[arg(long)]
    seed: Option<u64>,
    /// Upper decision threshold
    #[arg(long)]
    upper: Option<f64>,
    /// Lower decision threshold
    #[arg(long)]
    lower: Option<f64>,
    /// Both thresholds as lower,upper
    #[arg(long)]
    thresholds: Option<String>,
    /// Comma-separated procedure ids (default: all five)
    #[arg(long)]
    procedures: Option<String>,
    /// Reuse case streams across ranges (common random numbers)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    paired_cases: Option<bool>,
    /// d' denominator: pooled | average_of_sds
    #[arg(long)]
    dprime_pooling: Option<String>,
    /// Strong-naive drop test: per_observed_value | per_item
    #[arg(long)]
    strong_naive_drop: Option<String>,
    /// Flat key=value config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// csv | markdown
    #[arg(long)]
    format: Option<String>,
    /// Output directory (default: $BELIEFSIM_OUT_DIR or .)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct HistogramArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Single error range to pool histograms at
    #[arg(long, default_value_t = 1.0)]
    range: f64,
    /// Output directory (default: $BELIEFSIM_OUT_DIR or .)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CaseArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Error range of the case
    #[arg(long, default_value_t = 0.0)]
    range: f64,
    /// Which case of the row to dump
    #[arg(long, default_value_t = 0)]
    case_index: u64,
}

/// Option bag shared by flags and the config file; `None` means "not set
/// here". Flags win over file values, defaults fill the rest.
#[derive(Debug, Default, Clone)]
struct RawOptions {
    scenario: Option<String>,
    cases: Option<u32>,
    ranges: Option<String>,
    seed: Option<u64>,
    upper: Option<f64>,
    lower: Option<f64>,
    thresholds: Option<String>,
    procedures: Option<String>,
    paired_cases: Option<bool>,
    dprime_pooling: Option<String>,
    strong_naive_drop: Option<String>,
    format: Option<String>,
    out_dir: Option<PathBuf>,
}

impl RawOptions {
    fn from_common(common: &CommonArgs) -> Self {
        RawOptions {
            scenario: common.scenario.clone(),
            cases: common.cases,
            ranges: common.ranges.clone(),
            seed: common.seed,
            upper: common.upper,
            lower: common.lower,
            thresholds: common.thresholds.clone(),
            procedures: common.procedures.clone(),
            paired_cases: common.paired_cases,
            dprime_pooling: common.dprime_pooling.clone(),
            strong_naive_drop: common.strong_naive_drop.clone(),
            format: None,
            out_dir: None,
        }
    }

    /// Fills every unset field from `fallback`.
    fn or(self, fallback: RawOptions) -> Self {
        RawOptions {
            scenario: self.scenario.or(fallback.scenario),
            cases: self.cases.or(fallback.cases),
            ranges: self.ranges.or(fallback.ranges),
            seed: self.seed.or(fallback.seed),
            upper: self.upper.or(fallback.upper),
            lower: self.lower.or(fallback.lower),
            thresholds: self.thresholds.or(fallback.thresholds),
            procedures: self.procedures.or(fallback.procedures),
            paired_cases: self.paired_cases.or(fallback.paired_cases),
            dprime_pooling: self.dprime_pooling.or(fallback.dprime_pooling),
            strong_naive_drop: self.strong_naive_drop.or(fallback.strong_naive_drop),
            format: self.format.or(fallback.format),
            out_dir: self.out_dir.or(fallback.out_dir),
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

/// Parses the flat `key=value` config file format ('#' starts a comment).
fn parse_config_file(path: &Path) -> Result<RawOptions, CliError> {
    let body = fs::read_to_string(path)
        .map_err(|e| usage(format!("--config: cannot read {}: {e}", path.display())))?;
    let mut options = RawOptions::default();
    for (line_no, raw_line) in body.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(idx) => &raw_line[..idx],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("--config: line {}: expected key=value", line_no + 1)))?;
        let key = key.trim();
        let value = value.trim().to_string();
        let bad_value =
            |e: String| usage(format!("--config: line {}: {key}: {e}", line_no + 1));
        match key {
            "scenario" => options.scenario = Some(value),
            "cases" => options.cases = Some(value.parse().map_err(|e: std::num::ParseIntError| bad_value(e.to_string()))?),
            "ranges" => options.ranges = Some(value),
            "seed" => options.seed = Some(value.parse().map_err(|e: std::num::ParseIntError| bad_value(e.to_string()))?),
            "upper" => options.upper = Some(value.parse().map_err(|e: std::num::ParseFloatError| bad_value(e.to_string()))?),
            "lower" => options.lower = Some(value.parse().map_err(|e: std::num::ParseFloatError| bad_value(e.to_string()))?),
            "thresholds" => options.thresholds = Some(value),
            "procedures" => options.procedures = Some(value),
            "paired_cases" => options.paired_cases = Some(value.parse().map_err(|e: std::str::ParseBoolError| bad_value(e.to_string()))?),
            "dprime_pooling" => options.dprime_pooling = Some(value),
            "strong_naive_drop" => options.strong_naive_drop = Some(value),
            "format" => options.format = Some(value),
            "out_dir" => options.out_dir = Some(PathBuf::from(value)),
            _ => return Err(usage(format!("--config: line {}: unknown key '{key}'", line_no + 1))),
        }
    }
    Ok(options)
}

/// Turns merged options into a validated sweep configuration.
fn build_config(options: &RawOptions) -> Result<ScenarioConfig, CliError> {
    let scenario = match &options.scenario {
        Some(s) => s
            .parse::<Scenario>()
            .map_err(|e| usage(format!("--scenario: {e}")))?,
        None => Scenario::Prototypical,
    };
    let mut config = ScenarioConfig::new(scenario);

    if let Some(cases) = options.cases {
        config.cases = cases;
    }
    if let Some(seed) = options.seed {
        config.master_seed = seed;
    }
    if let Some(spec) = &options.ranges {
        config.ranges = parse_ladder(spec).map_err(|e| usage(format!("--ranges: {e}")))?;
    }

    config.thresholds = resolve_thresholds(options)?;

    if let Some(list) = &options.procedures {
        let mut procedures = Vec::new();
        for id in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let p = id
                .parse::<Procedure>()
                .map_err(|e| usage(format!("--procedures: {e}")))?;
            if !procedures.contains(&p) {
                procedures.push(p);
            }
        }
        config.procedures = procedures;
    }
    if let Some(paired) = options.paired_cases {
        config.paired_cases = paired;
    }
    if let Some(pooling) = &options.dprime_pooling {
        config.dprime_pooling = pooling
            .parse()
            .map_err(|e| usage(format!("--dprime-pooling: {e}")))?;
    }
    if let Some(drop) = &options.strong_naive_drop {
        config.strong_naive_drop = drop
            .parse()
            .map_err(|e| usage(format!("--strong-naive-drop: {e}")))?;
    }

    config
        .validate()
        .map_err(|e| usage(format!("invalid configuration: {e}")))?;
    Ok(config)
}

fn parse_ladder(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:step, got '{spec}'"));
    }
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| format!("'{s}': {e}"))
    };
    let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    range_ladder(start, stop, step).map_err(|e| e.to_string())
}

fn resolve_thresholds(options: &RawOptions) -> Result<DecisionThresholds, CliError> {
    if options.thresholds.is_some() && (options.upper.is_some() || options.lower.is_some()) {
        return Err(usage(
            "--thresholds conflicts with --upper/--lower; use one form",
        ));
    }
    if let Some(spec) = &options.thresholds {
        let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(usage(format!(
                "--thresholds: expected lower,upper, got '{spec}'"
            )));
        }
        let lower: f64 = parts[0]
            .parse()
            .map_err(|e| usage(format!("--thresholds: '{}': {e}", parts[0])))?;
        let upper: f64 = parts[1]
            .parse()
            .map_err(|e| usage(format!("--thresholds: '{}': {e}", parts[1])))?;
        if lower >= upper {
            return Err(usage(format!(
                "--thresholds: values must be listed lower,upper in increasing order, got '{spec}'"
            )));
        }
        return DecisionThresholds::new(lower, upper)
            .map_err(|e| usage(format!("--thresholds: {e}")));
    }
    let default = DecisionThresholds::default();
    let lower = options.lower.unwrap_or_else(|| default.lower());
    let upper = options.upper.unwrap_or_else(|| default.upper());
    DecisionThresholds::new(lower, upper).map_err(|e| usage(format!("--upper/--lower: {e}")))
}

fn merge_with_file(common: &CommonArgs) -> Result<RawOptions, CliError> {
    let flags = RawOptions::from_common(common);
    match &common.config {
        Some(path) => Ok(flags.or(parse_config_file(path)?)),
        None => Ok(flags),
    }
}

fn resolve_out_dir(flag: &Option<PathBuf>, merged: &RawOptions) -> PathBuf {
    flag.clone()
        .or_else(|| merged.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_format(flag: &Option<String>, merged: &RawOptions) -> Result<TableFormat, CliError> {
    match flag.as_ref().or(merged.format.as_ref()) {
        Some(s) => s.parse().map_err(|e| usage(format!("--format: {e}"))),
        None => Ok(TableFormat::Csv),
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))
}

/// What one invocation produced: files on disk plus text for stdout.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub outputs: Vec<PathBuf>,
    pub text: String,
}

fn run_simulate(args: &SimulateArgs) -> Result<RunSummary, CliError> {
    let merged = merge_with_file(&args.common)?;
    let config = build_config(&merged)?;
    let format = resolve_format(&args.format, &merged)?;
    let out_dir = resolve_out_dir(&args.out_dir, &merged);
    ensure_out_dir(&out_dir)?;

    let result = run_sweep(&config).map_err(|e| usage(format!("invalid configuration: {e}")))?;

    let mut outputs = Vec::new();
    let mut names = Vec::new();
    for metric in [MetricId::Mse, MetricId::Dprime, MetricId::Re] {
        let name = format!("{}.{}", metric.id(), format.extension());
        let path = out_dir.join(&name);
        write_table(&result, metric, format, &path)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        outputs.push(path);
        names.push(name);
    }
    let manifest_path = out_dir.join("manifest.json");
    RunManifest::new(&config, names)
        .write(&manifest_path)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    outputs.push(manifest_path);

    let mut text = String::new();
    for path in &outputs {
        let _ = writeln!(text, "wrote {}", path.display());
    }
    Ok(RunSummary { outputs, text })
}

fn run_histogram(args: &HistogramArgs) -> Result<RunSummary, CliError> {
    let merged = merge_with_file(&args.common)?;
    let mut config = build_config(&merged)?;
    if !(args.range >= 0.0 && args.range.is_finite()) {
        return Err(usage(format!("--range: must be nonnegative, got {}", args.range)));
    }
    config.ranges = vec![args.range];
    let out_dir = resolve_out_dir(&args.out_dir, &merged);
    ensure_out_dir(&out_dir)?;

    let mut outputs = Vec::new();
    let mut names = Vec::new();
    for &procedure in &config.procedures.clone() {
        let histogram = histogram_data(&config, 0, procedure)
            .map_err(|e| usage(format!("invalid configuration: {e}")))?;
        let name = format!("histogram_{}.csv", procedure.id());
        let path = out_dir.join(&name);
        write_histogram_csv(&histogram, &path).map_err(|e| CliError::Runtime(e.to_string()))?;
        outputs.push(path);
        names.push(name);
    }
    let manifest_path = out_dir.join("manifest.json");
    RunManifest::new(&config, names)
        .write(&manifest_path)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    outputs.push(manifest_path);

    let mut text = String::new();
    for path in &outputs {
        let _ = writeln!(text, "wrote {}", path.display());
    }
    Ok(RunSummary { outputs, text })
}

fn run_case_dump(args: &CaseArgs) -> Result<RunSummary, CliError> {
    let merged = merge_with_file(&args.common)?;
    let mut config = build_config(&merged)?;
    if !(args.range >= 0.0 && args.range.is_finite()) {
        return Err(usage(format!("--range: must be nonnegative, got {}", args.range)));
    }
    config.ranges = vec![args.range];
    if args.case_index >= u64::from(config.cases) {
        return Err(usage(format!(
            "--case-index: {} out of bounds for {} cases",
            args.case_index, config.cases
        )));
    }

    let dump = dump_case(&config, 0, args.case_index);
    let topology = config.scenario.topology();

    let mut text = String::new();
    let _ = writeln!(
        text,
        "scenario {} | range {:.3} | case {} | seed {}",
        config.scenario, args.range, args.case_index, config.master_seed
    );
    let evidence_letters: String = topology
        .evidence_vars()
        .iter()
        .map(|v| topology.name(*v))
        .collect();
    let _ = writeln!(text, "evidence order: {evidence_letters}");
    let latent: Vec<char> = (0..topology.n_vars())
        .map(crate::model::VariableId)
        .filter(|v| topology.role(*v) == Role::Latent)
        .map(|v| topology.name(v))
        .collect();
    if !latent.is_empty() {
        let _ = writeln!(text, "latent (summed out): {}", latent.iter().collect::<String>());
    }

    let _ = write!(text, "\n{:<8} {:>10} {:>12}", "state", "P(state)", "P(H=T|s)");
    for (p, _) in &dump.tables {
        let _ = write!(text, " {:>18}", p.id());
    }
    let _ = writeln!(text);
    for e in topology.evidential_states() {
        let label: String = (0..topology.n_evidence())
            .map(|j| if e.observed(j) { 'T' } else { 'F' })
            .collect();
        let posterior = dump
            .truth
            .posterior(e)
            .map(|p| format!("{p:.6}"))
            .unwrap_or_else(|| "-".into());
        let _ = write!(
            text,
            "{label:<8} {:>10.6} {posterior:>12}",
            dump.truth.state_mass(e)
        );
        for (_, table) in &dump.tables {
            let _ = write!(text, " {:>18.6}", table.rb(e));
        }
        let _ = writeln!(text);
    }

    let _ = writeln!(text, "\nminimum possible mse: {:.6}", dump.outcome.min_mse);
    let _ = writeln!(
        text,
        "{:<20} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "procedure", "mse", "re", "pe", "pc", "dprime", "dprime_z"
    );
    let opt = |v: Option<f64>, decimals: usize| {
        v.map(|x| format!("{x:.*}", decimals))
            .unwrap_or_else(|| "-".into())
    };
    for (p, record) in &dump.outcome.records {
        let _ = writeln!(
            text,
            "{:<20} {:>9.6} {:>9} {:>9.6} {:>9.6} {:>9} {:>9}",
            p.id(),
            record.mse,
            opt(record.re, 6),
            record.pe,
            record.pc,
            opt(record.dprime, 4),
            opt(record.dprime_z, 4)
        );
    }

    Ok(RunSummary {
        outputs: Vec::new(),
        text,
    })
}

fn execute(cli: Cli) -> Result<RunSummary, CliError> {
    match &cli.command {
        Command::Simulate(args) => run_simulate(args),
        Command::Histogram(args) => run_histogram(args),
        Command::Case(args) => run_case_dump(args),
    }
}

/// Library entry point used by tests: parses the given argv (including the
/// program name) and executes it.
pub fn run_with_args<I, T>(args: I) -> Result<RunSummary, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
    execute(cli)
}

/// Binary entry point: parses `std::env::args_os`, prints, and returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(summary) => {
            print!("{}", summary.text);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
