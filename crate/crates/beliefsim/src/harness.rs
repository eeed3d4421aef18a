//! Monte Carlo sweep orchestration: draw cases, evaluate every procedure
//! and measure exactly per case, aggregate into table rows.
//!
//! Each (range row, case) pair gets its own counter-derived random stream,
//! so a sweep is a pure function of its configuration no matter how the
//! cases are scheduled.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{self, DecisionThresholds, DprimePooling, MetricRecord};
use crate::model::{ChainParameters, EvidenceDecomposition, Topology};
use crate::noise::{
    perturb_direct, perturb_frequency, perturb_marginalized, BeliefModel, ErrorRange,
};
use crate::procedures::{evaluate_all, DropRule, Procedure, RelativeBeliefTable};
use crate::stream::case_stream;

/// Which generative story a sweep simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Four evidence nodes; every chain entry of the true model is
    /// perturbed and procedure inputs are marginals of the belief joint.
    Prototypical,
    /// Same network, but the simple-procedure inputs are assessed (and
    /// perturbed) directly from their true values.
    Direct,
    /// Beliefs are primary; the effective truth is the proportion of true
    /// propositions at each belief level.
    Frequency,
    /// The first evidence node becomes latent, leaving three observables.
    Hierarchical,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Prototypical,
        Scenario::Direct,
        Scenario::Frequency,
        Scenario::Hierarchical,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scenario::Prototypical => "prototypical",
            Scenario::Direct => "direct",
            Scenario::Frequency => "frequency",
            Scenario::Hierarchical => "hierarchical",
        }
    }

    fn stream_index(self) -> u64 {
        match self {
            Scenario::Prototypical => 0,
            Scenario::Direct => 1,
            Scenario::Frequency => 2,
            Scenario::Hierarchical => 3,
        }
    }

    pub fn topology(self) -> Topology {
        match self {
            Scenario::Hierarchical => Topology::hierarchical(),
            _ => Topology::prototypical(),
        }
    }

    /// The row ladder the result tables use by default: 0 to 2 in steps of
    /// 0.2 for the four-evidence scenarios, 0.5 for the coarser variants.
    pub fn default_ranges(self) -> Vec<f64> {
        match self {
            Scenario::Prototypical | Scenario::Direct => range_ladder(0.0, 2.0, 0.2).unwrap(),
            Scenario::Frequency | Scenario::Hierarchical => range_ladder(0.0, 2.0, 0.5).unwrap(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.id() == s)
            .ok_or_else(|| format!("unknown scenario '{s}'"))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("cases must be at least 1")]
    ZeroCases,
    #[error("at least one error range is required")]
    EmptyRanges,
    #[error("error ranges must be finite and nonnegative, got {0}")]
    InvalidRange(f64),
    #[error("error ranges must be strictly increasing (offending index {0})")]
    NonIncreasingRanges(usize),
    #[error("at least one procedure must be selected")]
    NoProcedures,
    #[error("range ladder needs step > 0 and stop >= start, got {start}:{stop}:{step}")]
    InvalidLadder { start: f64, stop: f64, step: f64 },
    #[error("range index {index} out of bounds for {len} ranges")]
    RangeIndexOutOfBounds { index: usize, len: usize },
}

/// Expands `start:stop:step` into an inclusive ladder of range values.
pub fn range_ladder(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, ConfigError> {
    if !(step > 0.0 && start >= 0.0 && stop >= start)
        || !step.is_finite()
        || !start.is_finite()
        || !stop.is_finite()
    {
        return Err(ConfigError::InvalidLadder { start, stop, step });
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Everything that determines a sweep. Two equal configurations produce
/// bytewise-equal results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub cases: u32,
    pub ranges: Vec<f64>,
    pub thresholds: DecisionThresholds,
    pub master_seed: u64,
    pub procedures: Vec<Procedure>,
    pub dprime_pooling: DprimePooling,
    pub strong_naive_drop: DropRule,
    /// Reuse the same case streams on every range row (common random
    /// numbers) instead of redrawing models per row.
    pub paired_cases: bool,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        ScenarioConfig {
            scenario,
            cases: 1000,
            ranges: scenario.default_ranges(),
            thresholds: DecisionThresholds::default(),
            master_seed: 0,
            procedures: Procedure::ALL.to_vec(),
            dprime_pooling: DprimePooling::default(),
            strong_naive_drop: DropRule::default(),
            paired_cases: false,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cases == 0 {
            return Err(ConfigError::ZeroCases);
        }
        if self.ranges.is_empty() {
            return Err(ConfigError::EmptyRanges);
        }
        for (i, &r) in self.ranges.iter().enumerate() {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(ConfigError::InvalidRange(r));
            }
            if i > 0 && r <= self.ranges[i - 1] {
                return Err(ConfigError::NonIncreasingRanges(i));
            }
        }
        if self.procedures.is_empty() {
            return Err(ConfigError::NoProcedures);
        }
        Ok(())
    }
}

/// One case fully evaluated: the shared Brier floor plus one metric record
/// per selected procedure (in configuration order).
#[derive(Debug, Clone, PartialEq)]
pub struct CaseOutcome {
    pub min_mse: f64,
    pub records: Vec<(Procedure, MetricRecord)>,
}

/// Full intermediate state of one case, for inspection and debugging.
#[derive(Debug, Clone)]
pub struct CaseDump {
    pub belief: BeliefModel,
    /// The chain the metrics score against (the effective truth under the
    /// frequency scenario).
    pub truth_chain: ChainParameters,
    pub truth: EvidenceDecomposition,
    pub tables: Vec<(Procedure, RelativeBeliefTable)>,
    pub outcome: CaseOutcome,
}

fn draw_models<R: rand::Rng + ?Sized>(
    scenario: Scenario,
    topology: &Topology,
    range: ErrorRange,
    rng: &mut R,
) -> (BeliefModel, ChainParameters) {
    match scenario {
        Scenario::Prototypical | Scenario::Hierarchical => {
            let truth = ChainParameters::sample(rng, topology);
            let belief = perturb_marginalized(&truth, range, rng);
            (belief, truth)
        }
        Scenario::Direct => {
            let truth = ChainParameters::sample(rng, topology);
            let belief = perturb_direct(&truth, topology, range, rng);
            (belief, truth)
        }
        Scenario::Frequency => {
            let beliefs = ChainParameters::sample(rng, topology);
            let (belief, effective_truth) = perturb_frequency(&beliefs, range, rng);
            (belief, effective_truth)
        }
    }
}

fn built_case(
    config: &ScenarioConfig,
    range_index: usize,
    case_index: u64,
) -> (BeliefModel, ChainParameters, EvidenceDecomposition) {
    let topology = config.scenario.topology();
    let stream_range = if config.paired_cases {
        0
    } else {
        range_index as u64
    };
    let mut rng = case_stream(
        config.master_seed,
        config.scenario.stream_index(),
        stream_range,
        case_index,
    );
    let range = ErrorRange::new(config.ranges[range_index]);
    let (belief, truth_chain) = draw_models(config.scenario, &topology, range, &mut rng);
    let truth = truth_chain.to_joint().decompose(&topology);
    (belief, truth_chain, truth)
}

/// Evaluates one case: a deterministic function of the configuration,
/// range row and case index.
pub fn run_case(config: &ScenarioConfig, range_index: usize, case_index: u64) -> CaseOutcome {
    let topology = config.scenario.topology();
    let (belief, _, truth) = built_case(config, range_index, case_index);
    let tables = evaluate_all(
        &config.procedures,
        &belief,
        &topology,
        config.strong_naive_drop,
    );
    outcome_from(&tables, &truth, config)
}

fn outcome_from(
    tables: &[(Procedure, RelativeBeliefTable)],
    truth: &EvidenceDecomposition,
    config: &ScenarioConfig,
) -> CaseOutcome {
    CaseOutcome {
        min_mse: metrics::min_possible_mse(truth),
        records: tables
            .iter()
            .map(|(p, rb)| {
                (
                    *p,
                    metrics::evaluate(rb, truth, config.thresholds, config.dprime_pooling),
                )
            })
            .collect(),
    }
}

/// Like [`run_case`] but keeps every intermediate product.
pub fn dump_case(config: &ScenarioConfig, range_index: usize, case_index: u64) -> CaseDump {
    let topology = config.scenario.topology();
    let (belief, truth_chain, truth) = built_case(config, range_index, case_index);
    let tables = evaluate_all(
        &config.procedures,
        &belief,
        &topology,
        config.strong_naive_drop,
    );
    let outcome = outcome_from(&tables, &truth, config);
    CaseDump {
        belief,
        truth_chain,
        truth,
        tables,
        outcome,
    }
}

/// Mean and spread of one metric over the defined cases of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregate {
    pub mean: f64,
    pub std_error: f64,
    /// Cases where the metric was undefined and left out of the mean.
    pub excluded: u32,
}

impl Aggregate {
    fn collect<I: Iterator<Item = Option<f64>>>(values: I) -> Aggregate {
        let mut defined = Vec::new();
        let mut excluded = 0u32;
        for v in values {
            match v {
                Some(x) => defined.push(x),
                None => excluded += 1,
            }
        }
        if defined.is_empty() {
            return Aggregate {
                mean: f64::NAN,
                std_error: 0.0,
                excluded,
            };
        }
        let n = defined.len() as f64;
        let mean = defined.iter().sum::<f64>() / n;
        let std_error = if defined.len() > 1 {
            let var = defined.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        Aggregate {
            mean,
            std_error,
            excluded,
        }
    }
}

/// A statistic of the whole cell rather than a mean of per-case values:
/// computed once from the aggregated decision masses, with a jackknife
/// (leave-one-case-out) standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunStat {
    pub value: f64,
    pub std_error: f64,
}

impl RunStat {
    /// Evaluates `f(mean_pe, mean_pc)` and its jackknife standard error.
    fn from_masses(pes: &[f64], pcs: &[f64], f: impl Fn(f64, f64) -> f64) -> RunStat {
        let n = pes.len() as f64;
        let sum_pe: f64 = pes.iter().sum();
        let sum_pc: f64 = pcs.iter().sum();
        let value = f(sum_pe / n, sum_pc / n);
        if pes.len() < 2 {
            return RunStat {
                value,
                std_error: 0.0,
            };
        }
        let m = n - 1.0;
        let leave_outs: Vec<f64> = pes
            .iter()
            .zip(pcs)
            .map(|(pe, pc)| f((sum_pe - pe) / m, (sum_pc - pc) / m))
            .collect();
        let mean = leave_outs.iter().sum::<f64>() / n;
        let var = leave_outs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * m / n;
        RunStat {
            value,
            std_error: var.sqrt(),
        }
    }
}

/// Every metric aggregated over the cases of one (range, procedure) cell.
///
/// `re` and `dprime` hold means of the per-case measures. The tabled
/// statistics are the run-level cells: `re_aggregate` is the ratio of the
/// aggregated error mass to all decided mass, and `dprime_aggregate` is
/// the z-form sensitivity of the aggregated masses — the quantities the
/// printed result tables carry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcedureAggregates {
    pub mse: Aggregate,
    pub pe: Aggregate,
    pub pc: Aggregate,
    pub re: Aggregate,
    pub dprime: Aggregate,
    pub dprime_z: Aggregate,
    pub re_aggregate: RunStat,
    pub dprime_aggregate: RunStat,
}

/// One table row: a range value with its per-procedure cells and the mean
/// Brier floor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeRow {
    pub range: f64,
    pub min_mse: Aggregate,
    pub procedures: Vec<(Procedure, ProcedureAggregates)>,
}

impl RangeRow {
    pub fn cell(&self, procedure: Procedure) -> Option<&ProcedureAggregates> {
        self.procedures
            .iter()
            .find(|(p, _)| *p == procedure)
            .map(|(_, a)| a)
    }
}

/// Aggregated sweep output, one row per error range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: ScenarioConfig,
    pub rows: Vec<RangeRow>,
}

/// Sweep output with every per-case record retained, for paired statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailedSweep {
    pub config: ScenarioConfig,
    /// `per_range[range_index][case_index]`.
    pub per_range: Vec<Vec<CaseOutcome>>,
}

impl DetailedSweep {
    pub fn aggregate(&self) -> SweepResult {
        let rows = self
            .per_range
            .iter()
            .zip(&self.config.ranges)
            .map(|(cases, &range)| {
                let min_mse = Aggregate::collect(cases.iter().map(|c| Some(c.min_mse)));
                let procedures = self
                    .config
                    .procedures
                    .iter()
                    .enumerate()
                    .map(|(pi, &p)| {
                        let records = || cases.iter().map(move |c| &c.records[pi].1);
                        let pes: Vec<f64> = records().map(|r| r.pe).collect();
                        let pcs: Vec<f64> = records().map(|r| r.pc).collect();
                        let agg = ProcedureAggregates {
                            mse: Aggregate::collect(records().map(|r| Some(r.mse))),
                            pe: Aggregate::collect(records().map(|r| Some(r.pe))),
                            pc: Aggregate::collect(records().map(|r| Some(r.pc))),
                            re: Aggregate::collect(records().map(|r| r.re)),
                            dprime: Aggregate::collect(records().map(|r| r.dprime)),
                            dprime_z: Aggregate::collect(records().map(|r| r.dprime_z)),
                            re_aggregate: RunStat::from_masses(&pes, &pcs, |pe, pc| {
                                metrics::relative_error(pe, pc).unwrap_or(f64::NAN)
                            }),
                            dprime_aggregate: RunStat::from_masses(&pes, &pcs, |pe, pc| {
                                metrics::dprime_z_form(pe, pc).unwrap_or(f64::NAN)
                            }),
                        };
                        (p, agg)
                    })
                    .collect();
                RangeRow {
                    range,
                    min_mse,
                    procedures,
                }
            })
            .collect();
        SweepResult {
            config: self.config.clone(),
            rows,
        }
    }
}

fn run_detailed(config: &ScenarioConfig, parallel: bool) -> Result<DetailedSweep, ConfigError> {
    config.validate()?;
    let per_range = (0..config.ranges.len())
        .map(|ri| {
            if parallel {
                (0..config.cases as u64)
                    .into_par_iter()
                    .map(|ci| run_case(config, ri, ci))
                    .collect()
            } else {
                (0..config.cases as u64)
                    .map(|ci| run_case(config, ri, ci))
                    .collect()
            }
        })
        .collect();
    Ok(DetailedSweep {
        config: config.clone(),
        per_range,
    })
}

/// Runs the full sweep with cases evaluated in parallel. The reduction
/// order is fixed by case index, so the result is bit-identical to
/// [`run_sweep_serial`].
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult, ConfigError> {
    Ok(run_detailed(config, true)?.aggregate())
}

pub fn run_sweep_serial(config: &ScenarioConfig) -> Result<SweepResult, ConfigError> {
    Ok(run_detailed(config, false)?.aggregate())
}

/// Runs the sweep keeping per-case records for paired comparisons.
pub fn run_sweep_detailed(config: &ScenarioConfig) -> Result<DetailedSweep, ConfigError> {
    run_detailed(config, true)
}

/// Number of relative-belief bins in histogram output.
pub const HISTOGRAM_BINS: usize = 20;
/// Width of each histogram bin.
pub const HISTOGRAM_BIN_WIDTH: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub mass_given_h_true: f64,
    pub mass_given_h_false: f64,
}

/// Probability-weighted distribution of one procedure's relative-belief
/// values, conditioned on the hypothesis, pooled over a sweep's cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RbHistogram {
    pub procedure: Procedure,
    pub range: f64,
    pub bins: Vec<HistogramBin>,
}

impl RbHistogram {
    /// Mean and variance of the binned distribution (midpoint rule) for
    /// the chosen condition.
    pub fn moments(&self, h_true: bool) -> (f64, f64) {
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for bin in &self.bins {
            let mid = (bin.lo + bin.hi) / 2.0;
            let mass = if h_true {
                bin.mass_given_h_true
            } else {
                bin.mass_given_h_false
            };
            mean += mass * mid;
            m2 += mass * mid * mid;
        }
        (mean, (m2 - mean * mean).max(0.0))
    }
}

/// Pools `P(state & H)`-weighted relative-belief frequencies over all
/// cases of one (range, procedure) cell, normalized per condition.
pub fn histogram_data(
    config: &ScenarioConfig,
    range_index: usize,
    procedure: Procedure,
) -> Result<RbHistogram, ConfigError> {
    config.validate()?;
    if range_index >= config.ranges.len() {
        return Err(ConfigError::RangeIndexOutOfBounds {
            index: range_index,
            len: config.ranges.len(),
        });
    }
    let topology = config.scenario.topology();
    let singleton = [procedure];
    let per_case: Vec<([f64; HISTOGRAM_BINS], [f64; HISTOGRAM_BINS])> = (0..config.cases as u64)
        .into_par_iter()
        .map(|ci| {
            let (belief, _, truth) = built_case(config, range_index, ci);
            let table = &evaluate_all(&singleton, &belief, &topology, config.strong_naive_drop)[0].1;
            let mut h_true = [0.0; HISTOGRAM_BINS];
            let mut h_false = [0.0; HISTOGRAM_BINS];
            for e in truth.states() {
                let bin = ((table.rb(e) / HISTOGRAM_BIN_WIDTH) as usize).min(HISTOGRAM_BINS - 1);
                h_true[bin] += truth.mass_h_true(e);
                h_false[bin] += truth.mass_h_false(e);
            }
            (h_true, h_false)
        })
        .collect();

    let mut mass_true = [0.0; HISTOGRAM_BINS];
    let mut mass_false = [0.0; HISTOGRAM_BINS];
    for (ht, hf) in &per_case {
        for b in 0..HISTOGRAM_BINS {
            mass_true[b] += ht[b];
            mass_false[b] += hf[b];
        }
    }
    let total_true: f64 = mass_true.iter().sum();
    let total_false: f64 = mass_false.iter().sum();
    let bins = (0..HISTOGRAM_BINS)
        .map(|b| HistogramBin {
            lo: b as f64 * HISTOGRAM_BIN_WIDTH,
            hi: (b + 1) as f64 * HISTOGRAM_BIN_WIDTH,
            mass_given_h_true: if total_true > 0.0 {
                mass_true[b] / total_true
            } else {
                0.0
            },
            mass_given_h_false: if total_false > 0.0 {
                mass_false[b] / total_false
            } else {
                0.0
            },
        })
        .collect();
    Ok(RbHistogram {
        procedure,
        range: config.ranges[range_index],
        bins,
    })
}
