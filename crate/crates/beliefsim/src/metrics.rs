//! The three error measures, each computed exactly by enumeration over
//! evidential states — no sampling enters after the case itself is drawn.
//!
//! Decisions for the relative-error measure follow the signal-detection
//! reading: declare the hypothesis true when `rb > upper`, declare it
//! false when `rb < lower`, and decide nothing in between. `pe` is the
//! true-probability mass of declarations that contradict the hypothesis,
//! `pc` the mass of declarations that agree with it, so `pe + pc <= 1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::model::EvidenceDecomposition;
use crate::procedures::RelativeBeliefTable;

/// Upper and lower decision thresholds for the relative-error measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionThresholds {
    lower: f64,
    upper: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("thresholds must satisfy 0 < lower < upper < 1, got lower={lower}, upper={upper}")]
pub struct ThresholdError {
    pub lower: f64,
    pub upper: f64,
}

impl DecisionThresholds {
    pub fn new(lower: f64, upper: f64) -> Result<Self, ThresholdError> {
        if 0.0 < lower && lower < upper && upper < 1.0 {
            Ok(DecisionThresholds { lower, upper })
        } else {
            Err(ThresholdError { lower, upper })
        }
    }

    pub fn lower(self) -> f64 {
        self.lower
    }

    pub fn upper(self) -> f64 {
        self.upper
    }
}

impl Default for DecisionThresholds {
    fn default() -> Self {
        DecisionThresholds {
            lower: 0.35,
            upper: 0.65,
        }
    }
}

/// How the two conditional spreads are combined into the d' denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DprimePooling {
    /// `sqrt((var_T + var_F) / 2)`, the equal-variance convention.
    #[default]
    Pooled,
    /// `(sd_T + sd_F) / 2`, kept for sensitivity runs.
    AverageOfSds,
}

impl fmt::Display for DprimePooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DprimePooling::Pooled => "pooled",
            DprimePooling::AverageOfSds => "average_of_sds",
        })
    }
}

impl FromStr for DprimePooling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pooled" => Ok(DprimePooling::Pooled),
            "average_of_sds" => Ok(DprimePooling::AverageOfSds),
            _ => Err(format!("unknown d' pooling '{s}'")),
        }
    }
}

/// Every error measure for one (procedure, case) pair. `re`, `dprime` and
/// `dprime_z` are `None` when degenerate (nothing decided, or no spread);
/// the harness excludes those from its means and counts them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricRecord {
    pub mse: f64,
    pub min_mse: f64,
    pub pe: f64,
    pub pc: f64,
    pub re: Option<f64>,
    pub dprime: Option<f64>,
    /// Diagnostic companion: `z(1-Pe') + z(Pc')` on the per-decision rates
    /// `Pe' = pe/(pe+pc)`, `Pc' = pc/(pe+pc)`. Reported, never asserted.
    pub dprime_z: Option<f64>,
}

/// Probability-weighted Brier score of the relative-belief table against
/// the true joint: `sum_s P(s) * [p(s)(1-rb)^2 + (1-p(s))rb^2]`.
pub fn expected_mse(rb: &RelativeBeliefTable, truth: &EvidenceDecomposition) -> f64 {
    assert_eq!(rb.n_states(), truth.n_states());
    truth
        .states()
        .map(|e| {
            let v = rb.rb(e);
            truth.mass_h_true(e) * (1.0 - v).powi(2) + truth.mass_h_false(e) * v.powi(2)
        })
        .sum()
}

/// The Brier floor `sum_s P(s) * p(s) * (1 - p(s))`, achieved exactly when
/// the relative belief equals the true posterior.
pub fn min_possible_mse(truth: &EvidenceDecomposition) -> f64 {
    truth
        .states()
        .map(|e| {
            let total = truth.state_mass(e);
            if total > 0.0 {
                truth.mass_h_true(e) * truth.mass_h_false(e) / total
            } else {
                0.0
            }
        })
        .sum()
}

/// Mass of wrong and correct declarations under the strict threshold rule.
pub fn pe_pc(
    rb: &RelativeBeliefTable,
    truth: &EvidenceDecomposition,
    thresholds: DecisionThresholds,
) -> (f64, f64) {
    assert_eq!(rb.n_states(), truth.n_states());
    let mut pe = 0.0;
    let mut pc = 0.0;
    for e in truth.states() {
        let v = rb.rb(e);
        if v > thresholds.upper() {
            pc += truth.mass_h_true(e);
            pe += truth.mass_h_false(e);
        } else if v < thresholds.lower() {
            pc += truth.mass_h_false(e);
            pe += truth.mass_h_true(e);
        }
    }
    (pe, pc)
}

/// `pe / (pe + pc)`, or `None` when nothing was decided.
pub fn relative_error(pe: f64, pc: f64) -> Option<f64> {
    let total = pe + pc;
    if total > 0.0 {
        Some(pe / total)
    } else {
        None
    }
}

/// Spreads at or below this are indistinguishable from f64 accumulation
/// dust at unit mass scale and count as zero (d' undefined). Any real
/// spread in these tables is orders of magnitude above it.
pub const DPRIME_SPREAD_FLOOR: f64 = 1e-8;

/// Normalized mean separation of the relative-belief distributions
/// conditioned on the hypothesis being true vs. false, under the true
/// joint. `None` when either condition has no mass or the pooled spread
/// is zero (below [`DPRIME_SPREAD_FLOOR`]).
pub fn dprime(
    rb: &RelativeBeliefTable,
    truth: &EvidenceDecomposition,
    pooling: DprimePooling,
) -> Option<f64> {
    assert_eq!(rb.n_states(), truth.n_states());
    let mut p_true = 0.0;
    let mut p_false = 0.0;
    let mut m1_true = 0.0;
    let mut m1_false = 0.0;
    for e in truth.states() {
        let v = rb.rb(e);
        p_true += truth.mass_h_true(e);
        p_false += truth.mass_h_false(e);
        m1_true += truth.mass_h_true(e) * v;
        m1_false += truth.mass_h_false(e) * v;
    }
    if p_true <= 0.0 || p_false <= 0.0 {
        return None;
    }
    let mean_true = m1_true / p_true;
    let mean_false = m1_false / p_false;
    // Second pass around the means; the one-pass m2 - mean^2 form loses
    // the variance entirely once the distribution is nearly degenerate.
    let mut var_true = 0.0;
    let mut var_false = 0.0;
    for e in truth.states() {
        let v = rb.rb(e);
        var_true += truth.mass_h_true(e) * (v - mean_true).powi(2);
        var_false += truth.mass_h_false(e) * (v - mean_false).powi(2);
    }
    var_true /= p_true;
    var_false /= p_false;
    let spread = match pooling {
        DprimePooling::Pooled => ((var_true + var_false) / 2.0).sqrt(),
        DprimePooling::AverageOfSds => (var_true.sqrt() + var_false.sqrt()) / 2.0,
    };
    if spread > DPRIME_SPREAD_FLOOR {
        Some((mean_true - mean_false) / spread)
    } else {
        None
    }
}

/// The z-score approximation to d' on renormalized per-decision rates.
/// `None` when nothing was decided or a rate sits on the 0/1 boundary,
/// where the z-score diverges.
pub fn dprime_z_diagnostic(pe: f64, pc: f64) -> Option<f64> {
    let total = pe + pc;
    if total <= 0.0 {
        return None;
    }
    let pe_rate = pe / total;
    let pc_rate = pc / total;
    if pe_rate <= 0.0 || pc_rate <= 0.0 {
        return None;
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Some(normal.inverse_cdf(1.0 - pe_rate) + normal.inverse_cdf(pc_rate))
}

/// `z(1 - pe) + z(pc)` on raw decision masses. Applied to the
/// run-aggregated error and correct masses this is the tabled sensitivity
/// statistic; `None` outside the open unit interval where z diverges.
pub fn dprime_z_form(pe: f64, pc: f64) -> Option<f64> {
    if pe <= 0.0 || pe >= 1.0 || pc <= 0.0 || pc >= 1.0 {
        return None;
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Some(normal.inverse_cdf(1.0 - pe) + normal.inverse_cdf(pc))
}

/// All measures for one (procedure, case) pair.
pub fn evaluate(
    rb: &RelativeBeliefTable,
    truth: &EvidenceDecomposition,
    thresholds: DecisionThresholds,
    pooling: DprimePooling,
) -> MetricRecord {
    let (pe, pc) = pe_pc(rb, truth, thresholds);
    MetricRecord {
        mse: expected_mse(rb, truth),
        min_mse: min_possible_mse(truth),
        pe,
        pc,
        re: relative_error(pe, pc),
        dprime: dprime(rb, truth, pooling),
        dprime_z: dprime_z_diagnostic(pe, pc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ChainParameters, JointDistribution, Topology};
    use crate::noise::{perturb_marginalized, ErrorRange};
    use crate::procedures::{proper_bayes, Procedure};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Bare table constructor for fixtures.
    fn table(values: Vec<f64>) -> RelativeBeliefTable {
        RelativeBeliefTable::from_values(Procedure::ProperBayes, values)
    }

    /// H with one evidence node: prior .6, P(A=T|H=F)=.2, P(A=T|H=T)=.7.
    /// Evidential masses: A=F -> .5 with posterior .36, A=T -> .5 with .84.
    fn one_evidence_fixture() -> (Topology, EvidenceDecomposition) {
        let topo = Topology::with_evidence(1);
        let chain = ChainParameters::new(vec![vec![0.6], vec![0.2, 0.7]]);
        let truth = chain.to_joint().decompose(&topo);
        (topo, truth)
    }

    #[test]
    fn flat_one_half_table_scores_one_quarter() {
        let topo = Topology::prototypical();
        let truth = ChainParameters::sample(&mut rng(1), &topo)
            .to_joint()
            .decompose(&topo);
        let rb = table(vec![0.5; 16]);
        assert!((expected_mse(&rb, &truth) - 0.25).abs() < 1e-12);
        let (pe, pc) = pe_pc(&rb, &truth, DecisionThresholds::default());
        assert_eq!((pe, pc), (0.0, 0.0));
        assert_eq!(relative_error(pe, pc), None);
        assert_eq!(dprime(&rb, &truth, DprimePooling::Pooled), None);
        assert_eq!(dprime_z_diagnostic(pe, pc), None);
    }

    #[test]
    fn true_posterior_achieves_the_floor() {
        let topo = Topology::prototypical();
        for seed in 0..20 {
            let joint = ChainParameters::sample(&mut rng(seed), &topo).to_joint();
            let truth = joint.decompose(&topo);
            let rb = table(
                joint
                    .posterior_table(&topo)
                    .into_iter()
                    .map(|p| p.unwrap())
                    .collect(),
            );
            let mse = expected_mse(&rb, &truth);
            let floor = min_possible_mse(&truth);
            assert!((mse - floor).abs() < 1e-12);
        }
    }

    #[test]
    fn one_evidence_fixture_matches_brute_force() {
        let (_, truth) = one_evidence_fixture();
        let rb = table(vec![0.3, 0.9]);

        // Brute force over all (world state, hypothesis) outcomes.
        let masses = [(0.32, false, 0), (0.18, true, 0), (0.08, false, 1), (0.42, true, 1)];
        let brute: f64 = masses
            .iter()
            .map(|&(m, h, e)| {
                let v = rb.values()[e];
                let outcome = if h { 1.0 } else { 0.0 };
                m * (outcome - v).powi(2)
            })
            .sum();
        let mse = expected_mse(&rb, &truth);
        assert!((mse - brute).abs() < 1e-12);
        assert!((mse - 0.186).abs() < 1e-9);

        assert!((min_possible_mse(&truth) - 0.1824).abs() < 1e-9);

        let (pe, pc) = pe_pc(&rb, &truth, DecisionThresholds::default());
        assert!((pe - 0.26).abs() < 1e-12);
        assert!((pc - 0.74).abs() < 1e-12);
        assert!((relative_error(pe, pc).unwrap() - 0.26).abs() < 1e-12);

        // Conditional moments by hand: means .72 vs .42, variances
        // .0756 vs .0576.
        let pooled = dprime(&rb, &truth, DprimePooling::Pooled).unwrap();
        let expected_pooled = 0.3 / ((0.0756f64 + 0.0576) / 2.0).sqrt();
        assert!((pooled - expected_pooled).abs() < 1e-9);

        let averaged = dprime(&rb, &truth, DprimePooling::AverageOfSds).unwrap();
        let expected_avg = 0.3 / ((0.0756f64.sqrt() + 0.0576f64.sqrt()) / 2.0);
        assert!((averaged - expected_avg).abs() < 1e-9);
        assert!(pooled != averaged);

        // z(1-Pe') + z(Pc') with Pe'=.26: 2 * z(.74) ~ 1.2867.
        let z = dprime_z_diagnostic(pe, pc).unwrap();
        assert!((z - 1.2867).abs() < 1e-3);
    }

    #[test]
    fn deterministic_truth_with_true_posterior_decides_everything() {
        let topo = Topology::with_evidence(1);
        let joint = JointDistribution::from_masses(vec![0.5, 0.0, 0.0, 0.5]);
        let truth = joint.decompose(&topo);
        let rb = table(vec![0.0, 1.0]);
        let (pe, pc) = pe_pc(&rb, &truth, DecisionThresholds::default());
        assert_eq!((pe, pc), (0.0, 1.0));
        assert_eq!(relative_error(pe, pc), Some(0.0));
        assert!((min_possible_mse(&truth) - 0.0).abs() < 1e-15);
        assert!((expected_mse(&rb, &truth) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn equal_error_mass_gives_one_half() {
        assert_eq!(relative_error(0.2, 0.2), Some(0.5));
        assert_eq!(relative_error(0.0, 1.0), Some(0.0));
        assert_eq!(relative_error(0.0, 0.0), None);
    }

    #[test]
    fn boundary_relative_beliefs_decide_nothing() {
        let (_, truth) = one_evidence_fixture();
        let thresholds = DecisionThresholds::default();
        let rb = table(vec![thresholds.lower(), thresholds.upper()]);
        let (pe, pc) = pe_pc(&rb, &truth, thresholds);
        assert_eq!((pe, pc), (0.0, 0.0));
    }

    #[test]
    fn uniform_truth_floor_is_one_quarter() {
        let topo = Topology::prototypical();
        let chain = ChainParameters::new((0..5).map(|k| vec![0.5; 1 << k]).collect());
        let truth = chain.to_joint().decompose(&topo);
        assert!((min_possible_mse(&truth) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn random_tables_average_one_third_mse() {
        // For any truth, a uniformly random relative belief has expected
        // Brier score 1/3; seeded sampling over the rb-randomness.
        let topo = Topology::prototypical();
        let truth = ChainParameters::sample(&mut rng(2), &topo)
            .to_joint()
            .decompose(&topo);
        let mut r = rng(3);
        let n = 50_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let rb = table((0..16).map(|_| r.random::<f64>()).collect());
            sum += expected_mse(&rb, &truth);
        }
        assert!((sum / n as f64 - 1.0 / 3.0).abs() < 0.005);
    }

    #[test]
    fn mse_never_beats_the_floor() {
        let topo = Topology::prototypical();
        let mut r = rng(4);
        for _ in 0..200 {
            let truth_chain = ChainParameters::sample(&mut r, &topo);
            let truth = truth_chain.to_joint().decompose(&topo);
            let model = perturb_marginalized(&truth_chain, ErrorRange::new(1.0), &mut r);
            let rb = proper_bayes(&model, &topo);
            let record = evaluate(
                &rb,
                &truth,
                DecisionThresholds::default(),
                DprimePooling::Pooled,
            );
            assert!(record.mse >= record.min_mse - 1e-12);
            assert!(record.pe + record.pc <= 1.0 + 1e-12);
            if let Some(re) = record.re {
                assert!((re - record.pe / (record.pe + record.pc)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn widening_thresholds_never_increases_decision_mass() {
        let topo = Topology::prototypical();
        let mut r = rng(5);
        let narrow = DecisionThresholds::new(0.35, 0.65).unwrap();
        let wide = DecisionThresholds::new(0.2, 0.8).unwrap();
        for _ in 0..200 {
            let truth_chain = ChainParameters::sample(&mut r, &topo);
            let truth = truth_chain.to_joint().decompose(&topo);
            let rb = table((0..16).map(|_| r.random::<f64>()).collect());
            let (pe_n, pc_n) = pe_pc(&rb, &truth, narrow);
            let (pe_w, pc_w) = pe_pc(&rb, &truth, wide);
            assert!(pe_w <= pe_n + 1e-15);
            assert!(pc_w <= pc_n + 1e-15);
        }
    }

    #[test]
    fn dprime_positive_for_true_posterior() {
        let topo = Topology::prototypical();
        let mut r = rng(6);
        for _ in 0..100 {
            let joint = ChainParameters::sample(&mut r, &topo).to_joint();
            let truth = joint.decompose(&topo);
            let rb = table(
                joint
                    .posterior_table(&topo)
                    .into_iter()
                    .map(|p| p.unwrap())
                    .collect(),
            );
            let d = dprime(&rb, &truth, DprimePooling::Pooled).unwrap();
            assert!(d > 0.0);
        }
    }

    #[test]
    fn threshold_validation() {
        assert!(DecisionThresholds::new(0.35, 0.65).is_ok());
        assert!(DecisionThresholds::new(0.65, 0.35).is_err());
        assert!(DecisionThresholds::new(0.0, 0.65).is_err());
        assert!(DecisionThresholds::new(0.35, 1.0).is_err());
        let d = DecisionThresholds::default();
        assert_eq!((d.lower(), d.upper()), (0.35, 0.65));
    }
}
