//! The five point-valued inference procedures.
//!
//! Each maps a belief model to a relative-belief value `RB(H=T)` for every
//! evidential state — the procedure's stand-in for a posterior. The
//! full-joint procedure reads the whole belief chain; the other four see
//! only the prior and per-evidence likelihood pairs, so any difference in
//! their output comes from how those same inputs are aggregated.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{EvidentialState, Topology};
use crate::noise::{BeliefModel, LikelihoodPair, SimpleInputs};

/// Stable identifiers for the procedures, in the column order used by the
/// result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    SimpleLinear,
    StrongLinear,
    NaiveBayes,
    StrongNaiveBayes,
    ProperBayes,
}

impl Procedure {
    pub const ALL: [Procedure; 5] = [
        Procedure::SimpleLinear,
        Procedure::StrongLinear,
        Procedure::NaiveBayes,
        Procedure::StrongNaiveBayes,
        Procedure::ProperBayes,
    ];

    /// Machine identifier used on the CLI and in CSV headers.
    pub fn id(self) -> &'static str {
        match self {
            Procedure::SimpleLinear => "simple_linear",
            Procedure::StrongLinear => "strong_linear",
            Procedure::NaiveBayes => "naive_bayes",
            Procedure::StrongNaiveBayes => "strong_naive_bayes",
            Procedure::ProperBayes => "proper_bayes",
        }
    }

    /// Human heading for rendered tables.
    pub fn table_label(self) -> &'static str {
        match self {
            Procedure::SimpleLinear => "Simple Linear",
            Procedure::StrongLinear => "Strong Linear",
            Procedure::NaiveBayes => "Naive Bayes",
            Procedure::StrongNaiveBayes => "Strong Bayes",
            Procedure::ProperBayes => "Proper Bayes",
        }
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Procedure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Procedure::ALL
            .iter()
            .copied()
            .find(|p| p.id() == s)
            .ok_or_else(|| format!("unknown procedure '{s}'"))
    }
}

/// Whether the strong-naive drop test looks at the likelihood ratio of the
/// value observed in the current state, or once per item at its x=T ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropRule {
    #[default]
    PerObservedValue,
    PerItem,
}

impl FromStr for DropRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per_observed_value" => Ok(DropRule::PerObservedValue),
            "per_item" => Ok(DropRule::PerItem),
            _ => Err(format!("unknown drop rule '{s}'")),
        }
    }
}

/// `B(x=v | H=T) / B(x=v | H=F)` for the observed value `v` of one
/// evidence item. Positive as long as the likelihoods are interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodRatio(f64);

impl LikelihoodRatio {
    pub fn observed(pair: LikelihoodPair, observed: bool) -> Self {
        let ratio = if observed {
            pair.given_true / pair.given_false
        } else {
            (1.0 - pair.given_true) / (1.0 - pair.given_false)
        };
        debug_assert!(ratio > 0.0);
        LikelihoodRatio(ratio)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// One procedure's `RB(H=T)` per evidential state, indexed by packed
/// evidence bits.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeBeliefTable {
    procedure: Procedure,
    rb: Vec<f64>,
}

impl RelativeBeliefTable {
    fn new(procedure: Procedure, rb: Vec<f64>) -> Self {
        debug_assert!(rb.iter().all(|v| (0.0..=1.0).contains(v)));
        RelativeBeliefTable { procedure, rb }
    }

    /// Wraps explicit values (one per evidential state, packed-bit order).
    /// Panics when a value leaves [0, 1].
    pub fn from_values(procedure: Procedure, rb: Vec<f64>) -> Self {
        assert!(rb.iter().all(|v| (0.0..=1.0).contains(v)));
        RelativeBeliefTable { procedure, rb }
    }

    pub fn procedure(&self) -> Procedure {
        self.procedure
    }

    pub fn n_states(&self) -> usize {
        self.rb.len()
    }

    pub fn rb(&self, state: EvidentialState) -> f64 {
        self.rb[state.bits()]
    }

    pub fn values(&self) -> &[f64] {
        &self.rb
    }
}

/// Exact posterior of the belief joint: `RB(H=T | state)` is the belief
/// mass of `H=T` conjoined with the state over the state's total belief
/// mass, with any latent variable summed out of both.
pub fn proper_bayes(model: &BeliefModel, topology: &Topology) -> RelativeBeliefTable {
    let decomposition = model.joint().decompose(topology);
    let rb = topology
        .evidential_states()
        .map(|e| {
            decomposition
                .posterior(e)
                .expect("belief joint has positive mass on every state")
        })
        .collect();
    RelativeBeliefTable::new(Procedure::ProperBayes, rb)
}

fn naive_core(
    inputs: &SimpleInputs,
    topology: &Topology,
    mut keep: impl FnMut(usize, LikelihoodPair, bool) -> bool,
    procedure: Procedure,
) -> RelativeBeliefTable {
    let rb = topology
        .evidential_states()
        .map(|state| {
            let mut num = inputs.prior;
            let mut den = 1.0 - inputs.prior;
            for (j, pair) in inputs.likelihoods.iter().enumerate() {
                let observed = state.observed(j);
                if !keep(j, *pair, observed) {
                    continue;
                }
                if observed {
                    num *= pair.given_true;
                    den *= pair.given_false;
                } else {
                    num *= 1.0 - pair.given_true;
                    den *= 1.0 - pair.given_false;
                }
            }
            num / (num + den)
        })
        .collect();
    RelativeBeliefTable::new(procedure, rb)
}

/// Two-term product formula under conditional independence of the evidence
/// given the hypothesis.
pub fn naive_bayes(model: &BeliefModel, topology: &Topology) -> RelativeBeliefTable {
    naive_bayes_from(&model.simple_inputs(topology), topology)
}

pub fn naive_bayes_from(inputs: &SimpleInputs, topology: &Topology) -> RelativeBeliefTable {
    naive_core(inputs, topology, |_, _, _| true, Procedure::NaiveBayes)
}

/// Naive Bayes that ignores weak evidence: an item contributes no factor
/// when its likelihood ratio lies strictly inside (2/3, 3/2). If every
/// item is dropped the prior term is all that remains.
pub fn strong_naive_bayes(
    model: &BeliefModel,
    topology: &Topology,
    rule: DropRule,
) -> RelativeBeliefTable {
    strong_naive_bayes_from(&model.simple_inputs(topology), topology, rule)
}

pub fn strong_naive_bayes_from(
    inputs: &SimpleInputs,
    topology: &Topology,
    rule: DropRule,
) -> RelativeBeliefTable {
    let weak = |lr: f64| lr > 2.0 / 3.0 && lr < 1.5;
    naive_core(
        inputs,
        topology,
        |_, pair, observed| match rule {
            DropRule::PerObservedValue => !weak(LikelihoodRatio::observed(pair, observed).value()),
            DropRule::PerItem => !weak(LikelihoodRatio::observed(pair, true).value()),
        },
        Procedure::StrongNaiveBayes,
    )
}

fn linear_core(
    inputs: &SimpleInputs,
    topology: &Topology,
    prior_vote: impl Fn(f64) -> i32,
    lr_vote: impl Fn(f64) -> i32,
    procedure: Procedure,
) -> RelativeBeliefTable {
    let rb = topology
        .evidential_states()
        .map(|state| {
            let mut score = prior_vote(inputs.prior);
            for (j, pair) in inputs.likelihoods.iter().enumerate() {
                let lr = LikelihoodRatio::observed(*pair, state.observed(j));
                score += lr_vote(lr.value());
            }
            (score + 5) as f64 / 10.0
        })
        .collect();
    RelativeBeliefTable::new(procedure, rb)
}

fn vote(value: f64, up: f64, down: f64) -> i32 {
    if value > up {
        1
    } else if value < down {
        -1
    } else {
        0
    }
}

/// Adds pros and cons with equal weights: one vote for the prior side of
/// 0.5 and one per evidence item for the side of its likelihood ratio,
/// normalized as `(score + 5) / 10`.
pub fn simple_linear(model: &BeliefModel, topology: &Topology) -> RelativeBeliefTable {
    simple_linear_from(&model.simple_inputs(topology), topology)
}

pub fn simple_linear_from(inputs: &SimpleInputs, topology: &Topology) -> RelativeBeliefTable {
    linear_core(
        inputs,
        topology,
        |prior| vote(prior, 0.5, 0.5),
        |lr| vote(lr, 1.0, 1.0),
        Procedure::SimpleLinear,
    )
}

/// Equal-weights voting with deadbands: the prior only votes outside
/// [0.3, 0.7] and an item only votes when its likelihood ratio leaves
/// [2/3, 3/2].
pub fn strong_linear(model: &BeliefModel, topology: &Topology) -> RelativeBeliefTable {
    strong_linear_from(&model.simple_inputs(topology), topology)
}

pub fn strong_linear_from(inputs: &SimpleInputs, topology: &Topology) -> RelativeBeliefTable {
    linear_core(
        inputs,
        topology,
        |prior| vote(prior, 0.7, 0.3),
        |lr| vote(lr, 1.5, 2.0 / 3.0),
        Procedure::StrongLinear,
    )
}

/// Runs one procedure against a belief model.
pub fn evaluate(
    procedure: Procedure,
    model: &BeliefModel,
    topology: &Topology,
    drop_rule: DropRule,
) -> RelativeBeliefTable {
    match procedure {
        Procedure::ProperBayes => proper_bayes(model, topology),
        Procedure::NaiveBayes => naive_bayes(model, topology),
        Procedure::StrongNaiveBayes => strong_naive_bayes(model, topology, drop_rule),
        Procedure::SimpleLinear => simple_linear(model, topology),
        Procedure::StrongLinear => strong_linear(model, topology),
    }
}

/// Runs several procedures against the same model, deriving the shared
/// simple inputs once.
pub fn evaluate_all(
    procedures: &[Procedure],
    model: &BeliefModel,
    topology: &Topology,
    drop_rule: DropRule,
) -> Vec<(Procedure, RelativeBeliefTable)> {
    let inputs = model.simple_inputs(topology);
    procedures
        .iter()
        .map(|p| {
            let table = match p {
                Procedure::ProperBayes => proper_bayes(model, topology),
                Procedure::NaiveBayes => naive_bayes_from(&inputs, topology),
                Procedure::StrongNaiveBayes => {
                    strong_naive_bayes_from(&inputs, topology, drop_rule)
                }
                Procedure::SimpleLinear => simple_linear_from(&inputs, topology),
                Procedure::StrongLinear => strong_linear_from(&inputs, topology),
            };
            (*p, table)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChainParameters;
    use crate::noise::{perturb_marginalized, ErrorRange};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn uniform_model(topology: &Topology) -> BeliefModel {
        let chain = ChainParameters::new(
            (0..topology.n_vars())
                .map(|k| vec![0.5; 1 << k])
                .collect(),
        );
        perturb_marginalized(&chain, ErrorRange::ZERO, &mut rng(0))
    }

    fn random_model(topology: &Topology, seed: u64) -> BeliefModel {
        let truth = ChainParameters::sample(&mut rng(seed), topology);
        perturb_marginalized(&truth, ErrorRange::new(0.6), &mut rng(seed + 1))
    }

    fn inputs(prior: f64, pairs: &[(f64, f64)]) -> SimpleInputs {
        SimpleInputs {
            prior,
            likelihoods: pairs
                .iter()
                .map(|&(t, f)| LikelihoodPair {
                    given_true: t,
                    given_false: f,
                })
                .collect(),
        }
    }

    /// Pairs picked so the observed-value likelihood ratios for the
    /// all-true state are 2.0, 0.5, 1.2, 0.9.
    fn mixed_pairs() -> Vec<(f64, f64)> {
        vec![(0.8, 0.4), (0.3, 0.6), (0.6, 0.5), (0.45, 0.5)]
    }

    #[test]
    fn procedure_ids_round_trip() {
        for p in Procedure::ALL {
            assert_eq!(p.id().parse::<Procedure>().unwrap(), p);
        }
        assert!("bogus".parse::<Procedure>().is_err());
    }

    #[test]
    fn proper_bayes_uniform_chain_is_one_half() {
        let topo = Topology::prototypical();
        let table = proper_bayes(&uniform_model(&topo), &topo);
        assert_eq!(table.n_states(), 16);
        for &v in table.values() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn proper_bayes_matches_posterior_table() {
        for topo in [Topology::prototypical(), Topology::hierarchical()] {
            let model = random_model(&topo, 2);
            let table = proper_bayes(&model, &topo);
            let posterior = model.joint().posterior_table(&topo);
            for e in topo.evidential_states() {
                assert!((table.rb(e) - posterior[e.bits()].unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn naive_bayes_flat_inputs_give_one_half() {
        let topo = Topology::prototypical();
        let table = naive_bayes_from(&inputs(0.5, &[(0.5, 0.5); 4]), &topo);
        for &v in table.values() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn naive_bayes_single_evidence_hand_arithmetic() {
        // prior .6, B(A=T|H=T)=.8, B(A=T|H=F)=.4, state A=T:
        // rb = .6*.8 / (.6*.8 + .4*.4) = 0.75
        let topo = Topology::with_evidence(1);
        let table = naive_bayes_from(&inputs(0.6, &[(0.8, 0.4)]), &topo);
        let state_true = EvidentialState::from_bits(1);
        assert!((table.rb(state_true) - 0.75).abs() < 1e-12);
        // state A=F uses the complements: .6*.2 / (.6*.2 + .4*.6) = 1/3
        let state_false = EvidentialState::from_bits(0);
        assert!((table.rb(state_false) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn naive_equals_proper_under_conditional_independence() {
        // A chain whose deeper entries ignore every parent except the
        // hypothesis makes the evidence conditionally independent given H,
        // which is exactly the naive assumption.
        let topo = Topology::prototypical();
        let mut r = rng(3);
        for _ in 0..20 {
            let per_var: Vec<[f64; 2]> = (0..5)
                .map(|_| {
                    [
                        0.05 + 0.9 * r.random::<f64>(),
                        0.05 + 0.9 * r.random::<f64>(),
                    ]
                })
                .collect();
            let entries: Vec<Vec<f64>> = (0..5usize)
                .map(|k| {
                    (0..1usize << k)
                        .map(|context| per_var[k][context & 1])
                        .collect()
                })
                .collect();
            let chain = ChainParameters::new(entries);
            let model = perturb_marginalized(&chain, ErrorRange::ZERO, &mut rng(4));
            let naive = naive_bayes(&model, &topo);
            let proper = proper_bayes(&model, &topo);
            for e in topo.evidential_states() {
                assert!((naive.rb(e) - proper.rb(e)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn strong_naive_prior_only_fallback() {
        // Every likelihood ratio inside (2/3, 3/2) in both observed
        // directions: all items dropped, rb equals the prior.
        let topo = Topology::prototypical();
        let table = strong_naive_bayes_from(
            &inputs(0.7, &[(0.55, 0.5); 4]),
            &topo,
            DropRule::PerObservedValue,
        );
        for &v in table.values() {
            assert!((v - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn strong_naive_boundary_ratio_is_retained() {
        // LR exactly 3/2 is not strictly inside the band, so the item
        // still votes: rb must differ from the prior.
        let topo = Topology::with_evidence(1);
        let table = strong_naive_bayes_from(
            &inputs(0.5, &[(0.75, 0.5)]),
            &topo,
            DropRule::PerObservedValue,
        );
        let state_true = EvidentialState::from_bits(1);
        assert!((table.rb(state_true) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn strong_naive_matches_naive_on_reduced_evidence() {
        // Items 3 and 4 sit inside the band for the all-true state; the
        // strong variant there must equal naive Bayes run on items 1-2.
        let topo = Topology::prototypical();
        let all = inputs(0.6, &mixed_pairs());
        let strong = strong_naive_bayes_from(&all, &topo, DropRule::PerObservedValue);

        let reduced_topo = Topology::with_evidence(2);
        let reduced = naive_bayes_from(&inputs(0.6, &mixed_pairs()[..2]), &reduced_topo);

        let all_true = EvidentialState::from_bits(0b1111);
        let reduced_true = EvidentialState::from_bits(0b11);
        assert!((strong.rb(all_true) - reduced.rb(reduced_true)).abs() < 1e-12);
    }

    #[test]
    fn per_item_drop_rule_ignores_observed_value() {
        // given_true=.9, given_false=.8: the x=T ratio 1.125 is weak but
        // the x=F ratio .1/.2 = 0.5 is strong. The observed-value rule
        // keeps the item when x=F; the per-item rule drops it everywhere.
        let topo = Topology::with_evidence(1);
        let strong_inputs = inputs(0.5, &[(0.9, 0.8)]);
        let observed_rule =
            strong_naive_bayes_from(&strong_inputs, &topo, DropRule::PerObservedValue);
        let item_rule = strong_naive_bayes_from(&strong_inputs, &topo, DropRule::PerItem);
        let state_false = EvidentialState::from_bits(0);
        let state_true = EvidentialState::from_bits(1);
        // Kept item at x=F: rb = .5*.1 / (.5*.1 + .5*.2) = 1/3.
        assert!((observed_rule.rb(state_false) - 1.0 / 3.0).abs() < 1e-12);
        assert!((observed_rule.rb(state_true) - 0.5).abs() < 1e-12);
        assert!((item_rule.rb(state_false) - 0.5).abs() < 1e-12);
        assert!((item_rule.rb(state_true) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn simple_linear_vote_arithmetic() {
        // prior .8 (+1); observed LRs 2.0 (+1), 0.5 (-1), 1.2 (+1),
        // 0.9 (-1) -> score 1 -> rb 0.6.
        let topo = Topology::prototypical();
        let table = simple_linear_from(&inputs(0.8, &mixed_pairs()), &topo);
        let all_true = EvidentialState::from_bits(0b1111);
        assert!((table.rb(all_true) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn simple_linear_tie_case() {
        let topo = Topology::prototypical();
        let table = simple_linear_from(&inputs(0.5, &[(0.5, 0.5); 4]), &topo);
        for &v in table.values() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn simple_linear_untied_votes_land_on_even_grid() {
        // With no ties the five votes sum to an odd score in
        // {-5,-3,-1,1,3,5}, so rb lands on {0, .2, .4, .6, .8, 1}.
        let topo = Topology::prototypical();
        let mut r = rng(5);
        for _ in 0..200 {
            let model = random_model(&topo, r.random::<u64>());
            let table = simple_linear(&model, &topo);
            for &v in table.values() {
                let scaled = v * 10.0;
                assert!((scaled - scaled.round()).abs() < 1e-9);
                assert_eq!(scaled.round() as i64 % 2, 0, "odd grid point {v}");
            }
        }
    }

    #[test]
    fn all_vote_patterns_enumerate_the_even_grid() {
        // Drive the five votes through every untied pattern and check the
        // normalized outputs cover exactly {0, .2, .4, .6, .8, 1}.
        let topo = Topology::with_evidence(4);
        let mut seen = std::collections::BTreeSet::new();
        for pattern in 0..32u32 {
            let prior = if pattern & 1 == 1 { 0.9 } else { 0.1 };
            let pairs: Vec<(f64, f64)> = (0..4)
                .map(|j| {
                    if pattern >> (j + 1) & 1 == 1 {
                        (0.8, 0.4)
                    } else {
                        (0.4, 0.8)
                    }
                })
                .collect();
            let table = simple_linear_from(&inputs(prior, &pairs), &topo);
            let all_true = EvidentialState::from_bits(0b1111);
            seen.insert((table.rb(all_true) * 10.0).round() as i64);
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![0, 2, 4, 6, 8, 10]);
    }

    #[test]
    fn strong_linear_deadband_arithmetic() {
        // prior .8 (+1); LRs 2.0 (+1), 0.5 (-1), 1.2 (0), 0.9 (0) -> 0.6.
        let topo = Topology::prototypical();
        let table = strong_linear_from(&inputs(0.8, &mixed_pairs()), &topo);
        let all_true = EvidentialState::from_bits(0b1111);
        assert!((table.rb(all_true) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn strong_linear_all_deadbands_give_one_half() {
        let topo = Topology::prototypical();
        let table = strong_linear_from(&inputs(0.5, &[(0.55, 0.5); 4]), &topo);
        for &v in table.values() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn strong_linear_vote_never_opposes_simple_vote() {
        // Wherever the strong variant votes on an item, the simple variant
        // votes the same way; inside [2/3, 3/2] the strong vote is 0.
        let mut r = rng(6);
        for _ in 0..10_000 {
            let lr: f64 = r.random::<f64>() * 3.0 + 1e-6;
            let simple = vote(lr, 1.0, 1.0);
            let strong = vote(lr, 1.5, 2.0 / 3.0);
            if (2.0 / 3.0..=1.5).contains(&lr) {
                assert_eq!(strong, 0);
            } else {
                assert_eq!(strong, simple);
            }
        }
    }

    #[test]
    fn hierarchical_linear_range_is_compressed() {
        // Three evidence items plus the prior bound the score by ±4, so
        // the verbatim (score+5)/10 normalization spans [0.1, 0.9].
        let topo = Topology::hierarchical();
        let mut r = rng(7);
        for _ in 0..100 {
            let model = random_model(&topo, r.random::<u64>());
            for table in [simple_linear(&model, &topo), strong_linear(&model, &topo)] {
                assert_eq!(table.n_states(), 8);
                for &v in table.values() {
                    assert!((0.1..=0.9).contains(&v));
                }
            }
        }
    }

    #[test]
    fn complement_symmetry_for_naive_bayes() {
        // Relabeling H=T <-> H=F in all inputs maps rb to 1 - rb.
        let topo = Topology::prototypical();
        let base = inputs(0.62, &mixed_pairs());
        let flipped = SimpleInputs {
            prior: 1.0 - base.prior,
            likelihoods: base
                .likelihoods
                .iter()
                .map(|p| LikelihoodPair {
                    given_true: p.given_false,
                    given_false: p.given_true,
                })
                .collect(),
        };
        let naive = naive_bayes_from(&base, &topo);
        let naive_flipped = naive_bayes_from(&flipped, &topo);
        for e in topo.evidential_states() {
            assert!((naive.rb(e) - (1.0 - naive_flipped.rb(e))).abs() < 1e-12);
        }
    }

    #[test]
    fn complement_symmetry_for_proper_bayes() {
        // Flip the hypothesis inside the chain: complement its prior and
        // swap the H bit in every conditioning context.
        let topo = Topology::prototypical();
        let truth = ChainParameters::sample(&mut rng(8), &topo);
        let entries: Vec<Vec<f64>> = (0..5usize)
            .map(|k| {
                if k == 0 {
                    vec![1.0 - truth.entry(crate::model::VariableId(0), 0)]
                } else {
                    (0..1usize << k)
                        .map(|context| truth.entry(crate::model::VariableId(k), context ^ 1))
                        .collect()
                }
            })
            .collect();
        let flipped = ChainParameters::new(entries);

        let model = perturb_marginalized(&truth, ErrorRange::ZERO, &mut rng(9));
        let flipped_model = perturb_marginalized(&flipped, ErrorRange::ZERO, &mut rng(9));
        let rb = proper_bayes(&model, &topo);
        let rb_flipped = proper_bayes(&flipped_model, &topo);
        for e in topo.evidential_states() {
            assert!((rb.rb(e) - (1.0 - rb_flipped.rb(e))).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluate_all_matches_individual_calls() {
        for topo in [Topology::prototypical(), Topology::hierarchical()] {
            let model = random_model(&topo, 11);
            let all = evaluate_all(
                &Procedure::ALL,
                &model,
                &topo,
                DropRule::PerObservedValue,
            );
            for (p, table) in all {
                let individual = evaluate(p, &model, &topo, DropRule::PerObservedValue);
                assert_eq!(table, individual);
            }
        }
    }
}
