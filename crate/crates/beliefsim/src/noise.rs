//! Calibration-error models: how an assessor's belief values drift away
//! from the true probabilities.
//!
//! Every regime perturbs probabilities through the same clipped-uniform
//! window ([`perturb_value`]); they differ in *which* quantities get the
//! error and in which direction the generative arrow points.

use rand::Rng;

use crate::model::{ChainParameters, JointDistribution, Topology, PROB_CEIL, PROB_FLOOR};

/// Full width of the uniform error window. Zero means the assessor is
/// perfectly calibrated and belief equals truth exactly.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ErrorRange(f64);

impl ErrorRange {
    pub const ZERO: ErrorRange = ErrorRange(0.0);

    pub fn new(range: f64) -> Self {
        assert!(range >= 0.0 && range.is_finite(), "range must be >= 0");
        ErrorRange(range)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// How the belief values were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Every chain entry of the true model is perturbed; all procedure
    /// inputs are marginals of the resulting coherent belief joint.
    Marginalized,
    /// The simple-procedure inputs (prior, per-evidence likelihoods) are
    /// perturbed directly from their true values; the chain entries are
    /// perturbed separately for the full-joint procedure.
    Direct,
    /// Beliefs are primary and truth is derived: each belief level maps to
    /// an effective true proportion via the same error window.
    Frequency,
}

/// `B(x=T | H=T)` and `B(x=T | H=F)` for one evidence variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodPair {
    pub given_true: f64,
    pub given_false: f64,
}

/// The inputs consumed by every procedure except the full-joint one:
/// a prior on the hypothesis plus one likelihood pair per evidence
/// variable (ascending variable order).
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleInputs {
    pub prior: f64,
    pub likelihoods: Vec<LikelihoodPair>,
}

/// A perturbed counterpart of a true model: the source of every
/// procedure input for one simulated case.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefModel {
    regime: Regime,
    chain: ChainParameters,
    direct: Option<SimpleInputs>,
}

impl BeliefModel {
    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The belief chain (perturbed, except under [`Regime::Frequency`]
    /// where beliefs are primary).
    pub fn chain(&self) -> &ChainParameters {
        &self.chain
    }

    /// The coherent belief joint implied by the chain.
    pub fn joint(&self) -> JointDistribution {
        self.chain.to_joint()
    }

    /// Directly assessed inputs, present only under [`Regime::Direct`].
    pub fn direct_inputs(&self) -> Option<&SimpleInputs> {
        self.direct.as_ref()
    }

    /// Prior and likelihoods as the simple procedures see them: the stored
    /// direct assessments when present, otherwise marginals of the belief
    /// joint.
    pub fn simple_inputs(&self, topology: &Topology) -> SimpleInputs {
        match &self.direct {
            Some(inputs) => inputs.clone(),
            None => derive_simple_inputs(&self.joint(), topology),
        }
    }
}

/// Marginalizes a joint down to the simple-procedure inputs.
pub fn derive_simple_inputs(joint: &JointDistribution, topology: &Topology) -> SimpleInputs {
    let h = topology.hypothesis();
    let prior = joint
        .marginal(&[(h, true)], &[])
        .expect("total mass is positive");
    let likelihoods = topology
        .evidence_vars()
        .iter()
        .map(|x| LikelihoodPair {
            given_true: joint
                .marginal(&[(*x, true)], &[(h, true)])
                .expect("hypothesis mass is positive"),
            given_false: joint
                .marginal(&[(*x, true)], &[(h, false)])
                .expect("hypothesis mass is positive"),
        })
        .collect();
    SimpleInputs { prior, likelihoods }
}

/// Draws a belief value uniformly from the error window around `p`:
/// `[max(0.00001, p - range/2), min(0.99999, p + range/2)]`.
///
/// A zero-width window returns `p` exactly. If `p` lies outside the clamp
/// band and the window is too narrow to reach back in (empty window), `p`
/// passes through unchanged. One random draw is consumed no matter which
/// branch is taken, so parallel streams stay aligned across ranges.
pub fn perturb_value<R: Rng + ?Sized>(p: f64, range: ErrorRange, rng: &mut R) -> f64 {
    let half = range.value() / 2.0;
    let lo = PROB_FLOOR.max(p - half);
    let hi = PROB_CEIL.min(p + half);
    let u: f64 = rng.random();
    if lo > hi {
        p
    } else {
        lo + (hi - lo) * u
    }
}

/// Perturbs every chain entry of the true model independently. The belief
/// joint stays coherent because the error is applied in chain form.
pub fn perturb_marginalized<R: Rng + ?Sized>(
    truth: &ChainParameters,
    range: ErrorRange,
    rng: &mut R,
) -> BeliefModel {
    BeliefModel {
        regime: Regime::Marginalized,
        chain: truth.map_values(|p| perturb_value(p, range, rng)),
        direct: None,
    }
}

/// Perturbs the quantities an assessor would state directly: the chain
/// entries (consumed by the full-joint procedure), then the true prior and
/// the true per-evidence likelihoods, each computed exactly from the true
/// joint before receiving its own independent error.
pub fn perturb_direct<R: Rng + ?Sized>(
    truth: &ChainParameters,
    topology: &Topology,
    range: ErrorRange,
    rng: &mut R,
) -> BeliefModel {
    let chain = truth.map_values(|p| perturb_value(p, range, rng));
    let true_inputs = derive_simple_inputs(&truth.to_joint(), topology);
    let prior = perturb_value(true_inputs.prior, range, rng);
    let likelihoods = true_inputs
        .likelihoods
        .iter()
        .map(|pair| LikelihoodPair {
            given_true: perturb_value(pair.given_true, range, rng),
            given_false: perturb_value(pair.given_false, range, rng),
        })
        .collect();
    BeliefModel {
        regime: Regime::Direct,
        chain,
        direct: Some(SimpleInputs { prior, likelihoods }),
    }
}

/// Reverses the generative arrow: `beliefs` is primary, and the returned
/// chain is the *effective truth* — the proportion of true propositions at
/// each belief level, one window draw away from the stated belief. The
/// effective-truth joint is what every error measure is scored against.
pub fn perturb_frequency<R: Rng + ?Sized>(
    beliefs: &ChainParameters,
    range: ErrorRange,
    rng: &mut R,
) -> (BeliefModel, ChainParameters) {
    let effective_truth = beliefs.map_values(|b| perturb_value(b, range, rng));
    let model = BeliefModel {
        regime: Regime::Frequency,
        chain: beliefs.clone(),
        direct: None,
    };
    (model, effective_truth)
}
