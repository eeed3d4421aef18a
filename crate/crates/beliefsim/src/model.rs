//! Coherent discrete probability models over one hypothesis and its evidence.
//!
//! A model is a chain-factored joint distribution over binary variables:
//! the hypothesis first, then each remaining variable conditioned on all of
//! its predecessors. With at most five variables everything is computed by
//! exact enumeration over the bit-packed state table.

use rand::Rng;
use thiserror::Error;

/// Lower clamp bound for assessed probabilities.
pub const PROB_FLOOR: f64 = 0.00001;
/// Upper clamp bound for assessed probabilities.
pub const PROB_CEIL: f64 = 0.99999;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    /// The conditioning event has no probability mass, so the conditional
    /// is undefined. Callers count and skip these degenerate cases.
    #[error("conditioning event has zero probability mass")]
    ZeroConditioningMass,
}

/// What a variable contributes to the inference problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Hypothesis,
    Evidence,
    /// Present in the joint but never observed; summed out of every query.
    Latent,
}

/// Index of a variable in chain order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableId(pub usize);

/// One joint assignment of truth values to all variables, packed as bits
/// (bit `i` set means variable `i` is true).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WorldState(usize);

impl WorldState {
    pub fn from_bits(bits: usize) -> Self {
        WorldState(bits)
    }

    pub fn bits(self) -> usize {
        self.0
    }

    pub fn value(self, var: VariableId) -> bool {
        self.0 >> var.0 & 1 == 1
    }
}

/// One joint assignment of truth values to the evidence variables only,
/// packed as bits in ascending variable order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvidentialState(usize);

impl EvidentialState {
    pub fn from_bits(bits: usize) -> Self {
        EvidentialState(bits)
    }

    pub fn bits(self) -> usize {
        self.0
    }

    /// Value of the `j`-th evidence variable (ascending variable order).
    pub fn observed(self, j: usize) -> bool {
        self.0 >> j & 1 == 1
    }
}

/// Variable layout of an inference problem: which variable is the
/// hypothesis, which are observable evidence, and which stay latent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    roles: Vec<Role>,
    evidence: Vec<VariableId>,
}

impl Topology {
    /// One hypothesis followed by four evidence variables.
    pub fn prototypical() -> Self {
        Topology::new(vec![
            Role::Hypothesis,
            Role::Evidence,
            Role::Evidence,
            Role::Evidence,
            Role::Evidence,
        ])
    }

    /// Same five-variable chain, but the first non-hypothesis variable is
    /// latent: it shapes the joint yet is never observed, leaving three
    /// evidence variables.
    pub fn hierarchical() -> Self {
        Topology::new(vec![
            Role::Hypothesis,
            Role::Latent,
            Role::Evidence,
            Role::Evidence,
            Role::Evidence,
        ])
    }

    /// A hypothesis followed by `n_evidence` evidence variables. Small
    /// layouts built this way back the hand-arithmetic fixtures.
    pub fn with_evidence(n_evidence: usize) -> Self {
        let mut roles = vec![Role::Hypothesis];
        roles.extend(std::iter::repeat_n(Role::Evidence, n_evidence));
        Topology::new(roles)
    }

    fn new(roles: Vec<Role>) -> Self {
        let hypotheses = roles.iter().filter(|r| **r == Role::Hypothesis).count();
        assert_eq!(hypotheses, 1, "topology must have exactly one hypothesis");
        assert!(roles.len() <= usize::BITS as usize);
        let evidence = roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == Role::Evidence)
            .map(|(i, _)| VariableId(i))
            .collect();
        Topology { roles, evidence }
    }

    pub fn n_vars(&self) -> usize {
        self.roles.len()
    }

    pub fn n_states(&self) -> usize {
        1 << self.roles.len()
    }

    pub fn role(&self, var: VariableId) -> Role {
        self.roles[var.0]
    }

    pub fn hypothesis(&self) -> VariableId {
        let idx = self
            .roles
            .iter()
            .position(|r| *r == Role::Hypothesis)
            .expect("validated at construction");
        VariableId(idx)
    }

    /// Evidence variables in ascending index order.
    pub fn evidence_vars(&self) -> &[VariableId] {
        &self.evidence
    }

    pub fn n_evidence(&self) -> usize {
        self.evidence.len()
    }

    pub fn n_evidential_states(&self) -> usize {
        1 << self.evidence.len()
    }

    pub fn world_states(&self) -> impl Iterator<Item = WorldState> {
        (0..self.n_states()).map(WorldState::from_bits)
    }

    pub fn evidential_states(&self) -> impl Iterator<Item = EvidentialState> {
        (0..self.n_evidential_states()).map(EvidentialState::from_bits)
    }

    /// Projects a world state onto the evidence variables.
    pub fn evidential_of(&self, state: WorldState) -> EvidentialState {
        let mut bits = 0usize;
        for (j, var) in self.evidence.iter().enumerate() {
            if state.value(*var) {
                bits |= 1 << j;
            }
        }
        EvidentialState(bits)
    }

    /// The evidential state as a conjunction of (variable, value) literals.
    pub fn evidence_assignment(&self, state: EvidentialState) -> Vec<(VariableId, bool)> {
        self.evidence
            .iter()
            .enumerate()
            .map(|(j, var)| (*var, state.observed(j)))
            .collect()
    }

    /// Display letter: `H` for the hypothesis, `A`, `B`, ... for the rest
    /// in index order.
    pub fn name(&self, var: VariableId) -> char {
        if self.role(var) == Role::Hypothesis {
            return 'H';
        }
        let rank = (0..var.0)
            .filter(|i| self.roles[*i] != Role::Hypothesis)
            .count();
        (b'A' + rank as u8) as char
    }
}

/// The conditional probabilities that parameterize a chain-factored joint:
/// for variable `k`, one `P(var_k = T | predecessors)` value per assignment
/// of the `k` predecessors, indexed by their packed bits.
///
/// Five variables give 1 + 2 + 4 + 8 + 16 = 31 entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParameters {
    entries: Vec<Vec<f64>>,
}

impl ChainParameters {
    /// Wraps explicit conditional tables. Panics if the table for variable
    /// `k` does not have `2^k` rows or any value leaves `[0, 1]`.
    pub fn new(entries: Vec<Vec<f64>>) -> Self {
        for (k, table) in entries.iter().enumerate() {
            assert_eq!(table.len(), 1 << k, "variable {k} needs 2^{k} entries");
            for &p in table {
                assert!((0.0..=1.0).contains(&p) && p.is_finite());
            }
        }
        ChainParameters { entries }
    }

    /// Draws every conditional independently from the open unit interval,
    /// fully specifying a coherent joint over the topology's variables.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, topology: &Topology) -> Self {
        let entries = (0..topology.n_vars())
            .map(|k| (0..1usize << k).map(|_| open_unit(rng)).collect())
            .collect();
        ChainParameters { entries }
    }

    pub fn n_vars(&self) -> usize {
        self.entries.len()
    }

    pub fn n_entries(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }

    /// `P(var = T | predecessors = context)`, context packed as bits.
    pub fn entry(&self, var: VariableId, context: usize) -> f64 {
        self.entries[var.0][context]
    }

    /// All entries in chain order (variable ascending, context ascending).
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().flatten().copied()
    }

    /// Applies `f` to every entry in chain order. Used by the noise models,
    /// which rely on the deterministic visit order.
    pub fn map_values(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        ChainParameters {
            entries: self
                .entries
                .iter()
                .map(|table| table.iter().map(|&p| f(p)).collect())
                .collect(),
        }
    }

    /// Expands the chain into an explicit joint by the chain rule.
    pub fn to_joint(&self) -> JointDistribution {
        let n = self.n_vars();
        let mass = (0..1usize << n)
            .map(|state| {
                let mut m = 1.0;
                for (k, table) in self.entries.iter().enumerate() {
                    let context = state & ((1 << k) - 1);
                    let p = table[context];
                    m *= if state >> k & 1 == 1 { p } else { 1.0 - p };
                }
                m
            })
            .collect();
        JointDistribution { mass }
    }
}

/// Explicit probability table over all world states.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    mass: Vec<f64>,
}

impl JointDistribution {
    /// Wraps explicit masses; the length must be a power of two.
    pub fn from_masses(mass: Vec<f64>) -> Self {
        assert!(mass.len().is_power_of_two());
        assert!(mass.iter().all(|m| *m >= 0.0 && m.is_finite()));
        JointDistribution { mass }
    }

    pub fn n_vars(&self) -> usize {
        self.mass.len().trailing_zeros() as usize
    }

    pub fn mass(&self, state: WorldState) -> f64 {
        self.mass[state.bits()]
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    fn event_holds(state: usize, literals: &[(VariableId, bool)]) -> bool {
        literals.iter().all(|(var, v)| (state >> var.0 & 1 == 1) == *v)
    }

    /// `P(target | given)` where both events are conjunctions of literals.
    /// An empty `given` conditions on the whole space.
    pub fn marginal(
        &self,
        target: &[(VariableId, bool)],
        given: &[(VariableId, bool)],
    ) -> Result<f64, ModelError> {
        let mut joint = 0.0;
        let mut conditioning = 0.0;
        for (state, &m) in self.mass.iter().enumerate() {
            if Self::event_holds(state, given) {
                conditioning += m;
                if Self::event_holds(state, target) {
                    joint += m;
                }
            }
        }
        if conditioning <= 0.0 {
            return Err(ModelError::ZeroConditioningMass);
        }
        Ok(joint / conditioning)
    }

    /// Recovers chain parameters from the joint. Conditionals whose context
    /// has zero mass are undefined and reported as 0.5; everywhere else the
    /// chain -> joint -> chain round trip is exact up to rounding.
    pub fn to_chain(&self) -> ChainParameters {
        let n = self.n_vars();
        let entries = (0..n)
            .map(|k| {
                (0..1usize << k)
                    .map(|context| {
                        let mut matching = 0.0;
                        let mut var_true = 0.0;
                        for (state, &m) in self.mass.iter().enumerate() {
                            if state & ((1 << k) - 1) == context {
                                matching += m;
                                if state >> k & 1 == 1 {
                                    var_true += m;
                                }
                            }
                        }
                        if matching > 0.0 {
                            (var_true / matching).clamp(0.0, 1.0)
                        } else {
                            0.5
                        }
                    })
                    .collect()
            })
            .collect();
        ChainParameters::new(entries)
    }

    /// Splits the joint by evidential state and hypothesis value.
    pub fn decompose(&self, topology: &Topology) -> EvidenceDecomposition {
        assert_eq!(self.n_vars(), topology.n_vars());
        let h = topology.hypothesis();
        let mut mass_h_true = vec![0.0; topology.n_evidential_states()];
        let mut mass_h_false = vec![0.0; topology.n_evidential_states()];
        for state in topology.world_states() {
            let e = topology.evidential_of(state).bits();
            if state.value(h) {
                mass_h_true[e] += self.mass(state);
            } else {
                mass_h_false[e] += self.mass(state);
            }
        }
        EvidenceDecomposition {
            mass_h_true,
            mass_h_false,
        }
    }

    /// True probability of the hypothesis given each evidential state,
    /// indexed by packed evidence bits. States with no mass get `None`
    /// rather than a fabricated value.
    pub fn posterior_table(&self, topology: &Topology) -> Vec<Option<f64>> {
        let d = self.decompose(topology);
        topology
            .evidential_states()
            .map(|e| d.posterior(e))
            .collect()
    }

    /// Debug dump: one `state,mass` line per world state, states spelled
    /// as T/F letters in variable order.
    pub fn to_csv(&self, topology: &Topology) -> String {
        let mut out = String::from("state,mass\n");
        for state in topology.world_states() {
            let label: String = (0..topology.n_vars())
                .map(|i| if state.value(VariableId(i)) { 'T' } else { 'F' })
                .collect();
            out.push_str(&format!("{label},{}\n", self.mass(state)));
        }
        out
    }
}

/// Per-evidential-state mass split by hypothesis value: everything the
/// error measures need, computed once per case.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceDecomposition {
    mass_h_true: Vec<f64>,
    mass_h_false: Vec<f64>,
}

impl EvidenceDecomposition {
    pub fn n_states(&self) -> usize {
        self.mass_h_true.len()
    }

    pub fn states(&self) -> impl Iterator<Item = EvidentialState> {
        (0..self.n_states()).map(EvidentialState::from_bits)
    }

    /// `P(state & H=T)`.
    pub fn mass_h_true(&self, state: EvidentialState) -> f64 {
        self.mass_h_true[state.bits()]
    }

    /// `P(state & H=F)`.
    pub fn mass_h_false(&self, state: EvidentialState) -> f64 {
        self.mass_h_false[state.bits()]
    }

    /// `P(state)`.
    pub fn state_mass(&self, state: EvidentialState) -> f64 {
        self.mass_h_true[state.bits()] + self.mass_h_false[state.bits()]
    }

    /// `P(H=T | state)`, or `None` when the state has no mass.
    pub fn posterior(&self, state: EvidentialState) -> Option<f64> {
        let total = self.state_mass(state);
        if total > 0.0 {
            Some(self.mass_h_true[state.bits()] / total)
        } else {
            None
        }
    }
}

/// A draw from the open interval (0, 1). `Rng::random` yields [0, 1); the
/// zero endpoint is rejected so chain entries stay strictly interior.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let v: f64 = rng.random();
        if v > 0.0 {
            return v;
        }
    }
}
