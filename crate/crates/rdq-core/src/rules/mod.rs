//! Symbolic safety rules and the failure memory they are induced from.
//!
//! A [`Rule`] is a conjunction of spatial relations plus one forbidden
//! action: whenever the body is contained in the current relation set, the
//! action is unsafe. Rules are induced from repeated failures (see
//! [`induce_rules`]), queried by the shield at every step, and stored in a
//! human-editable text file (see [`write_rules_file`]).

mod file;
mod induce;

pub use file::{parse_rules_file, parse_rules_text, rules_file_text, write_rules_file, RuleFileError};
pub use induce::{induce_rules, InduceParams, InductionOutcome};

use std::collections::BTreeMap;
use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envs::Action;
use crate::qsr::{QsrState, Relation};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("rule body must not be empty")]
    EmptyBody,
}

/// Conjunction of relation literals plus the action they forbid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rule {
    body: Vec<Relation>,
    forbidden_action: Action,
}

impl Rule {
    pub fn new(mut body: Vec<Relation>, forbidden_action: Action) -> Result<Rule, RuleError> {
        if body.is_empty() {
            return Err(RuleError::EmptyBody);
        }
        body.sort();
        body.dedup();
        Ok(Rule {
            body,
            forbidden_action,
        })
    }

    pub fn body(&self) -> &[Relation] {
        &self.body
    }

    pub fn forbidden_action(&self) -> Action {
        self.forbidden_action
    }

    /// True iff this rule fires in the given state for the given action.
    pub fn covers(&self, s_qsr: &QsrState, action: Action) -> bool {
        self.forbidden_action == action && s_qsr.contains_all(&self.body)
    }

    pub fn body_text(&self) -> String {
        let atoms: Vec<String> = self.body.iter().map(Relation::atom).collect();
        atoms.join(", ")
    }

    /// Canonical one-line form, e.g. `unsafe(up) :- n_close(p, h).`
    pub fn line(&self) -> String {
        format!("unsafe({}) :- {}.", self.forbidden_action.name(), self.body_text())
    }

    /// Writer sort key: action first, then body text.
    fn sort_key(&self) -> (usize, String) {
        (self.forbidden_action.id(), self.body_text())
    }
}

/// An immutable, versioned collection of rules. Query results do not depend
/// on rule order; the stored order is canonical (action, body text).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    rules: Vec<Rule>,
    version: u64,
}

impl RuleSet {
    pub fn new(mut rules: Vec<Rule>, version: u64) -> RuleSet {
        rules.sort_by_key(Rule::sort_key);
        rules.dedup();
        RuleSet { rules, version }
    }

    pub fn empty(version: u64) -> RuleSet {
        RuleSet {
            rules: Vec::new(),
            version,
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    /// Evaluate the safety predicate: an action is safe unless some rule
    /// forbids it in this state.
    pub fn is_action_safe(&self, s_qsr: &QsrState, action: Action) -> bool {
        !self.rules.iter().any(|r| r.covers(s_qsr, action))
    }

    /// The subset of `actions` that passes [`RuleSet::is_action_safe`].
    pub fn safe_actions(&self, s_qsr: &QsrState, actions: &[Action]) -> Vec<Action> {
        actions
            .iter()
            .copied()
            .filter(|&a| self.is_action_safe(s_qsr, a))
            .collect()
    }
}

/// Uniform draw from the safe actions, falling back to the full action set
/// when nothing is safe.
pub fn select_random_safe_action<R: Rng>(
    s_qsr: &QsrState,
    rules: &RuleSet,
    actions: &[Action],
    rng: &mut R,
) -> Action {
    debug_assert!(!actions.is_empty());
    let safe = rules.safe_actions(s_qsr, actions);
    let pool = if safe.is_empty() { actions } else { &safe };
    pool[rng.gen_range(0..pool.len())]
}

/// Key of a `(relation set, action)` pair; ordering is canonical so maps
/// iterate deterministically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FailureKey {
    pub state: QsrState,
    pub action: Action,
}

/// Multiset of `(qsr state, action)` pairs that immediately preceded a
/// death event.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "FailureMemoryRepr", into = "FailureMemoryRepr")]
pub struct FailureMemory {
    entries: BTreeMap<FailureKey, u32>,
}

// Serialized as an entry list: JSON maps need string keys.
#[derive(Serialize, Deserialize)]
struct FailureMemoryRepr {
    entries: Vec<(FailureKey, u32)>,
}

impl From<FailureMemoryRepr> for FailureMemory {
    fn from(repr: FailureMemoryRepr) -> Self {
        FailureMemory {
            entries: repr.entries.into_iter().collect(),
        }
    }
}

impl From<FailureMemory> for FailureMemoryRepr {
    fn from(mem: FailureMemory) -> Self {
        FailureMemoryRepr {
            entries: mem.entries.into_iter().collect(),
        }
    }
}

impl FailureMemory {
    pub fn new() -> FailureMemory {
        FailureMemory::default()
    }

    /// Record one failed transition; relation order in `s_qsr` is already
    /// canonical, so permuted observations share a key.
    pub fn record(&mut self, s_qsr: QsrState, action: Action) {
        *self
            .entries
            .entry(FailureKey {
                state: s_qsr,
                action,
            })
            .or_insert(0) += 1;
    }

    pub fn count(&self, s_qsr: &QsrState, action: Action) -> u32 {
        self.entries
            .get(&FailureKey {
                state: s_qsr.clone(),
                action,
            })
            .copied()
            .unwrap_or(0)
    }

    /// Distinct pairs stored.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total failures recorded, counting repeats.
    pub fn total(&self) -> u64 {
        self.entries.values().map(|&c| c as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FailureKey, u32)> {
        self.entries.iter().map(|(k, &c)| (k, c))
    }

    /// Pairs observed at least `min_support` times, in canonical order.
    pub fn filter_outliers(&self, min_support: u32) -> Vec<(QsrState, Action)> {
        self.entries
            .iter()
            .filter(|(_, &c)| c >= min_support)
            .map(|(k, _)| (k.state.clone(), k.action))
            .collect()
    }
}

/// Bounded set of recently seen non-failure `(qsr state, action)` pairs.
/// Induction uses it to reject candidate rules that would forbid actions
/// observed to be survivable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ConsistencySampleRepr", into = "ConsistencySampleRepr")]
pub struct ConsistencySample {
    capacity: usize,
    counts: BTreeMap<FailureKey, u32>,
    order: VecDeque<FailureKey>,
}

// The distinct-pair counts are derivable from the recency queue.
#[derive(Serialize, Deserialize)]
struct ConsistencySampleRepr {
    capacity: usize,
    order: Vec<FailureKey>,
}

impl From<ConsistencySampleRepr> for ConsistencySample {
    fn from(repr: ConsistencySampleRepr) -> Self {
        let mut sample = ConsistencySample::new(repr.capacity);
        for key in repr.order {
            sample.record(key.state, key.action);
        }
        sample
    }
}

impl From<ConsistencySample> for ConsistencySampleRepr {
    fn from(sample: ConsistencySample) -> Self {
        ConsistencySampleRepr {
            capacity: sample.capacity,
            order: sample.order.into_iter().collect(),
        }
    }
}

impl ConsistencySample {
    pub fn new(capacity: usize) -> ConsistencySample {
        ConsistencySample {
            capacity: capacity.max(1),
            counts: BTreeMap::new(),
            order: VecDeque::new(),
        }
    }

    pub fn record(&mut self, s_qsr: QsrState, action: Action) {
        let key = FailureKey {
            state: s_qsr,
            action,
        };
        self.order.push_back(key.clone());
        *self.counts.entry(key).or_insert(0) += 1;
        while self.order.len() > self.capacity {
            let old = self.order.pop_front().expect("non-empty");
            if let Some(c) = self.counts.get_mut(&old) {
                *c -= 1;
                if *c == 0 {
                    self.counts.remove(&old);
                }
            }
        }
    }

    /// Distinct pairs currently retained.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn clear(&mut self) {
        self.counts.clear();
        self.order.clear();
    }

    pub fn iter(&self) -> impl Iterator<Item = &FailureKey> {
        self.counts.keys()
    }

    /// Distinct pairs with the given action.
    pub fn matching_action(&self, action: Action) -> usize {
        self.counts.keys().filter(|k| k.action == action).count()
    }

    /// Distinct pairs the rule body would wrongly cover.
    pub fn false_positives(&self, body: &[Relation], action: Action) -> usize {
        self.counts
            .keys()
            .filter(|k| k.action == action && k.state.contains_all(body))
            .count()
    }
}

/// Forget everything: empty failure memory and an empty rule set with a
/// bumped version. Invoked when a novelty is detected, since stale
/// observations may contradict the changed environment.
pub fn clear(mem: &mut FailureMemory, rules: &RuleSet) -> RuleSet {
    mem.entries.clear();
    RuleSet::empty(rules.version() + 1)
}
