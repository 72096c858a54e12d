//! Rule induction by bounded generate-and-test with greedy set cover.
//!
//! Candidate bodies are all subsets (size 1..=max_body_len) of the relations
//! appearing in each positive example, paired with that example's action. A
//! candidate survives only if its false-positive rate on the consistency
//! sample stays within tolerance. Greedy selection then covers the positives,
//! preferring candidates that cover more uncovered examples, with shorter
//! bodies and lexicographically smaller body text as tie-breakers.

use std::collections::{BTreeMap, BTreeSet};

use crate::envs::Action;
use crate::qsr::{QsrState, Relation};

use super::{ConsistencySample, Rule, RuleSet};

#[derive(Debug, Clone)]
pub struct InduceParams {
    /// Maximum number of literals in a rule body.
    pub max_body_len: usize,
    /// Highest tolerated false-positive rate per rule: false positives on
    /// the consistency sample divided by that sample's distinct pairs with
    /// the rule's action. Zero in the deterministic domains.
    pub fp_tolerance: f64,
}

impl Default for InduceParams {
    fn default() -> Self {
        InduceParams {
            max_body_len: 2,
            fp_tolerance: 0.0,
        }
    }
}

/// Result of one induction pass. Positives no surviving candidate could
/// cover are reported, never silently dropped.
#[derive(Debug, Clone)]
pub struct InductionOutcome {
    pub rule_set: RuleSet,
    pub unexplained: Vec<(QsrState, Action)>,
}

/// Induce a rule set explaining the positive (failure) examples.
///
/// Every positive is covered by at least one returned rule or listed in
/// `unexplained`. The returned set carries `version`.
pub fn induce_rules(
    positives: &[(QsrState, Action)],
    consistency: &ConsistencySample,
    params: &InduceParams,
    version: u64,
) -> InductionOutcome {
    if positives.is_empty() {
        return InductionOutcome {
            rule_set: RuleSet::empty(version),
            unexplained: Vec::new(),
        };
    }

    // Candidate -> indices of positives it covers.
    let mut coverage: BTreeMap<(Vec<Relation>, Action), BTreeSet<usize>> = BTreeMap::new();
    for (idx, (state, action)) in positives.iter().enumerate() {
        for body in subsets_up_to(state.relations(), params.max_body_len) {
            coverage.entry((body, *action)).or_default().insert(idx);
        }
    }
    // A body generated from one positive may cover others with the same action.
    for ((body, action), covered) in coverage.iter_mut() {
        for (idx, (state, a)) in positives.iter().enumerate() {
            if a == action && state.contains_all(body) {
                covered.insert(idx);
            }
        }
    }

    // Reject candidates that contradict observed-safe behavior.
    coverage.retain(|(body, action), _| {
        let fp = consistency.false_positives(body, *action);
        if fp == 0 {
            return true;
        }
        let denom = consistency.matching_action(*action);
        denom > 0 && (fp as f64) <= params.fp_tolerance * denom as f64
    });

    let mut uncovered: BTreeSet<usize> = (0..positives.len()).collect();
    let mut chosen: Vec<Rule> = Vec::new();
    while !uncovered.is_empty() {
        let best = coverage
            .iter()
            .map(|((body, action), covered)| {
                let gain = covered.intersection(&uncovered).count();
                (gain, body, *action)
            })
            .filter(|(gain, _, _)| *gain > 0)
            // Max gain; ties prefer the shorter body, then smaller body
            // text, then smaller action id (BTreeMap order supplies the
            // final two via `min_by_key` on the inverted gain).
            .min_by_key(|(gain, body, action)| {
                (
                    usize::MAX - gain,
                    body.len(),
                    body_text(body),
                    action.id(),
                )
            });
        let Some((_, body, action)) = best else {
            break;
        };
        let body = body.clone();
        for (idx, (state, a)) in positives.iter().enumerate() {
            if *a == action && state.contains_all(&body) {
                uncovered.remove(&idx);
            }
        }
        chosen.push(Rule::new(body, action).expect("candidate bodies are non-empty"));
    }

    let unexplained = uncovered
        .into_iter()
        .map(|idx| positives[idx].clone())
        .collect();
    InductionOutcome {
        rule_set: RuleSet::new(chosen, version),
        unexplained,
    }
}

fn body_text(body: &[Relation]) -> String {
    let atoms: Vec<String> = body.iter().map(Relation::atom).collect();
    atoms.join(", ")
}

/// All non-empty subsets of `relations` with at most `max_len` elements,
/// preserving canonical order inside each subset.
fn subsets_up_to(relations: &[Relation], max_len: usize) -> Vec<Vec<Relation>> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<Relation>)> = vec![(0, Vec::new())];
    while let Some((start, prefix)) = stack.pop() {
        for i in start..relations.len() {
            let mut subset = prefix.clone();
            subset.push(relations[i].clone());
            if subset.len() < max_len {
                stack.push((i + 1, subset.clone()));
            }
            out.push(subset);
        }
    }
    out
}
