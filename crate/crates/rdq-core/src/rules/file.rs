//! The human-editable rule file.
//!
//! Format: UTF-8 text, `#` starts a comment, one rule per line:
//!
//! ```text
//! # version: 3
//! unsafe(up) :- n_close(p, c).
//! unsafe(right) :- e_close(p, c), n_far(p, c).
//! ```
//!
//! The writer is canonical (rules sorted by action, then body text), so
//! write -> parse -> write is the identity. Parsing reports the line number
//! and reason for every rejected line; region symbols are validated against
//! the granularity's naming table and actions against the domain's set.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::envs::Action;
use crate::qsr::{parse_atom, QsrGranularity};

use super::{Rule, RuleSet};

#[derive(Debug, Error)]
pub enum RuleFileError {
    #[error("io error on rule file: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Rejected { line: usize, reason: String },
}

const VERSION_PREFIX: &str = "# version: ";

/// Render a rule set in canonical file form.
pub fn rules_file_text(rules: &RuleSet) -> String {
    let mut out = String::from("# learned safety rules: unsafe(<action>) :- <relation atoms>.\n");
    out.push_str(&format!("{}{}\n", VERSION_PREFIX, rules.version()));
    for rule in rules.rules() {
        out.push_str(&rule.line());
        out.push('\n');
    }
    out
}

pub fn write_rules_file(rules: &RuleSet, path: &Path) -> Result<(), RuleFileError> {
    fs::write(path, rules_file_text(rules))?;
    Ok(())
}

pub fn parse_rules_file(
    path: &Path,
    g: &QsrGranularity,
    actions: &[Action],
) -> Result<RuleSet, RuleFileError> {
    let text = fs::read_to_string(path)?;
    parse_rules_text(&text, g, actions)
}

pub fn parse_rules_text(
    text: &str,
    g: &QsrGranularity,
    actions: &[Action],
) -> Result<RuleSet, RuleFileError> {
    let mut version = 0u64;
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix(VERSION_PREFIX) {
            version = rest.trim().parse().map_err(|_| RuleFileError::Rejected {
                line: line_no,
                reason: format!("malformed version `{}`", rest.trim()),
            })?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        rules.push(parse_rule_line(line, line_no, g, actions)?);
    }
    Ok(RuleSet::new(rules, version))
}

fn parse_rule_line(
    line: &str,
    line_no: usize,
    g: &QsrGranularity,
    actions: &[Action],
) -> Result<Rule, RuleFileError> {
    let reject = |reason: String| RuleFileError::Rejected {
        line: line_no,
        reason,
    };

    let body_part = line
        .strip_suffix('.')
        .ok_or_else(|| reject("rule must end with `.`".into()))?;
    let (head, body_part) = body_part
        .split_once(":-")
        .ok_or_else(|| reject("missing `:-` separator".into()))?;

    let head = head.trim();
    let action_name = head
        .strip_prefix("unsafe(")
        .and_then(|h| h.strip_suffix(')'))
        .ok_or_else(|| reject(format!("head `{head}` is not of the form unsafe(<action>)")))?;
    let action = Action::from_name(action_name.trim())
        .ok_or_else(|| reject(format!("unknown action name `{}`", action_name.trim())))?;
    if !actions.contains(&action) {
        return Err(reject(format!(
            "action `{action}` is not part of this domain's action set"
        )));
    }

    let mut body = Vec::new();
    for atom_text in split_atoms(body_part) {
        let atom_text = atom_text.trim();
        if atom_text.is_empty() {
            return Err(reject("empty atom in rule body".into()));
        }
        let relation = parse_atom(atom_text, g).map_err(|e| reject(e.to_string()))?;
        body.push(relation);
    }
    Rule::new(body, action).map_err(|e| reject(e.to_string()))
}

/// Split a body on commas at parenthesis depth zero, since atoms carry
/// commas of their own.
fn split_atoms(body: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&body[start..]);
    parts
}
