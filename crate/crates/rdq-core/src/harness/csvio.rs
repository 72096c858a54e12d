//! CSV readers/writers for run logs and summaries. Floats are written with
//! the shortest round-trip representation, so re-parsing reproduces the
//! exact values and repeated runs produce identical bytes.

use std::fs;
use std::path::Path;

use crate::agent::{EpisodeRecord, Mode};

use super::{RecoveryRow, SummaryRow};

pub const RUN_CSV_HEADER: &str = "episode,total_reward,steps,epsilon,q_loss_mean,kl_loss_mean,rules_count,overridden_actions,failures,mode";

pub fn run_csv_text(records: &[EpisodeRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(RUN_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.episode,
            r.total_reward,
            r.steps,
            r.epsilon,
            r.q_loss_mean,
            r.kl_loss_mean,
            r.rules_count,
            r.overridden_actions,
            r.failures,
            r.mode.name(),
        ));
    }
    out
}

pub fn write_run_csv(records: &[EpisodeRecord], path: &Path) -> std::io::Result<()> {
    fs::write(path, run_csv_text(records))
}

pub fn parse_run_csv(text: &str) -> Result<Vec<EpisodeRecord>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == RUN_CSV_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 10 {
            return Err(format!("row {row}: expected 10 fields, got {}", fields.len()));
        }
        let parse_err = |field: &str| format!("row {row}: malformed field `{field}`");
        records.push(EpisodeRecord {
            episode: fields[0].parse().map_err(|_| parse_err("episode"))?,
            total_reward: fields[1].parse().map_err(|_| parse_err("total_reward"))?,
            steps: fields[2].parse().map_err(|_| parse_err("steps"))?,
            epsilon: fields[3].parse().map_err(|_| parse_err("epsilon"))?,
            q_loss_mean: fields[4].parse().map_err(|_| parse_err("q_loss_mean"))?,
            kl_loss_mean: fields[5].parse().map_err(|_| parse_err("kl_loss_mean"))?,
            rules_count: fields[6].parse().map_err(|_| parse_err("rules_count"))?,
            overridden_actions: fields[7]
                .parse()
                .map_err(|_| parse_err("overridden_actions"))?,
            failures: fields[8].parse().map_err(|_| parse_err("failures"))?,
            mode: match fields[9] {
                "learning_rules" => Mode::LearningRules,
                "stable" => Mode::Stable,
                other => return Err(format!("row {row}: unknown mode `{other}`")),
            },
        });
    }
    Ok(records)
}

pub fn write_summary_csv(rows: &[SummaryRow], path: &Path) -> std::io::Result<()> {
    let mut out = String::from("novelty,agent,episode_index,mean_reward,std_reward,n\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.novelty, r.agent, r.episode_index, r.mean_reward, r.std_reward, r.n
        ));
    }
    fs::write(path, out)
}

pub fn write_recovery_csv(rows: &[RecoveryRow], path: &Path) -> std::io::Result<()> {
    let mut out = String::from("novelty,agent,median_episodes_to_recovery\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            r.novelty, r.agent, r.median_episodes_to_recovery
        ));
    }
    fs::write(path, out)
}
