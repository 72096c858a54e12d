//! Experiment apparatus: novelty sweeps with per-cell baseline restore,
//! metric aggregation and CSV output.
//!
//! A sweep first trains each agent kind on the domain's baseline level and
//! checkpoints it. Every cell `(agent, novelty, level, seed)` then restores
//! that checkpoint, switches its RNG to a stream derived from the root seed
//! and the cell coordinates, and continues training on the novelty level.
//! Cells are independent, so execution order (and the worker count) cannot
//! change any output byte.

mod csvio;

pub use csvio::{
    parse_run_csv, run_csv_text, write_recovery_csv, write_run_csv, write_summary_csv,
    RUN_CSV_HEADER,
};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{
    load_checkpoint, save_checkpoint, AgentConfig, AgentKind, EpisodeRecord, TrainState,
};
use crate::envs::{generate_novelty_levels, Domain, LevelConfig, NoveltyKind};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Env(#[from] crate::envs::EnvError),
    #[error(transparent)]
    Training(#[from] crate::agent::TrainingError),
    #[error(transparent)]
    Checkpoint(#[from] crate::agent::CheckpointError),
    #[error("malformed csv {path}: {reason}")]
    MalformedCsv { path: String, reason: String },
}

/// Declarative description of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub domain: Domain,
    pub agents: Vec<AgentKind>,
    pub novelties: Vec<NoveltyKind>,
    pub levels_per_novelty: usize,
    pub seeds_per_level: usize,
    /// Baseline training budget, in episodes.
    pub pre_episodes: u64,
    /// Post-novelty training budget per cell, in episodes.
    pub post_episodes: u64,
    /// Trailing baseline episodes attached to each cell with negative
    /// indices.
    pub pre_window: usize,
    /// Episode reward counting as "recovered"; `None` uses the domain
    /// default (1.0 lake, 0.8 crossing).
    pub recovery_threshold: Option<f64>,
    pub root_seed: u64,
    pub agent_config: Option<AgentConfig>,
    pub max_steps: Option<u32>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            domain: Domain::FrozenLake,
            agents: vec![AgentKind::Dqn, AgentKind::Rdq],
            novelties: Vec::new(),
            levels_per_novelty: 20,
            seeds_per_level: 5,
            pre_episodes: 2_000,
            post_episodes: 300,
            pre_window: 50,
            recovery_threshold: None,
            root_seed: 0,
            agent_config: None,
            max_steps: None,
        }
    }
}

impl ExperimentSpec {
    pub fn recovery_threshold_for(&self) -> f64 {
        self.recovery_threshold.unwrap_or(match self.domain {
            Domain::FrozenLake => 1.0,
            Domain::Crossroad => 0.8,
        })
    }

    pub fn from_toml(text: &str) -> Result<ExperimentSpec, HarnessError> {
        let spec: ExperimentSpec =
            toml::from_str(text).map_err(|e| HarnessError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.agents.is_empty() {
            return Err(HarnessError::InvalidSpec("no agents listed".into()));
        }
        if self.novelties.is_empty() {
            return Err(HarnessError::InvalidSpec("no novelties listed".into()));
        }
        for n in &self.novelties {
            if !n.valid_for(self.domain) {
                return Err(HarnessError::InvalidSpec(format!(
                    "novelty `{n}` is not defined for domain `{}`",
                    self.domain
                )));
            }
        }
        if self.levels_per_novelty == 0 || self.seeds_per_level == 0 {
            return Err(HarnessError::InvalidSpec("levels and seeds must be >= 1".into()));
        }
        if self.pre_episodes == 0 || self.post_episodes == 0 {
            return Err(HarnessError::InvalidSpec("episode budgets must be >= 1".into()));
        }
        Ok(())
    }

    fn agent_config(&self) -> AgentConfig {
        self.agent_config.clone().unwrap_or_default()
    }

    fn baseline_level(&self) -> LevelConfig {
        let mut level = LevelConfig::baseline_for(self.domain);
        if let Some(ms) = self.max_steps {
            level.max_steps = ms;
        }
        level
    }
}

/// One finished sweep cell: the pre-window rows carry negative episode
/// indices, the post-novelty rows count from zero.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub agent: AgentKind,
    pub novelty: NoveltyKind,
    pub level: usize,
    pub seed: usize,
    pub records: Vec<EpisodeRecord>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: ExperimentSpec,
    pub baselines: Vec<(AgentKind, Vec<EpisodeRecord>)>,
    pub cells: Vec<CellResult>,
    /// Failed cells, recorded with context; the sweep continues past them.
    pub errors: Vec<String>,
}

/// Stable stream derivation: root seed folded with cell coordinates through
/// splitmix64.
pub fn derive_seed(root: u64, tags: &[u64]) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }
    let mut h = splitmix64(root);
    for &t in tags {
        h = splitmix64(h ^ t);
    }
    h
}

fn cell_file_name(agent: AgentKind, novelty: NoveltyKind, level: usize, seed: usize) -> String {
    format!("cell__{agent}__{novelty}__L{level:03}__S{seed:02}.csv")
}

fn baseline_csv_name(agent: AgentKind) -> String {
    format!("baseline__{agent}.csv")
}

fn baseline_ckpt_name(agent: AgentKind) -> String {
    format!("baseline__{agent}.ckpt.json")
}

/// Run the full sweep described by `spec`, writing per-run CSVs, the
/// resolved spec, `summary.csv` and `recovery.csv` under `out_dir`.
pub fn run_experiment<S: Scalar>(
    spec: &ExperimentSpec,
    out_dir: &Path,
    parallel: usize,
) -> Result<SweepResult, HarnessError> {
    spec.validate()?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("spec_resolved.toml"), spec.to_toml())?;

    // Phase 1: baseline training, one run per agent kind.
    let baseline_level = spec.baseline_level();
    let mut baselines = Vec::new();
    let mut ckpt_paths: Vec<(AgentKind, PathBuf)> = Vec::new();
    for &agent in &spec.agents {
        let seed = derive_seed(spec.root_seed, &[1, agent as u64]);
        let mut ts: TrainState<S> =
            TrainState::for_level(agent, &baseline_level, spec.agent_config(), seed);
        let records = ts.run_episodes(&baseline_level, spec.pre_episodes)?;
        let ckpt = out_dir.join(baseline_ckpt_name(agent));
        save_checkpoint(&ts, &ckpt)?;
        write_run_csv(&records, &out_dir.join(baseline_csv_name(agent)))?;
        baselines.push((agent, records));
        ckpt_paths.push((agent, ckpt));
    }

    // Phase 2: shared novelty levels (same levels for every agent and seed).
    let mut levels: BTreeMap<NoveltyKind, Vec<LevelConfig>> = BTreeMap::new();
    for &novelty in &spec.novelties {
        let seed = derive_seed(spec.root_seed, &[2, novelty as u64]);
        let mut configs =
            generate_novelty_levels(spec.domain, novelty, spec.levels_per_novelty, seed)?;
        if let Some(ms) = spec.max_steps {
            for c in configs.iter_mut() {
                c.max_steps = ms;
            }
        }
        levels.insert(novelty, configs);
    }

    // Phase 3: independent cells, any order.
    struct CellJob {
        agent: AgentKind,
        novelty: NoveltyKind,
        level: usize,
        seed: usize,
        level_cfg: LevelConfig,
        ckpt: PathBuf,
    }
    let mut jobs = Vec::new();
    for &agent in &spec.agents {
        let ckpt = ckpt_paths
            .iter()
            .find(|(a, _)| *a == agent)
            .expect("checkpoint saved above")
            .1
            .clone();
        for &novelty in &spec.novelties {
            for (level, level_cfg) in levels[&novelty].iter().enumerate() {
                for seed in 0..spec.seeds_per_level {
                    jobs.push(CellJob {
                        agent,
                        novelty,
                        level,
                        seed,
                        level_cfg: level_cfg.clone(),
                        ckpt: ckpt.clone(),
                    });
                }
            }
        }
    }

    let pre_window: BTreeMap<AgentKind, Vec<EpisodeRecord>> = baselines
        .iter()
        .map(|(agent, records)| {
            let tail = records
                .iter()
                .rev()
                .take(spec.pre_window)
                .cloned()
                .collect::<Vec<_>>();
            let mut tail: Vec<EpisodeRecord> = tail.into_iter().rev().collect();
            let n = tail.len() as i64;
            for (i, r) in tail.iter_mut().enumerate() {
                r.episode = i as i64 - n;
            }
            (*agent, tail)
        })
        .collect();

    let run_cell = |job: &CellJob| -> Result<CellResult, String> {
        let context = cell_file_name(job.agent, job.novelty, job.level, job.seed);
        let mut ts: TrainState<S> =
            load_checkpoint(&job.ckpt).map_err(|e| format!("{context}: {e}"))?;
        ts.reseed(derive_seed(
            spec.root_seed,
            &[3, job.agent as u64, job.novelty as u64, job.level as u64, job.seed as u64],
        ));
        let mut post = ts
            .run_episodes(&job.level_cfg, spec.post_episodes)
            .map_err(|e| format!("{context}: {e}"))?;
        for (i, r) in post.iter_mut().enumerate() {
            r.episode = i as i64;
        }
        let mut records = pre_window[&job.agent].clone();
        records.extend(post);
        write_run_csv(&records, &out_dir.join(&context)).map_err(|e| format!("{context}: {e}"))?;
        Ok(CellResult {
            agent: job.agent,
            novelty: job.novelty,
            level: job.level,
            seed: job.seed,
            records,
        })
    };

    let outcomes: Vec<Result<CellResult, String>> = if parallel > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallel)
            .build()
            .map_err(|e| HarnessError::InvalidSpec(format!("worker pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(run_cell).collect())
    } else {
        jobs.iter().map(run_cell).collect()
    };

    let mut cells = Vec::new();
    let mut errors = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(cell) => cells.push(cell),
            Err(e) => errors.push(e),
        }
    }
    cells.sort_by_key(|c| (c.agent as u64, c.novelty as u64, c.level, c.seed));

    let result = SweepResult {
        spec: spec.clone(),
        baselines,
        cells,
        errors,
    };
    let summary = aggregate(&result);
    write_summary_csv(&summary.curves, &out_dir.join("summary.csv"))?;
    write_recovery_csv(&summary.recovery, &out_dir.join("recovery.csv"))?;
    Ok(result)
}

/// Mean reward at one episode index across a cell group.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub novelty: NoveltyKind,
    pub agent: AgentKind,
    pub episode_index: i64,
    pub mean_reward: f64,
    pub std_reward: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryRow {
    pub novelty: NoveltyKind,
    pub agent: AgentKind,
    /// Lower median over cells of the first post-novelty episode reaching
    /// the recovery threshold; cells that never recover count as the full
    /// post budget.
    pub median_episodes_to_recovery: u64,
}

/// Pre/post performance summary per (novelty, agent).
#[derive(Debug, Clone, PartialEq)]
pub struct DropRow {
    pub novelty: NoveltyKind,
    pub agent: AgentKind,
    pub pre_mean: f64,
    /// Mean reward over the first `drop_window` post-novelty episodes.
    pub post_mean: f64,
    pub drop: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub curves: Vec<SummaryRow>,
    pub recovery: Vec<RecoveryRow>,
    pub drops: Vec<DropRow>,
}

/// Episodes used for the post-novelty side of the performance-drop metric.
pub const DROP_WINDOW: usize = 50;

/// Pure aggregation over a sweep's cells. Re-running this on parsed CSVs
/// reproduces the summaries exactly.
pub fn aggregate(result: &SweepResult) -> Summary {
    aggregate_cells(
        &result.cells,
        result.spec.recovery_threshold_for(),
        result.spec.post_episodes as usize,
    )
}

pub fn aggregate_cells(
    cells: &[CellResult],
    recovery_threshold: f64,
    post_episodes: usize,
) -> Summary {
    let mut groups: BTreeMap<(u64, u64), Vec<&CellResult>> = BTreeMap::new();
    for cell in cells {
        groups
            .entry((cell.novelty as u64, cell.agent as u64))
            .or_default()
            .push(cell);
    }

    let mut curves = Vec::new();
    let mut recovery = Vec::new();
    let mut drops = Vec::new();
    for group in groups.values() {
        let novelty = group[0].novelty;
        let agent = group[0].agent;

        let mut by_index: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
        for cell in group {
            for r in &cell.records {
                by_index.entry(r.episode).or_default().push(r.total_reward);
            }
        }
        for (&episode_index, rewards) in &by_index {
            let n = rewards.len();
            let mean = rewards.iter().sum::<f64>() / n as f64;
            let var = if n > 1 {
                rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            curves.push(SummaryRow {
                novelty,
                agent,
                episode_index,
                mean_reward: mean,
                std_reward: var.sqrt(),
                n,
            });
        }

        let mut recoveries: Vec<u64> = group
            .iter()
            .map(|cell| {
                cell.records
                    .iter()
                    .filter(|r| r.episode >= 0)
                    .find(|r| r.total_reward >= recovery_threshold)
                    .map(|r| r.episode as u64)
                    .unwrap_or(post_episodes as u64)
            })
            .collect();
        recoveries.sort_unstable();
        recovery.push(RecoveryRow {
            novelty,
            agent,
            median_episodes_to_recovery: recoveries[(recoveries.len() - 1) / 2],
        });

        let pre: Vec<f64> = group
            .iter()
            .flat_map(|cell| cell.records.iter().filter(|r| r.episode < 0))
            .map(|r| r.total_reward)
            .collect();
        let post: Vec<f64> = group
            .iter()
            .flat_map(|cell| {
                cell.records
                    .iter()
                    .filter(|r| r.episode >= 0 && (r.episode as usize) < DROP_WINDOW)
            })
            .map(|r| r.total_reward)
            .collect();
        let mean = |v: &[f64]| {
            if v.is_empty() {
                0.0
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        let pre_mean = mean(&pre);
        let post_mean = mean(&post);
        drops.push(DropRow {
            novelty,
            agent,
            pre_mean,
            post_mean,
            drop: pre_mean - post_mean,
        });
    }
    Summary {
        curves,
        recovery,
        drops,
    }
}

/// Rebuild the summaries from the CSVs in a sweep output directory.
pub fn report(out_dir: &Path) -> Result<Summary, HarnessError> {
    let spec_text = fs::read_to_string(out_dir.join("spec_resolved.toml"))?;
    let spec = ExperimentSpec::from_toml(&spec_text)?;

    let mut cells = Vec::new();
    let mut names: Vec<String> = fs::read_dir(out_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.starts_with("cell__") && n.ends_with(".csv"))
        .collect();
    names.sort();
    for name in names {
        let parts: Vec<&str> = name.trim_end_matches(".csv").split("__").collect();
        let malformed = |reason: &str| HarnessError::MalformedCsv {
            path: name.clone(),
            reason: reason.to_string(),
        };
        if parts.len() != 5 {
            return Err(malformed("expected cell__<agent>__<novelty>__L<level>__S<seed>"));
        }
        let agent: AgentKind = parts[1].parse().map_err(|_| malformed("bad agent"))?;
        let novelty =
            NoveltyKind::from_name(parts[2]).ok_or_else(|| malformed("bad novelty"))?;
        let level: usize = parts[3]
            .trim_start_matches('L')
            .parse()
            .map_err(|_| malformed("bad level"))?;
        let seed: usize = parts[4]
            .trim_start_matches('S')
            .parse()
            .map_err(|_| malformed("bad seed"))?;
        let text = fs::read_to_string(out_dir.join(&name))?;
        let records = parse_run_csv(&text).map_err(|reason| HarnessError::MalformedCsv {
            path: name.clone(),
            reason,
        })?;
        cells.push(CellResult {
            agent,
            novelty,
            level,
            seed,
            records,
        });
    }
    cells.sort_by_key(|c| (c.agent as u64, c.novelty as u64, c.level, c.seed));
    Ok(aggregate_cells(
        &cells,
        spec.recovery_threshold_for(),
        spec.post_episodes as usize,
    ))
}

#[cfg(test)]
mod tests;
