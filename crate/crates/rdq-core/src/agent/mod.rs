//! The DQN baseline and the rule-driven (shielded, distilled) variant.
//!
//! Both agents share one code path. The rule-driven agent filters action
//! selection through the learned rules (safe epsilon-greedy), records
//! failures, periodically re-induces rules, and adds a KL distillation term
//! pulling its policy toward a teacher built from the target network with
//! unsafe-action mass redistributed. The baseline sets `lambda = 0`, skips
//! every rule-engine call and explores with plain epsilon-greedy.

mod checkpoint;
mod replay;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointError};
pub use replay::{Experience, ReplayBuffer};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envs::{
    self, enumerate_actions, Action, Domain, EnvError, LevelConfig,
};
use crate::neural::loss::{
    kl_divergence, kl_grad_wrt_logits, smooth_l1, smooth_l1_grad, softmax, squared_error,
    squared_error_grad, PolicyDist,
};
use crate::neural::optim::{Adam, AdamConfig};
use crate::neural::{Gradients, Mlp, NeuralError};
use crate::qsr::{encode, QsrGranularity, QsrState};
use crate::rules::{
    clear, induce_rules, select_random_safe_action, ConsistencySample, FailureMemory,
    InduceParams, RuleSet,
};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum TrainingError {
    #[error("non-finite loss at step {step} (q={q_loss}, kl={kl_loss})")]
    NonFiniteLoss {
        step: u64,
        q_loss: f64,
        kl_loss: f64,
    },
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("state features have length {got}, network expects {expected}")]
    FeatureDim { got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Dqn,
    Rdq,
}

impl AgentKind {
    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Dqn => "dqn",
            AgentKind::Rdq => "rdq",
        }
    }
}

impl std::fmt::Display for AgentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AgentKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dqn" => Ok(AgentKind::Dqn),
            "rdq" => Ok(AgentKind::Rdq),
            other => Err(format!("unknown agent kind `{other}` (expected dqn|rdq)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QLossKind {
    SmoothL1,
    Squared,
}

/// How the teacher redistributes the probability mass of unsafe actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeacherRedistribution {
    /// Split the removed mass evenly over the safe actions (sums to one by
    /// construction).
    PerSafeAction,
    /// Add `p_bad / |A_bad|` to each safe action, then renormalize.
    PerBadActionRenormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_steps: u64,
    /// Exploration restart level after a detected novelty; rules carry over
    /// safety, so the restart is well below 1.
    pub epsilon_novelty_restart: f64,
    /// Target-network sync period C, in environment steps.
    pub target_sync_period: u64,
    /// Weight of the KL distillation term.
    pub lambda: f64,
    pub batch_size: usize,
    pub replay_capacity: usize,
    /// Minimum buffered transitions before optimization starts.
    pub replay_warmup: usize,
    /// Optimize once every this many environment steps.
    pub optimize_every: u64,
    pub learning_rate: f64,
    pub hidden: Vec<usize>,
    /// Softmax temperature for student and target policies.
    pub tau: f64,
    pub kl_teacher_floor: f64,
    /// Only apply the KL term while at least one rule exists.
    pub kl_only_when_rules_nonempty: bool,
    /// Episode-reward level that separates competent from degraded play;
    /// falling below it in stable mode signals a novelty. `None` uses the
    /// domain default (0.5 lake, 0.0 crossing).
    pub novelty_threshold: Option<f64>,
    /// Re-induce rules every this many environment steps while learning.
    pub rule_update_interval: u64,
    /// Outlier filter: failure pairs seen fewer times are ignored.
    pub min_support: u32,
    pub max_body_len: usize,
    pub fp_tolerance: f64,
    /// Consecutive above-threshold episodes before induction pauses.
    pub stable_episodes: u32,
    pub consistency_capacity: usize,
    /// Rule shield on action selection (rule-driven agent only).
    pub shield: bool,
    pub q_loss: QLossKind,
    pub teacher_redistribution: TeacherRedistribution,
    pub qsr: QsrGranularity,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.99,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_steps: 10_000,
            epsilon_novelty_restart: 0.3,
            target_sync_period: 1_000,
            lambda: 1.0,
            batch_size: 64,
            replay_capacity: 50_000,
            replay_warmup: 200,
            optimize_every: 4,
            learning_rate: 1e-3,
            hidden: vec![64, 64],
            tau: 1.0,
            kl_teacher_floor: 1e-6,
            kl_only_when_rules_nonempty: false,
            novelty_threshold: None,
            rule_update_interval: 2_000,
            min_support: 10,
            max_body_len: 2,
            fp_tolerance: 0.0,
            stable_episodes: 5,
            consistency_capacity: 10_000,
            shield: true,
            q_loss: QLossKind::SmoothL1,
            teacher_redistribution: TeacherRedistribution::PerSafeAction,
            qsr: QsrGranularity::default16(),
        }
    }
}

impl AgentConfig {
    pub fn novelty_threshold_for(&self, domain: Domain) -> f64 {
        self.novelty_threshold.unwrap_or(match domain {
            Domain::FrozenLake => 0.5,
            Domain::Crossroad => 0.0,
        })
    }

    pub fn from_toml(text: &str) -> Result<AgentConfig, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn induce_params(&self) -> InduceParams {
        InduceParams {
            max_body_len: self.max_body_len,
            fp_tolerance: self.fp_tolerance,
        }
    }
}

/// Linear epsilon decay with a restartable starting point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_steps: u64,
    pub steps: u64,
}

impl EpsilonSchedule {
    pub fn new(start: f64, end: f64, decay_steps: u64) -> EpsilonSchedule {
        EpsilonSchedule {
            start,
            end,
            decay_steps: decay_steps.max(1),
            steps: 0,
        }
    }

    pub fn value(&self) -> f64 {
        let t = (self.steps.min(self.decay_steps)) as f64 / self.decay_steps as f64;
        self.start + (self.end - self.start) * t
    }

    pub fn advance(&mut self) {
        self.steps = self.steps.saturating_add(1);
    }

    pub fn restart(&mut self, start: f64) {
        self.start = start.max(self.end);
        self.steps = 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    LearningRules,
    Stable,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::LearningRules => "learning_rules",
            Mode::Stable => "stable",
        }
    }
}

/// Outcome of one action selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActDecision {
    pub action: Action,
    /// True when the greedy choice violated a rule and was replaced.
    pub overridden: bool,
}

/// Losses of one optimization step. `total` is `q + lambda * kl`; with
/// `lambda = 0` it equals the Q-loss bitwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLosses<S> {
    pub q_loss: S,
    pub kl_loss: S,
    pub total: S,
}

/// Per-episode metrics, one CSV row per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: i64,
    pub total_reward: f64,
    pub steps: u32,
    pub epsilon: f64,
    pub q_loss_mean: f64,
    pub kl_loss_mean: f64,
    pub rules_count: usize,
    pub overridden_actions: u32,
    pub failures: u32,
    pub mode: Mode,
}

/// Complete mutable state of one training run.
#[derive(Debug, Clone)]
pub struct TrainState<S: Scalar> {
    pub kind: AgentKind,
    pub config: AgentConfig,
    pub domain: Domain,
    pub actions: Vec<Action>,
    online: Mlp<S>,
    target: Mlp<S>,
    opt: Adam<S>,
    pub replay: ReplayBuffer<S>,
    pub rules: RuleSet,
    pub failures: FailureMemory,
    pub consistency: ConsistencySample,
    pub mode: Mode,
    consecutive_ok: u32,
    epsilon: EpsilonSchedule,
    pub step: u64,
    pub episode: u64,
    rng: ChaCha8Rng,
}

impl<S: Scalar> TrainState<S> {
    pub fn new(
        kind: AgentKind,
        domain: Domain,
        config: AgentConfig,
        input_dim: usize,
        seed: u64,
    ) -> TrainState<S> {
        let actions: Vec<Action> = enumerate_actions(domain).to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut dims = vec![input_dim];
        dims.extend(config.hidden.iter().copied());
        dims.push(actions.len());
        let online: Mlp<S> = Mlp::new(&dims, &mut rng);
        let target = online.clone();
        let opt = Adam::new(
            &online,
            AdamConfig {
                learning_rate: config.learning_rate,
                ..AdamConfig::default()
            },
        );
        let epsilon = EpsilonSchedule::new(
            config.epsilon_start,
            config.epsilon_end,
            config.epsilon_decay_steps,
        );
        TrainState {
            kind,
            domain,
            actions,
            online,
            target,
            opt,
            replay: ReplayBuffer::new(config.replay_capacity),
            rules: RuleSet::empty(0),
            failures: FailureMemory::new(),
            consistency: ConsistencySample::new(config.consistency_capacity),
            mode: Mode::LearningRules,
            consecutive_ok: 0,
            epsilon,
            step: 0,
            episode: 0,
            config,
            rng,
        }
    }

    /// Convenience constructor sized for a level.
    pub fn for_level(
        kind: AgentKind,
        level: &LevelConfig,
        config: AgentConfig,
        seed: u64,
    ) -> TrainState<S> {
        TrainState::new(kind, level.domain, config, envs::feature_dim(level), seed)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.value()
    }

    pub fn epsilon_schedule(&self) -> &EpsilonSchedule {
        &self.epsilon
    }

    pub fn q_values(&self, x: &[S]) -> Vec<S> {
        self.online.forward(x)
    }

    pub fn online(&self) -> &Mlp<S> {
        &self.online
    }

    pub fn target(&self) -> &Mlp<S> {
        &self.target
    }

    /// Reseed the RNG stream, e.g. when a restored baseline is reused for an
    /// independent sweep cell.
    pub fn reseed(&mut self, seed: u64) {
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    fn shielded(&self) -> bool {
        self.kind == AgentKind::Rdq && self.config.shield
    }

    /// Safe epsilon-greedy action selection. The exploration branch samples
    /// a random safe action; the greedy branch is overwritten with one when
    /// it violates a rule. The baseline runs plain epsilon-greedy.
    pub fn act(&mut self, x: &[S], s_qsr: &QsrState) -> ActDecision {
        let eps = self.epsilon.value();
        let explore = self.rng.gen::<f64>() < eps;
        let shielded = self.shielded();
        if explore {
            let action = if shielded {
                select_random_safe_action(s_qsr, &self.rules, &self.actions, &mut self.rng)
            } else {
                self.actions[self.rng.gen_range(0..self.actions.len())]
            };
            return ActDecision {
                action,
                overridden: false,
            };
        }
        let q = self.online.forward(x);
        let greedy = self.actions[argmax(&q)];
        if shielded && !self.rules.is_action_safe(s_qsr, greedy) {
            let action = select_random_safe_action(s_qsr, &self.rules, &self.actions, &mut self.rng);
            ActDecision {
                action,
                overridden: true,
            }
        } else {
            ActDecision {
                action: greedy,
                overridden: false,
            }
        }
    }

    /// Copy the online weights into the target network every
    /// `target_sync_period` steps.
    pub fn sync_target(&mut self) {
        if self.step % self.config.target_sync_period == 0 {
            self.target = self.online.clone();
        }
    }

    /// True iff the finished episode's reward signals a novelty: strictly
    /// below the threshold while the agent considered itself stable.
    pub fn detect_novelty(&self, episode_reward: f64) -> bool {
        self.mode == Mode::Stable
            && episode_reward < self.config.novelty_threshold_for(self.domain)
    }

    /// One gradient step on the combined loss over `batch`.
    pub fn optimize_step(&mut self, batch: &[Experience<S>]) -> Result<StepLosses<S>, TrainingError> {
        assert!(!batch.is_empty());
        let n = S::from_f64(batch.len() as f64);
        let gamma = S::from_f64(self.config.gamma);
        let tau = S::from_f64(self.config.tau);
        let floor = S::from_f64(self.config.kl_teacher_floor);
        let lambda = S::from_f64(self.config.lambda);
        let distill = self.kind == AgentKind::Rdq
            && !(self.config.kl_only_when_rules_nonempty && self.rules.is_empty());

        let mut grads = Gradients::zeros_like(&self.online);
        let mut q_sum = S::zero();
        let mut kl_sum = S::zero();

        for e in batch {
            let cache = self.online.forward_cached(&e.s);
            let a_idx = self
                .actions
                .iter()
                .position(|&a| a == e.a)
                .expect("experience action belongs to the domain");
            let q_sa = cache.output()[a_idx];
            let y = if e.terminal {
                e.r
            } else {
                let next_q = self.target.forward(&e.s_next);
                let max_next = next_q
                    .into_iter()
                    .fold(S::neg_infinity(), |a, b| if b > a { b } else { a });
                e.r + gamma * max_next
            };
            let (loss_i, dq) = match self.config.q_loss {
                QLossKind::SmoothL1 => (smooth_l1(q_sa, y), smooth_l1_grad(q_sa, y)),
                QLossKind::Squared => (squared_error(q_sa, y), squared_error_grad(q_sa, y)),
            };
            q_sum = q_sum + loss_i;

            let mut upstream = vec![S::zero(); self.actions.len()];
            upstream[a_idx] = dq / n;

            if distill {
                let teacher = build_teacher_policy(
                    &self.target,
                    &e.s,
                    &e.s_qsr,
                    &self.rules,
                    &self.actions,
                    tau,
                    self.config.teacher_redistribution,
                );
                let student = softmax(cache.output(), tau);
                kl_sum = kl_sum + kl_divergence(&student, &teacher, floor);
                if lambda != S::zero() {
                    let kl_grad = kl_grad_wrt_logits(&student, &teacher, floor, tau);
                    for (u, g) in upstream.iter_mut().zip(kl_grad) {
                        *u = *u + lambda * g / n;
                    }
                }
            }
            self.online.backward(&cache, &upstream, &mut grads);
        }

        let q_loss = q_sum / n;
        let kl_loss = kl_sum / n;
        let total = if lambda == S::zero() {
            q_loss
        } else {
            q_loss + lambda * kl_loss
        };
        if !q_loss.is_finite() || !kl_loss.is_finite() {
            return Err(TrainingError::NonFiniteLoss {
                step: self.step,
                q_loss: q_loss.into_f64(),
                kl_loss: kl_loss.into_f64(),
            });
        }
        grads.check_finite()?;
        self.opt.apply(&mut self.online, &grads);
        Ok(StepLosses {
            q_loss,
            kl_loss,
            total,
        })
    }

    /// Run `episodes` episodes on `level`, learning throughout. Returns one
    /// record per episode; the global step/episode counters keep running
    /// across calls so a restored agent continues where it stopped.
    pub fn run_episodes(
        &mut self,
        level: &LevelConfig,
        episodes: u64,
    ) -> Result<Vec<EpisodeRecord>, TrainingError> {
        let expected = self.online.input_dim();
        let got = envs::feature_dim(level);
        if expected != got {
            return Err(TrainingError::FeatureDim { got, expected });
        }
        let is_rdq = self.kind == AgentKind::Rdq;
        let mut records = Vec::with_capacity(episodes as usize);

        for _ in 0..episodes {
            let mut state = envs::reset(level)?;
            let mut s_qsr = encode(&state, &self.config.qsr);
            let mut total_reward = 0.0;
            let mut steps = 0u32;
            let mut overridden = 0u32;
            let mut died = 0u32;
            let mut q_losses = 0.0;
            let mut kl_losses = 0.0;
            let mut optimizations = 0u32;

            loop {
                let x = envs::state_features::<S>(level, &state);
                let decision = self.act(&x, &s_qsr);
                if decision.overridden {
                    overridden += 1;
                }
                let outcome = envs::step(level, &state, decision.action)?;
                let x_next = envs::state_features::<S>(level, &outcome.next_state);
                self.replay.push(Experience {
                    s: x,
                    a: decision.action,
                    r: S::from_f64(outcome.reward),
                    s_next: x_next,
                    terminal: outcome.terminal,
                    s_qsr: s_qsr.clone(),
                });
                if is_rdq {
                    if outcome.failure {
                        self.failures.record(s_qsr.clone(), decision.action);
                    } else {
                        self.consistency.record(s_qsr.clone(), decision.action);
                    }
                }
                if outcome.failure {
                    died = 1;
                }

                self.step += 1;
                self.epsilon.advance();

                if is_rdq
                    && self.mode == Mode::LearningRules
                    && self.step % self.config.rule_update_interval == 0
                {
                    self.reinduce_rules();
                }
                if self.step % self.config.optimize_every == 0
                    && self.replay.len() >= self.config.replay_warmup.max(self.config.batch_size)
                {
                    let batch = self
                        .replay
                        .sample_cloned(self.config.batch_size, &mut self.rng);
                    let losses = self.optimize_step(&batch)?;
                    q_losses += losses.q_loss.into_f64();
                    kl_losses += losses.kl_loss.into_f64();
                    optimizations += 1;
                }
                self.sync_target();

                total_reward += outcome.reward;
                steps += 1;
                state = outcome.next_state;
                s_qsr = encode(&state, &self.config.qsr);
                if outcome.terminal {
                    break;
                }
            }

            self.episode += 1;
            if is_rdq {
                self.update_mode(total_reward);
            }
            let denom = optimizations.max(1) as f64;
            records.push(EpisodeRecord {
                episode: self.episode as i64 - 1,
                total_reward,
                steps,
                epsilon: self.epsilon.value(),
                q_loss_mean: q_losses / denom,
                kl_loss_mean: kl_losses / denom,
                rules_count: self.rules.len(),
                overridden_actions: overridden,
                failures: died,
                mode: self.mode,
            });
        }
        Ok(records)
    }

    /// Re-run induction over the filtered failure memory and swap in the
    /// resulting rule set.
    pub fn reinduce_rules(&mut self) {
        let positives = self.failures.filter_outliers(self.config.min_support);
        let outcome = induce_rules(
            &positives,
            &self.consistency,
            &self.config.induce_params(),
            self.rules.version() + 1,
        );
        self.rules = outcome.rule_set;
    }

    /// Episode-end mode transitions: sustained success pauses induction;
    /// a detected novelty wipes rules and memory and restarts exploration.
    fn update_mode(&mut self, episode_reward: f64) {
        let threshold = self.config.novelty_threshold_for(self.domain);
        match self.mode {
            Mode::LearningRules => {
                if episode_reward > threshold {
                    self.consecutive_ok += 1;
                    if self.consecutive_ok >= self.config.stable_episodes {
                        self.mode = Mode::Stable;
                    }
                } else {
                    self.consecutive_ok = 0;
                }
            }
            Mode::Stable => {
                if self.detect_novelty(episode_reward) {
                    self.rules = clear(&mut self.failures, &self.rules);
                    self.consistency.clear();
                    self.mode = Mode::LearningRules;
                    self.consecutive_ok = 0;
                    self.epsilon.restart(self.config.epsilon_novelty_restart);
                }
            }
        }
    }
}

/// Teacher policy: the target network's softmax policy with the probability
/// of rule-violating actions removed and redistributed over the safe ones.
/// With no unsafe actions (or none safe), the target policy is returned
/// unchanged.
pub fn build_teacher_policy<S: Scalar>(
    target: &Mlp<S>,
    x: &[S],
    s_qsr: &QsrState,
    rules: &RuleSet,
    actions: &[Action],
    tau: S,
    redistribution: TeacherRedistribution,
) -> PolicyDist<S> {
    let q = target.forward(x);
    let base = softmax(&q, tau);
    let safe = rules.safe_actions(s_qsr, actions);
    if safe.is_empty() || safe.len() == actions.len() {
        return base;
    }
    let is_safe: Vec<bool> = actions.iter().map(|a| safe.contains(a)).collect();
    let p_bad: S = base
        .probs()
        .iter()
        .zip(&is_safe)
        .filter(|(_, &s)| !s)
        .map(|(&p, _)| p)
        .sum();
    let bonus = match redistribution {
        TeacherRedistribution::PerSafeAction => p_bad / S::from_f64(safe.len() as f64),
        TeacherRedistribution::PerBadActionRenormalized => {
            p_bad / S::from_f64((actions.len() - safe.len()) as f64)
        }
    };
    let weights: Vec<S> = base
        .probs()
        .iter()
        .zip(&is_safe)
        .map(|(&p, &s)| if s { p + bonus } else { S::zero() })
        .collect();
    // Zeros stay exactly zero through normalization; for the per-safe-action
    // split this only tidies the last few ulps, for the verbatim variant it
    // restores a unit sum.
    PolicyDist::from_weights(weights)
}

fn argmax<S: Scalar>(values: &[S]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Train an agent from scratch on one level.
pub fn train<S: Scalar>(
    level: &LevelConfig,
    kind: AgentKind,
    config: AgentConfig,
    seed: u64,
    episodes: u64,
) -> Result<(TrainState<S>, Vec<EpisodeRecord>), TrainingError> {
    let mut ts = TrainState::for_level(kind, level, config, seed);
    let records = ts.run_episodes(level, episodes)?;
    Ok((ts, records))
}

/// Greedy rollout without learning or exploration; the shield stays active
/// for the rule-driven agent. Returns per-episode (reward, steps).
pub fn evaluate<S: Scalar>(
    ts: &TrainState<S>,
    level: &LevelConfig,
    episodes: u64,
) -> Result<Vec<(f64, u32)>, TrainingError> {
    let expected = ts.online.input_dim();
    let got = envs::feature_dim(level);
    if expected != got {
        return Err(TrainingError::FeatureDim { got, expected });
    }
    // Only the shield's fallback draw needs randomness; fixed seed so two
    // evaluations of the same checkpoint produce identical trajectories.
    let mut rng = ChaCha8Rng::seed_from_u64(0xe7a1);
    let mut out = Vec::with_capacity(episodes as usize);
    for _ in 0..episodes {
        let mut state = envs::reset(level)?;
        let mut total = 0.0;
        let mut steps = 0u32;
        loop {
            let s_qsr = encode(&state, &ts.config.qsr);
            let x = envs::state_features::<S>(level, &state);
            let q = ts.online.forward(&x);
            let mut action = ts.actions[argmax(&q)];
            if ts.shielded() && !ts.rules.is_action_safe(&s_qsr, action) {
                action = select_random_safe_action(&s_qsr, &ts.rules, &ts.actions, &mut rng);
            }
            let outcome = envs::step(level, &state, action)?;
            total += outcome.reward;
            steps += 1;
            state = outcome.next_state;
            if outcome.terminal {
                break;
            }
        }
        out.push((total, steps));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
