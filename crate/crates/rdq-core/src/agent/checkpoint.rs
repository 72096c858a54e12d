//! Versioned JSON checkpoints of a [`TrainState`].
//!
//! The file holds layer shapes and weights for both networks, the optimizer
//! moments, the epsilon schedule, step/episode counters, the rule set,
//! failure memory, consistency sample and the RNG position. Floats are
//! written in shortest round-trip form, so save -> load reproduces forward
//! outputs bit-exactly. The replay buffer is deliberately not persisted: a
//! restored agent refills it before optimization resumes (`replay_warmup`).

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::envs::{Action, Domain};
use crate::neural::optim::{Adam, AdamConfig};
use crate::neural::{Gradients, Mlp};
use crate::rules::{ConsistencySample, FailureMemory, RuleSet};
use crate::scalar::Scalar;

use super::{AgentConfig, AgentKind, EpsilonSchedule, Mode, ReplayBuffer, TrainState};

pub const CHECKPOINT_FORMAT: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io error on checkpoint: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed checkpoint: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported checkpoint format {0}")]
    Format(u32),
    #[error("checkpoint holds `{got}` weights, this build expects `{expected}`")]
    ScalarMismatch { got: String, expected: String },
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
struct CheckpointDto<S: Scalar> {
    format: u32,
    scalar: String,
    kind: AgentKind,
    domain: Domain,
    config: AgentConfig,
    actions: Vec<Action>,
    online: Mlp<S>,
    target: Mlp<S>,
    adam_config: AdamConfig,
    adam_m: Gradients<S>,
    adam_v: Gradients<S>,
    adam_step: u64,
    step: u64,
    episode: u64,
    mode: Mode,
    consecutive_ok: u32,
    epsilon: EpsilonSchedule,
    rules: RuleSet,
    failures: FailureMemory,
    consistency: ConsistencySample,
    rng_seed: [u8; 32],
    rng_word_pos_hi: u64,
    rng_word_pos_lo: u64,
}

fn scalar_tag<S: Scalar>() -> String {
    std::any::type_name::<S>().to_string()
}

pub fn save_checkpoint<S: Scalar>(ts: &TrainState<S>, path: &Path) -> Result<(), CheckpointError> {
    let (m, v) = ts.opt.state();
    let word_pos = ts.rng.get_word_pos();
    let dto = CheckpointDto {
        format: CHECKPOINT_FORMAT,
        scalar: scalar_tag::<S>(),
        kind: ts.kind,
        domain: ts.domain,
        config: ts.config.clone(),
        actions: ts.actions.clone(),
        online: ts.online.clone(),
        target: ts.target.clone(),
        adam_config: ts.opt.config,
        adam_m: m.clone(),
        adam_v: v.clone(),
        adam_step: ts.opt.step_count(),
        step: ts.step,
        episode: ts.episode,
        mode: ts.mode,
        consecutive_ok: ts.consecutive_ok,
        epsilon: ts.epsilon.clone(),
        rules: ts.rules.clone(),
        failures: ts.failures.clone(),
        consistency: ts.consistency.clone(),
        rng_seed: ts.rng.get_seed(),
        rng_word_pos_hi: (word_pos >> 64) as u64,
        rng_word_pos_lo: word_pos as u64,
    };
    fs::write(path, serde_json::to_string(&dto)?)?;
    Ok(())
}

pub fn load_checkpoint<S: Scalar>(path: &Path) -> Result<TrainState<S>, CheckpointError> {
    let text = fs::read_to_string(path)?;
    let dto: CheckpointDto<S> = serde_json::from_str(&text)?;
    if dto.format != CHECKPOINT_FORMAT {
        return Err(CheckpointError::Format(dto.format));
    }
    if dto.scalar != scalar_tag::<S>() {
        return Err(CheckpointError::ScalarMismatch {
            got: dto.scalar,
            expected: scalar_tag::<S>(),
        });
    }
    let mut rng = ChaCha8Rng::from_seed(dto.rng_seed);
    rng.set_word_pos(((dto.rng_word_pos_hi as u128) << 64) | dto.rng_word_pos_lo as u128);
    let replay = ReplayBuffer::new(dto.config.replay_capacity);
    Ok(TrainState {
        kind: dto.kind,
        domain: dto.domain,
        actions: dto.actions,
        online: dto.online,
        target: dto.target,
        opt: Adam::from_state(dto.adam_config, dto.adam_m, dto.adam_v, dto.adam_step),
        replay,
        rules: dto.rules,
        failures: dto.failures,
        consistency: dto.consistency,
        mode: dto.mode,
        consecutive_ok: dto.consecutive_ok,
        epsilon: dto.epsilon,
        step: dto.step,
        episode: dto.episode,
        config: dto.config,
        rng,
    })
}
