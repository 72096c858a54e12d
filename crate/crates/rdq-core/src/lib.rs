//! Rule-driven deep Q-learning on deterministic gridworlds.
//!
//! The crate implements two agents over the same trainer: a plain DQN
//! baseline and a rule-driven variant that turns its own repeated failures
//! into symbolic spatial safety rules, shields exploration with them, and
//! distills them into its policy via a KL term against a rule-adjusted
//! teacher. Around the agents sit two deterministic gridworld domains with
//! novelty-level generators and a sweep harness measuring adaptation speed
//! and resilience.
//!
//! Module map:
//! - [`envs`]: the crossing and lake MDPs, novelty generators, rendering.
//! - [`qsr`]: qualitative direction/distance relations over the agent's
//!   observation field.
//! - [`rules`]: failure memory, rule induction, safety queries, rule files.
//! - [`neural`]: scalar-generic MLP, losses, Adam.
//! - [`agent`]: replay, safe epsilon-greedy, teacher construction, the
//!   training loop, checkpoints.
//! - [`harness`]: experiment specs, sweeps, aggregation, CSV output.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below pin the two concrete instantiations. Everything that touches an
//! RNG is seeded and deterministic: identical seeds and configs reproduce
//! identical logs byte for byte.

pub mod agent;
pub mod envs;
pub mod harness;
pub mod neural;
pub mod qsr;
pub mod rules;
mod scalar;

pub use scalar::Scalar;

/// Q-network over `f32` weights.
pub type Mlp32 = neural::Mlp<f32>;
/// Q-network over `f64` weights.
pub type Mlp64 = neural::Mlp<f64>;
/// Action distribution over `f32`.
pub type PolicyDist32 = neural::loss::PolicyDist<f32>;
/// Action distribution over `f64`.
pub type PolicyDist64 = neural::loss::PolicyDist<f64>;
/// Trainer state over `f32` weights.
pub type TrainState32 = agent::TrainState<f32>;
/// Trainer state over `f64` weights; the CLI and the experiment harness use
/// this instantiation.
pub type TrainState64 = agent::TrainState<f64>;
