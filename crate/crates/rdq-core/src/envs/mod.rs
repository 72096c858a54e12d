//! Deterministic gridworld MDPs: a lane-crossing domain and a frozen-lake
//! domain, plus seeded novelty-level generators for both.
//!
//! Both domains are discrete, fully deterministic and episodic. A level is
//! described by a [`LevelConfig`]; `reset` produces the initial
//! [`GridState`] and `step` advances it. Episodes end on a death event
//! (`failure`), on reaching the goal, or by truncation at `max_steps`.

mod crossroad;
mod frozenlake;
mod novelty;

pub use crossroad::CrossroadLayout;
pub use frozenlake::FrozenLakeLayout;
pub use novelty::generate_novelty_levels;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crossroad::CarSpec;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid level configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot step a terminal state")]
    TerminalState,
    #[error("action `{action}` is not available in domain `{domain}`")]
    InvalidAction { action: Action, domain: Domain },
}

/// Discrete movement actions shared by both domains.
///
/// Ids are dense: the crossing domain uses all five (0..=4), the lake domain
/// the first four (no `noop`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    Noop,
}

impl Action {
    pub const ALL: [Action; 5] = [
        Action::Up,
        Action::Down,
        Action::Left,
        Action::Right,
        Action::Noop,
    ];

    pub fn id(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
            Action::Noop => "noop",
        }
    }

    pub fn from_name(name: &str) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Row/column displacement of the move (rows grow downward).
    pub fn delta(self) -> (i32, i32) {
        match self {
            Action::Up => (-1, 0),
            Action::Down => (1, 0),
            Action::Left => (0, -1),
            Action::Right => (0, 1),
            Action::Noop => (0, 0),
        }
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Kind of a grid object. The set is open-ended: objects introduced by a
/// novelty can carry a name unknown to the built-in domains and still take
/// part in spatial relations and rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectType {
    Car,
    Hole,
    Goal,
    Wall,
    Agent,
    Other(String),
}

impl ObjectType {
    /// Short symbol used in rule-file atoms (`p` is the agent/player).
    pub fn symbol(&self) -> &str {
        match self {
            ObjectType::Car => "c",
            ObjectType::Hole => "h",
            ObjectType::Goal => "g",
            ObjectType::Wall => "w",
            ObjectType::Agent => "p",
            ObjectType::Other(name) => name,
        }
    }

    pub fn from_symbol(sym: &str) -> ObjectType {
        match sym {
            "c" => ObjectType::Car,
            "h" => ObjectType::Hole,
            "g" => ObjectType::Goal,
            "w" => ObjectType::Wall,
            "p" => ObjectType::Agent,
            other => ObjectType::Other(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Crossroad,
    FrozenLake,
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::Crossroad => f.write_str("crossroad"),
            Domain::FrozenLake => f.write_str("frozenlake"),
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = EnvError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "crossroad" => Ok(Domain::Crossroad),
            "frozenlake" | "frozen_lake" => Ok(Domain::FrozenLake),
            other => Err(EnvError::InvalidConfig(format!("unknown domain `{other}`"))),
        }
    }
}

/// Novelty families. The first nine belong to the crossing domain, the last
/// two to the lake domain; `Baseline` is valid for both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoveltyKind {
    Baseline,
    SuperSlow,
    SuperFast,
    RandomSpeeds,
    Opposite,
    AllLeft,
    AllRight,
    Shifted,
    Reversed,
    ShuffledHoles,
    FlippedStartGoal,
}

impl NoveltyKind {
    pub fn name(self) -> &'static str {
        match self {
            NoveltyKind::Baseline => "baseline",
            NoveltyKind::SuperSlow => "super_slow",
            NoveltyKind::SuperFast => "super_fast",
            NoveltyKind::RandomSpeeds => "random_speeds",
            NoveltyKind::Opposite => "opposite",
            NoveltyKind::AllLeft => "all_left",
            NoveltyKind::AllRight => "all_right",
            NoveltyKind::Shifted => "shifted",
            NoveltyKind::Reversed => "reversed",
            NoveltyKind::ShuffledHoles => "shuffled_holes",
            NoveltyKind::FlippedStartGoal => "flipped_start_goal",
        }
    }

    pub fn from_name(name: &str) -> Option<NoveltyKind> {
        const ALL: [NoveltyKind; 11] = [
            NoveltyKind::Baseline,
            NoveltyKind::SuperSlow,
            NoveltyKind::SuperFast,
            NoveltyKind::RandomSpeeds,
            NoveltyKind::Opposite,
            NoveltyKind::AllLeft,
            NoveltyKind::AllRight,
            NoveltyKind::Shifted,
            NoveltyKind::Reversed,
            NoveltyKind::ShuffledHoles,
            NoveltyKind::FlippedStartGoal,
        ];
        ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn valid_for(self, domain: Domain) -> bool {
        match domain {
            Domain::Crossroad => !matches!(
                self,
                NoveltyKind::ShuffledHoles | NoveltyKind::FlippedStartGoal
            ),
            Domain::FrozenLake => matches!(
                self,
                NoveltyKind::Baseline | NoveltyKind::ShuffledHoles | NoveltyKind::FlippedStartGoal
            ),
        }
    }
}

impl std::fmt::Display for NoveltyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One object on the grid. `vel` is the per-move displacement (rows, cols);
/// static objects carry `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridObject {
    pub id: u32,
    pub ty: ObjectType,
    pub pos: (i32, i32),
    pub vel: (i32, i32),
}

/// Ground-truth environment state: agent cell, all objects, grid size and
/// the step counter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridState {
    pub agent_pos: (i32, i32),
    pub objects: Vec<GridObject>,
    pub grid_dims: (i32, i32),
    pub tick: u32,
}

impl GridState {
    pub fn objects_of<'a>(&'a self, ty: &'a ObjectType) -> impl Iterator<Item = &'a GridObject> + 'a {
        self.objects.iter().filter(move |o| &o.ty == ty)
    }
}

/// Result of one transition. `failure` marks death events only; truncation
/// at `max_steps` terminates with `failure = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next_state: GridState,
    pub reward: f64,
    pub terminal: bool,
    pub failure: bool,
}

/// Domain-specific layout data of a level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    Crossroad(CrossroadLayout),
    FrozenLake(FrozenLakeLayout),
}

/// A fully specified level: `(config, seed)` determines every episode
/// deterministically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelConfig {
    pub domain: Domain,
    pub novelty: NoveltyKind,
    pub layout: Layout,
    pub seed: u64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u32,
}

fn default_max_steps() -> u32 {
    200
}

impl LevelConfig {
    /// Standard lake level: 4x4, start top-left, goal bottom-right, 4 holes.
    pub fn frozenlake_baseline() -> LevelConfig {
        LevelConfig {
            domain: Domain::FrozenLake,
            novelty: NoveltyKind::Baseline,
            layout: Layout::FrozenLake(FrozenLakeLayout::standard()),
            seed: 0,
            max_steps: default_max_steps(),
        }
    }

    /// Standard crossing level: 15x11 grid, 7 car lanes, start bottom-center.
    pub fn crossroad_baseline() -> LevelConfig {
        LevelConfig {
            domain: Domain::Crossroad,
            novelty: NoveltyKind::Baseline,
            layout: Layout::Crossroad(CrossroadLayout::standard()),
            seed: 0,
            max_steps: default_max_steps(),
        }
    }

    pub fn baseline_for(domain: Domain) -> LevelConfig {
        match domain {
            Domain::Crossroad => LevelConfig::crossroad_baseline(),
            Domain::FrozenLake => LevelConfig::frozenlake_baseline(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("level config serializes")
    }

    pub fn from_toml(text: &str) -> Result<LevelConfig, EnvError> {
        toml::from_str(text).map_err(|e| EnvError::InvalidConfig(e.to_string()))
    }

    fn validate(&self) -> Result<(), EnvError> {
        match (&self.domain, &self.layout) {
            (Domain::Crossroad, Layout::Crossroad(l)) => l.validate(),
            (Domain::FrozenLake, Layout::FrozenLake(l)) => l.validate(),
            _ => Err(EnvError::InvalidConfig(
                "layout does not match domain".to_string(),
            )),
        }
    }
}

/// Dense, stable action list of a domain.
pub fn enumerate_actions(domain: Domain) -> &'static [Action] {
    match domain {
        Domain::Crossroad => &Action::ALL,
        Domain::FrozenLake => &Action::ALL[..4],
    }
}

/// Initial state of a level.
pub fn reset(config: &LevelConfig) -> Result<GridState, EnvError> {
    config.validate()?;
    match &config.layout {
        Layout::Crossroad(l) => crossroad::reset(l),
        Layout::FrozenLake(l) => frozenlake::reset(l),
    }
}

/// Advance one tick. Errors on terminal states and on actions outside the
/// domain's action set.
pub fn step(config: &LevelConfig, state: &GridState, action: Action) -> Result<StepOutcome, EnvError> {
    if is_terminal(config, state) {
        return Err(EnvError::TerminalState);
    }
    if !enumerate_actions(config.domain).contains(&action) {
        return Err(EnvError::InvalidAction {
            action,
            domain: config.domain,
        });
    }
    match &config.layout {
        Layout::Crossroad(l) => Ok(crossroad::step(l, config.max_steps, state, action)),
        Layout::FrozenLake(l) => Ok(frozenlake::step(l, config.max_steps, state, action)),
    }
}

/// Death predicate, decidable from the state alone: the agent occupies a
/// hole cell (lake) or shares a cell with a car (crossing).
pub fn is_failure(config: &LevelConfig, state: &GridState) -> bool {
    match &config.layout {
        Layout::Crossroad(_) => state
            .objects_of(&ObjectType::Car)
            .any(|o| o.pos == state.agent_pos),
        Layout::FrozenLake(_) => state
            .objects_of(&ObjectType::Hole)
            .any(|o| o.pos == state.agent_pos),
    }
}

pub fn is_goal(config: &LevelConfig, state: &GridState) -> bool {
    match &config.layout {
        Layout::Crossroad(l) => state.agent_pos.0 == l.goal_row,
        Layout::FrozenLake(_) => state
            .objects_of(&ObjectType::Goal)
            .any(|o| o.pos == state.agent_pos),
    }
}

pub fn is_terminal(config: &LevelConfig, state: &GridState) -> bool {
    is_failure(config, state) || is_goal(config, state) || state.tick >= config.max_steps
}

/// Flattened ground-truth feature vector fed to the Q-network. The length
/// depends only on the domain, not on the novelty level.
pub fn state_features<S: crate::Scalar>(config: &LevelConfig, state: &GridState) -> Vec<S> {
    let raw = match &config.layout {
        Layout::Crossroad(l) => crossroad::features(l, state),
        Layout::FrozenLake(l) => frozenlake::features(l, state),
    };
    raw.into_iter().map(S::from_f64).collect()
}

pub fn feature_dim(config: &LevelConfig) -> usize {
    match &config.layout {
        Layout::Crossroad(l) => crossroad::feature_dim(l),
        Layout::FrozenLake(l) => frozenlake::feature_dim(l),
    }
}

/// ASCII frame for the `--render` debug flag.
pub fn render(config: &LevelConfig, state: &GridState) -> String {
    match &config.layout {
        Layout::Crossroad(l) => crossroad::render(l, state),
        Layout::FrozenLake(l) => frozenlake::render(l, state),
    }
}

pub(crate) fn clamp_pos(pos: (i32, i32), dims: (i32, i32)) -> (i32, i32) {
    (pos.0.clamp(0, dims.0 - 1), pos.1.clamp(0, dims.1 - 1))
}

#[cfg(test)]
mod tests;
