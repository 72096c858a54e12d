//! Lane-crossing domain: reach the top row without touching a car.
//!
//! Cars stay in their lanes and move horizontally with wrap-around; a car
//! with `move_period` n advances only every n-th tick. Within one tick the
//! agent's move is resolved against the car positions at the start of the
//! tick: stepping onto an occupied cell is a crash and freezes the tick, so
//! the collision is visible in the resulting state. Otherwise cars advance
//! and a car arriving on the agent's cell runs it over. Rewards: -0.01 per
//! step, +1 on reaching the goal row, -1 on a collision.

use serde::{Deserialize, Serialize};

use super::{clamp_pos, Action, EnvError, GridObject, GridState, ObjectType, StepOutcome};

pub const STEP_PENALTY: f64 = -0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarSpec {
    pub row: i32,
    pub start_col: i32,
    /// Signed displacement per move; positive is rightward (east).
    pub speed: i32,
    #[serde(default = "default_move_period")]
    pub move_period: u32,
}

fn default_move_period() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossroadLayout {
    pub rows: i32,
    pub cols: i32,
    pub start: (i32, i32),
    pub goal_row: i32,
    pub cars: Vec<CarSpec>,
}

impl CrossroadLayout {
    /// 15 columns x 11 rows; rows 2..=8 are the seven car lanes, the agent
    /// starts bottom-center and the goal is the top row.
    pub fn standard() -> CrossroadLayout {
        let speeds = [1, -1, 2, -2, 1, -1, 2];
        let cars = speeds
            .iter()
            .enumerate()
            .map(|(i, &speed)| CarSpec {
                row: 2 + i as i32,
                start_col: (2 * i) as i32,
                speed,
                move_period: 1,
            })
            .collect();
        CrossroadLayout {
            rows: 11,
            cols: 15,
            start: (10, 7),
            goal_row: 0,
            cars,
        }
    }

    pub(super) fn validate(&self) -> Result<(), EnvError> {
        if self.rows < 3 || self.cols < 2 {
            return Err(EnvError::InvalidConfig("crossing grid must be at least 2x3".into()));
        }
        let inside = |p: (i32, i32)| p.0 >= 0 && p.0 < self.rows && p.1 >= 0 && p.1 < self.cols;
        if !inside(self.start) {
            return Err(EnvError::InvalidConfig("start outside the grid".into()));
        }
        if self.goal_row < 0 || self.goal_row >= self.rows {
            return Err(EnvError::InvalidConfig("goal row outside the grid".into()));
        }
        if self.goal_row == self.start.0 {
            return Err(EnvError::InvalidConfig("start row equals goal row".into()));
        }
        for (i, car) in self.cars.iter().enumerate() {
            if !inside((car.row, car.start_col)) {
                return Err(EnvError::InvalidConfig(format!("car {i} outside the grid")));
            }
            if (car.row, car.start_col) == self.start {
                return Err(EnvError::InvalidConfig("start cell occupied by car".into()));
            }
            if car.row == self.goal_row {
                return Err(EnvError::InvalidConfig(format!("car {i} on the goal row")));
            }
            if car.speed == 0 {
                return Err(EnvError::InvalidConfig(format!("car {i} has zero speed")));
            }
            if car.move_period == 0 {
                return Err(EnvError::InvalidConfig(format!("car {i} has zero move period")));
            }
        }
        Ok(())
    }

    fn max_period(&self) -> u32 {
        self.cars.iter().map(|c| c.move_period).max().unwrap_or(1)
    }
}

pub(super) fn reset(layout: &CrossroadLayout) -> Result<GridState, EnvError> {
    let objects = layout
        .cars
        .iter()
        .enumerate()
        .map(|(i, car)| GridObject {
            id: i as u32,
            ty: ObjectType::Car,
            pos: (car.row, car.start_col),
            vel: (0, car.speed),
        })
        .collect();
    Ok(GridState {
        agent_pos: layout.start,
        objects,
        grid_dims: (layout.rows, layout.cols),
        tick: 0,
    })
}

fn car_moves_now(spec: &CarSpec, next_tick: u32) -> bool {
    next_tick % spec.move_period == 0
}

pub(super) fn step(
    layout: &CrossroadLayout,
    max_steps: u32,
    state: &GridState,
    action: Action,
) -> StepOutcome {
    let next_tick = state.tick + 1;
    let d = action.delta();
    let agent_pos = clamp_pos(
        (state.agent_pos.0 + d.0, state.agent_pos.1 + d.1),
        state.grid_dims,
    );

    let crashed = state
        .objects_of(&ObjectType::Car)
        .any(|o| o.pos == agent_pos);

    let objects = if crashed {
        // The tick freezes on impact so the overlap stays observable.
        state.objects.clone()
    } else {
        state
            .objects
            .iter()
            .map(|o| {
                let mut o = o.clone();
                if o.ty == ObjectType::Car {
                    let spec = &layout.cars[o.id as usize];
                    if car_moves_now(spec, next_tick) {
                        o.pos.1 = (o.pos.1 + spec.speed).rem_euclid(layout.cols);
                    }
                }
                o
            })
            .collect()
    };

    let run_over = !crashed && objects.iter().any(|o| o.ty == ObjectType::Car && o.pos == agent_pos);
    let failure = crashed || run_over;
    let goal = !failure && agent_pos.0 == layout.goal_row;

    let reward = STEP_PENALTY + if failure { -1.0 } else if goal { 1.0 } else { 0.0 };
    let next_state = GridState {
        agent_pos,
        objects,
        grid_dims: state.grid_dims,
        tick: next_tick,
    };
    StepOutcome {
        terminal: failure || goal || next_tick >= max_steps,
        next_state,
        reward,
        failure,
    }
}

pub(super) fn feature_dim(layout: &CrossroadLayout) -> usize {
    3 + 3 * layout.cars.len()
}

/// Agent cell, per-car (row, col, speed), and the tick phase for cars that
/// move less often than every tick.
pub(super) fn features(layout: &CrossroadLayout, state: &GridState) -> Vec<f64> {
    let rn = (layout.rows - 1).max(1) as f64;
    let cn = (layout.cols - 1).max(1) as f64;
    let mut v = Vec::with_capacity(feature_dim(layout));
    v.push(state.agent_pos.0 as f64 / rn);
    v.push(state.agent_pos.1 as f64 / cn);
    for o in state.objects_of(&ObjectType::Car) {
        let spec = &layout.cars[o.id as usize];
        v.push(o.pos.0 as f64 / rn);
        v.push(o.pos.1 as f64 / cn);
        v.push(spec.speed as f64 / 4.0);
    }
    let period = layout.max_period();
    v.push((state.tick % period) as f64 / period as f64);
    v
}

pub(super) fn render(layout: &CrossroadLayout, state: &GridState) -> String {
    let mut out = format!("t={}\n", state.tick);
    let cars: Vec<(i32, i32)> = state
        .objects_of(&ObjectType::Car)
        .map(|o| o.pos)
        .collect();
    for r in 0..layout.rows {
        for c in 0..layout.cols {
            let p = (r, c);
            let ch = if p == state.agent_pos {
                'A'
            } else if cars.contains(&p) {
                'C'
            } else if r == layout.goal_row {
                '='
            } else {
                '.'
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}
