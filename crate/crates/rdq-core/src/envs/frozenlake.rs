//! 4x4 lake domain: reach the goal corner without stepping into a hole.
//! Movement is deterministic; moves into the outer wall leave the agent in
//! place. Rewards: +1 on the goal, -1 on a hole, 0 otherwise.

use serde::{Deserialize, Serialize};

use super::{clamp_pos, Action, EnvError, GridObject, GridState, ObjectType, StepOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrozenLakeLayout {
    pub rows: i32,
    pub cols: i32,
    pub start: (i32, i32),
    pub goal: (i32, i32),
    pub holes: Vec<(i32, i32)>,
}

impl FrozenLakeLayout {
    /// The standard map:
    /// ```text
    /// A . . .
    /// . H . H
    /// . . . H
    /// H . . G
    /// ```
    pub fn standard() -> FrozenLakeLayout {
        FrozenLakeLayout {
            rows: 4,
            cols: 4,
            start: (0, 0),
            goal: (3, 3),
            holes: vec![(1, 1), (1, 3), (2, 3), (3, 0)],
        }
    }

    pub(super) fn validate(&self) -> Result<(), EnvError> {
        let dims = (self.rows, self.cols);
        let inside = |p: (i32, i32)| p.0 >= 0 && p.0 < dims.0 && p.1 >= 0 && p.1 < dims.1;
        if self.rows < 2 || self.cols < 2 {
            return Err(EnvError::InvalidConfig("lake grid must be at least 2x2".into()));
        }
        if !inside(self.start) || !inside(self.goal) {
            return Err(EnvError::InvalidConfig("start/goal outside the grid".into()));
        }
        if self.start == self.goal {
            return Err(EnvError::InvalidConfig("start and goal coincide".into()));
        }
        for (i, &h) in self.holes.iter().enumerate() {
            if !inside(h) {
                return Err(EnvError::InvalidConfig(format!("hole {i} outside the grid")));
            }
            if h == self.start {
                return Err(EnvError::InvalidConfig("start cell occupied by hole".into()));
            }
            if h == self.goal {
                return Err(EnvError::InvalidConfig("goal cell occupied by hole".into()));
            }
            if self.holes[..i].contains(&h) {
                return Err(EnvError::InvalidConfig(format!("duplicate hole at {h:?}")));
            }
        }
        Ok(())
    }

    /// True iff a hole-free 4-neighbor path connects start and goal.
    pub fn solvable(&self) -> bool {
        let mut seen = vec![false; (self.rows * self.cols) as usize];
        let idx = |p: (i32, i32)| (p.0 * self.cols + p.1) as usize;
        let mut stack = vec![self.start];
        seen[idx(self.start)] = true;
        while let Some(p) = stack.pop() {
            if p == self.goal {
                return true;
            }
            for d in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let q = (p.0 + d.0, p.1 + d.1);
                if q.0 < 0 || q.0 >= self.rows || q.1 < 0 || q.1 >= self.cols {
                    continue;
                }
                if !seen[idx(q)] && !self.holes.contains(&q) {
                    seen[idx(q)] = true;
                    stack.push(q);
                }
            }
        }
        false
    }
}

pub(super) fn reset(layout: &FrozenLakeLayout) -> Result<GridState, EnvError> {
    let mut objects = Vec::with_capacity(layout.holes.len() + 1);
    for (i, &h) in layout.holes.iter().enumerate() {
        objects.push(GridObject {
            id: i as u32,
            ty: ObjectType::Hole,
            pos: h,
            vel: (0, 0),
        });
    }
    objects.push(GridObject {
        id: layout.holes.len() as u32,
        ty: ObjectType::Goal,
        pos: layout.goal,
        vel: (0, 0),
    });
    Ok(GridState {
        agent_pos: layout.start,
        objects,
        grid_dims: (layout.rows, layout.cols),
        tick: 0,
    })
}

pub(super) fn step(
    layout: &FrozenLakeLayout,
    max_steps: u32,
    state: &GridState,
    action: Action,
) -> StepOutcome {
    let d = action.delta();
    let target = (state.agent_pos.0 + d.0, state.agent_pos.1 + d.1);
    let agent_pos = clamp_pos(target, state.grid_dims);

    let next_state = GridState {
        agent_pos,
        objects: state.objects.clone(),
        grid_dims: state.grid_dims,
        tick: state.tick + 1,
    };

    let failure = layout.holes.contains(&agent_pos);
    let goal = agent_pos == layout.goal;
    let reward = if failure {
        -1.0
    } else if goal {
        1.0
    } else {
        0.0
    };
    StepOutcome {
        terminal: failure || goal || next_state.tick >= max_steps,
        next_state,
        reward,
        failure,
    }
}

pub(super) fn feature_dim(layout: &FrozenLakeLayout) -> usize {
    4 + (layout.rows * layout.cols) as usize
}

/// Agent and goal cells (normalized) plus the hole occupancy grid.
pub(super) fn features(layout: &FrozenLakeLayout, state: &GridState) -> Vec<f64> {
    let rn = (layout.rows - 1).max(1) as f64;
    let cn = (layout.cols - 1).max(1) as f64;
    let mut v = Vec::with_capacity(feature_dim(layout));
    v.push(state.agent_pos.0 as f64 / rn);
    v.push(state.agent_pos.1 as f64 / cn);
    v.push(layout.goal.0 as f64 / rn);
    v.push(layout.goal.1 as f64 / cn);
    let mut grid = vec![0.0; (layout.rows * layout.cols) as usize];
    for o in state.objects_of(&ObjectType::Hole) {
        grid[(o.pos.0 * layout.cols + o.pos.1) as usize] = 1.0;
    }
    v.extend(grid);
    v
}

pub(super) fn render(layout: &FrozenLakeLayout, state: &GridState) -> String {
    let mut out = format!("t={}\n", state.tick);
    for r in 0..layout.rows {
        for c in 0..layout.cols {
            let p = (r, c);
            let ch = if p == state.agent_pos {
                'A'
            } else if layout.holes.contains(&p) {
                'H'
            } else if p == layout.goal {
                'G'
            } else {
                '.'
            };
            out.push(ch);
            if c + 1 < layout.cols {
                out.push(' ');
            }
        }
        out.push('\n');
    }
    out
}
