use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn fl() -> LevelConfig {
    LevelConfig::frozenlake_baseline()
}

fn cr() -> LevelConfig {
    LevelConfig::crossroad_baseline()
}

#[test]
fn frozenlake_reset_places_everything() {
    let state = reset(&fl()).unwrap();
    assert_eq!(state.agent_pos, (0, 0));
    assert_eq!(state.grid_dims, (4, 4));
    assert_eq!(state.tick, 0);
    assert_eq!(state.objects_of(&ObjectType::Hole).count(), 4);
    let goal: Vec<_> = state.objects_of(&ObjectType::Goal).collect();
    assert_eq!(goal.len(), 1);
    assert_eq!(goal[0].pos, (3, 3));
    let frame = render(&fl(), &state);
    assert_eq!(frame, "t=0\nA . . .\n. H . H\n. . . H\nH . . G\n");
}

#[test]
fn crossroad_reset_has_seven_cars_in_distinct_lanes() {
    let state = reset(&cr()).unwrap();
    assert_eq!(state.agent_pos, (10, 7));
    let lanes: BTreeSet<i32> = state.objects_of(&ObjectType::Car).map(|o| o.pos.0).collect();
    assert_eq!(lanes, (2..=8).collect());
    assert_eq!(state.objects.len(), 7);
}

#[test]
fn reset_is_deterministic() {
    assert_eq!(reset(&fl()).unwrap(), reset(&fl()).unwrap());
    assert_eq!(reset(&cr()).unwrap(), reset(&cr()).unwrap());
}

#[test]
fn frozenlake_stepping_into_hole_kills() {
    // Agent left of the hole at (1, 1).
    let config = fl();
    let mut state = reset(&config).unwrap();
    state.agent_pos = (1, 0);
    let outcome = step(&config, &state, Action::Right).unwrap();
    assert!(outcome.failure);
    assert!(outcome.terminal);
    assert_eq!(outcome.reward, -1.0);
}

#[test]
fn frozenlake_wall_moves_keep_position() {
    let config = fl();
    let state = reset(&config).unwrap();
    let outcome = step(&config, &state, Action::Up).unwrap();
    assert_eq!(outcome.next_state.agent_pos, (0, 0));
    assert!(!outcome.terminal);
    assert_eq!(outcome.reward, 0.0);
}

#[test]
fn frozenlake_goal_gives_unit_reward() {
    let config = fl();
    let mut state = reset(&config).unwrap();
    state.agent_pos = (3, 2);
    let outcome = step(&config, &state, Action::Right).unwrap();
    assert!(outcome.terminal);
    assert!(!outcome.failure);
    assert_eq!(outcome.reward, 1.0);
}

/// Clamped movement: the cells reachable through the dynamics are exactly
/// the non-hole cells a flood fill reaches from the start.
#[test]
fn frozenlake_reachability_matches_flood_fill() {
    let config = fl();
    let layout = match &config.layout {
        Layout::FrozenLake(l) => l.clone(),
        _ => unreachable!(),
    };

    let mut reached: BTreeSet<(i32, i32)> = BTreeSet::new();
    let mut frontier = vec![reset(&config).unwrap()];
    reached.insert(layout.start);
    while let Some(state) = frontier.pop() {
        for &a in enumerate_actions(Domain::FrozenLake) {
            let outcome = step(&config, &state, a).unwrap();
            let pos = outcome.next_state.agent_pos;
            assert!(pos.0 >= 0 && pos.0 < 4 && pos.1 >= 0 && pos.1 < 4);
            if !outcome.terminal && reached.insert(pos) {
                frontier.push(outcome.next_state);
            }
        }
    }

    let mut flood: BTreeSet<(i32, i32)> = BTreeSet::new();
    let mut stack = vec![layout.start];
    flood.insert(layout.start);
    while let Some(p) = stack.pop() {
        for d in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            let q = (p.0 + d.0, p.1 + d.1);
            if q.0 < 0 || q.0 >= 4 || q.1 < 0 || q.1 >= 4 {
                continue;
            }
            if layout.holes.contains(&q) || q == layout.goal {
                continue;
            }
            if flood.insert(q) {
                stack.push(q);
            }
        }
    }
    assert_eq!(reached, flood);
    assert!(layout.solvable());
}

#[test]
fn crossroad_goal_row_terminates_with_bonus() {
    let config = cr();
    let mut state = reset(&config).unwrap();
    state.agent_pos = (1, 3);
    let outcome = step(&config, &state, Action::Up).unwrap();
    assert!(outcome.terminal);
    assert!(!outcome.failure);
    assert_eq!(outcome.reward, 1.0 + super::crossroad::STEP_PENALTY);
}

#[test]
fn crossroad_running_into_car_is_fatal_even_if_it_moves_away() {
    let config = cr();
    let mut state = reset(&config).unwrap();
    // Lane 8 car: put it directly north of the agent.
    state.agent_pos = (9, 5);
    state.objects[6].pos = (8, 5);
    let outcome = step(&config, &state, Action::Up).unwrap();
    assert!(outcome.failure);
    assert!(outcome.terminal);
    assert_eq!(outcome.reward, -1.0 + super::crossroad::STEP_PENALTY);
    // The tick froze: the collision is visible in the resulting state.
    assert!(is_failure(&config, &outcome.next_state));
}

#[test]
fn crossroad_car_arriving_on_agent_cell_is_fatal() {
    let config = cr();
    let mut state = reset(&config).unwrap();
    // Lane 4 car has speed +2; step onto the cell where it lands.
    state.agent_pos = (5, 5);
    for (i, o) in state.objects.iter_mut().enumerate() {
        o.pos.1 = if i == 2 { 3 } else { 14 };
    }
    let outcome = step(&config, &state, Action::Up).unwrap();
    assert!(outcome.failure, "car moved onto the agent's landing cell");
    assert!(is_failure(&config, &outcome.next_state));
}

#[test]
fn crossroad_pass_through_is_safe() {
    let config = cr();
    let mut state = reset(&config).unwrap();
    // Agent inside lane 5 (speed -2); the car two cells east jumps over the
    // agent's landing cell and ends on its starting cell.
    state.agent_pos = (5, 5);
    for (i, o) in state.objects.iter_mut().enumerate() {
        o.pos.1 = if i == 3 { 7 } else { 14 };
    }
    let outcome = step(&config, &state, Action::Right).unwrap();
    assert!(!outcome.failure, "cells only collide at tick boundaries");
    assert_eq!(outcome.next_state.agent_pos, (5, 6));
    assert_eq!(outcome.next_state.objects[3].pos, (5, 5));
}

#[test]
fn crossroad_cars_wrap_around() {
    let config = cr();
    let mut state = reset(&config).unwrap();
    state.objects[2].pos = (4, 14); // speed +2
    let outcome = step(&config, &state, Action::Noop).unwrap();
    assert_eq!(outcome.next_state.objects[2].pos, (4, 1));
}

#[test]
fn super_slow_cars_move_every_second_tick() {
    let levels = generate_novelty_levels(Domain::Crossroad, NoveltyKind::SuperSlow, 1, 7).unwrap();
    let config = &levels[0];
    let s0 = reset(config).unwrap();
    let s1 = step(config, &s0, Action::Noop).unwrap().next_state;
    let positions_after_1: Vec<_> = s1.objects.iter().map(|o| o.pos).collect();
    let initial: Vec<_> = s0.objects.iter().map(|o| o.pos).collect();
    assert_eq!(positions_after_1, initial, "odd tick: cars hold still");
    let s2 = step(config, &s1, Action::Noop).unwrap().next_state;
    let positions_after_2: Vec<_> = s2.objects.iter().map(|o| o.pos).collect();
    assert_ne!(positions_after_2, initial, "even tick: cars advance");
}

#[test]
fn trace_determinism_under_random_actions() {
    let config = cr();
    let actions = enumerate_actions(Domain::Crossroad);
    let run = |seq_seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seq_seed);
        let mut state = reset(&config).unwrap();
        let mut trace = Vec::new();
        for _ in 0..200 {
            let a = actions[rng.gen_range(0..actions.len())];
            let outcome = step(&config, &state, a).unwrap();
            trace.push((outcome.next_state.agent_pos, outcome.reward.to_bits(), outcome.terminal));
            if outcome.terminal {
                state = reset(&config).unwrap();
            } else {
                state = outcome.next_state;
            }
        }
        trace
    };
    assert_eq!(run(11), run(11));
}

/// `failure` agrees with the state-level death predicate on random rollouts.
#[test]
fn failure_flag_matches_state_predicate() {
    for config in [fl(), cr()] {
        let actions = enumerate_actions(config.domain);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut state = reset(&config).unwrap();
        for _ in 0..2_000 {
            let a = actions[rng.gen_range(0..actions.len())];
            let outcome = step(&config, &state, a).unwrap();
            assert_eq!(outcome.failure, is_failure(&config, &outcome.next_state));
            if outcome.failure {
                assert!(outcome.terminal, "failure implies terminal");
            }
            state = if outcome.terminal {
                reset(&config).unwrap()
            } else {
                outcome.next_state
            };
        }
    }
}

#[test]
fn episodes_truncate_at_max_steps() {
    let mut config = fl();
    config.max_steps = 25;
    let mut state = reset(&config).unwrap();
    for i in 1..=25 {
        let outcome = step(&config, &state, Action::Up).unwrap(); // forever into the wall
        assert_eq!(outcome.terminal, i == 25);
        assert!(!outcome.failure);
        state = outcome.next_state;
    }
    assert!(matches!(
        step(&config, &state, Action::Up),
        Err(EnvError::TerminalState)
    ));
}

#[test]
fn invalid_layouts_are_rejected() {
    let mut config = fl();
    if let Layout::FrozenLake(l) = &mut config.layout {
        l.holes.push(l.start);
    }
    assert!(matches!(reset(&config), Err(EnvError::InvalidConfig(_))));

    let mut config = cr();
    if let Layout::Crossroad(l) = &mut config.layout {
        l.cars[0].speed = 0;
    }
    assert!(matches!(reset(&config), Err(EnvError::InvalidConfig(_))));
}

#[test]
fn noop_is_not_a_lake_action() {
    let config = fl();
    let state = reset(&config).unwrap();
    assert!(matches!(
        step(&config, &state, Action::Noop),
        Err(EnvError::InvalidAction { .. })
    ));
}

#[test]
fn action_sets_are_stable() {
    assert_eq!(enumerate_actions(Domain::Crossroad).len(), 5);
    assert_eq!(enumerate_actions(Domain::FrozenLake).len(), 4);
    assert_eq!(enumerate_actions(Domain::Crossroad), enumerate_actions(Domain::Crossroad));
    for (i, a) in enumerate_actions(Domain::Crossroad).iter().enumerate() {
        assert_eq!(a.id(), i, "ids are dense");
    }
}

#[test]
fn opposite_novelty_negates_baseline_directions() {
    let base: Vec<i32> = CrossroadLayout::standard().cars.iter().map(|c| c.speed).collect();
    let levels = generate_novelty_levels(Domain::Crossroad, NoveltyKind::Opposite, 5, 42).unwrap();
    for level in &levels {
        let Layout::Crossroad(l) = &level.layout else { unreachable!() };
        for (car, b) in l.cars.iter().zip(&base) {
            assert_eq!(car.speed.signum(), -b.signum());
            assert!((car.speed.abs() - b.abs()).abs() <= 1, "jitter is at most one cell");
        }
    }
}

#[test]
fn shifted_novelty_rotates_the_speed_pattern() {
    let base: Vec<i32> = CrossroadLayout::standard().cars.iter().map(|c| c.speed).collect();
    let levels = generate_novelty_levels(Domain::Crossroad, NoveltyKind::Shifted, 3, 9).unwrap();
    for level in &levels {
        let Layout::Crossroad(l) = &level.layout else { unreachable!() };
        for (i, car) in l.cars.iter().enumerate() {
            let expected = base[(i + base.len() - 1) % base.len()];
            assert_eq!(car.speed.signum(), expected.signum());
        }
    }
}

#[test]
fn direction_novelties_align_all_cars() {
    for (kind, sign) in [(NoveltyKind::AllLeft, -1), (NoveltyKind::AllRight, 1)] {
        let levels = generate_novelty_levels(Domain::Crossroad, kind, 3, 5).unwrap();
        for level in &levels {
            let Layout::Crossroad(l) = &level.layout else { unreachable!() };
            assert!(l.cars.iter().all(|c| c.speed.signum() == sign));
        }
    }
}

#[test]
fn flipped_start_goal_mirrors_columns_only() {
    let levels =
        generate_novelty_levels(Domain::FrozenLake, NoveltyKind::FlippedStartGoal, 2, 1).unwrap();
    let base = FrozenLakeLayout::standard();
    for level in &levels {
        let Layout::FrozenLake(l) = &level.layout else { unreachable!() };
        assert_eq!(l.start, (0, 3));
        assert_eq!(l.goal, (3, 0));
        assert_eq!(l.holes, base.holes, "holes identical");
    }
}

#[test]
fn shuffled_holes_levels_are_solvable() {
    let levels =
        generate_novelty_levels(Domain::FrozenLake, NoveltyKind::ShuffledHoles, 40, 123).unwrap();
    for level in &levels {
        let Layout::FrozenLake(l) = &level.layout else { unreachable!() };
        assert_eq!(l.holes.len(), 4);
        assert!(!l.holes.contains(&l.start) && !l.holes.contains(&l.goal));
        // Independent BFS, not the generator's own check.
        let mut seen = BTreeSet::new();
        let mut stack = vec![l.start];
        seen.insert(l.start);
        let mut found = false;
        while let Some(p) = stack.pop() {
            if p == l.goal {
                found = true;
                break;
            }
            for d in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let q = (p.0 + d.0, p.1 + d.1);
                if q.0 < 0 || q.0 >= l.rows || q.1 < 0 || q.1 >= l.cols {
                    continue;
                }
                if !l.holes.contains(&q) && seen.insert(q) {
                    stack.push(q);
                }
            }
        }
        assert!(found, "generated layout must keep a path open");
    }
}

#[test]
fn novelty_generation_is_deterministic_and_validated() {
    let a = generate_novelty_levels(Domain::Crossroad, NoveltyKind::RandomSpeeds, 10, 77).unwrap();
    let b = generate_novelty_levels(Domain::Crossroad, NoveltyKind::RandomSpeeds, 10, 77).unwrap();
    assert_eq!(a, b);
    assert!(generate_novelty_levels(Domain::FrozenLake, NoveltyKind::Opposite, 1, 0).is_err());
    assert!(generate_novelty_levels(Domain::Crossroad, NoveltyKind::Baseline, 0, 0).is_err());
    for level in &a {
        assert!(reset(level).is_ok(), "generated levels pass validation");
    }
}

#[test]
fn level_config_roundtrips_through_toml() {
    for config in [fl(), cr()] {
        let text = config.to_toml();
        let parsed = LevelConfig::from_toml(&text).unwrap();
        assert_eq!(parsed, config);
    }
    let levels = generate_novelty_levels(Domain::Crossroad, NoveltyKind::SuperFast, 3, 2).unwrap();
    for level in levels {
        assert_eq!(LevelConfig::from_toml(&level.to_toml()).unwrap(), level);
    }
}

#[test]
fn feature_vectors_have_stable_dimension_across_novelties() {
    let base = cr();
    let dim = feature_dim(&base);
    for kind in [
        NoveltyKind::SuperSlow,
        NoveltyKind::Opposite,
        NoveltyKind::RandomSpeeds,
    ] {
        let levels = generate_novelty_levels(Domain::Crossroad, kind, 2, 3).unwrap();
        for level in &levels {
            assert_eq!(feature_dim(level), dim);
            let state = reset(level).unwrap();
            assert_eq!(state_features::<f64>(level, &state).len(), dim);
        }
    }
}
