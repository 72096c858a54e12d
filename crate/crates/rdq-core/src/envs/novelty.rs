//! Seeded generators that turn a novelty kind into concrete level configs.
//!
//! Crossing novelties change car speeds/directions and add per-level noise:
//! a speed jitter of one cell (never through zero) and random initial car
//! columns. Lake novelties reshuffle holes (kept solvable) or mirror the
//! start/goal columns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    CrossroadLayout, Domain, EnvError, FrozenLakeLayout, Layout, LevelConfig, NoveltyKind,
};

/// Produce `count` level configs realizing `kind`, deterministically from
/// `seed`. Generated lake levels are always solvable.
pub fn generate_novelty_levels(
    domain: Domain,
    kind: NoveltyKind,
    count: usize,
    seed: u64,
) -> Result<Vec<LevelConfig>, EnvError> {
    if count == 0 {
        return Err(EnvError::InvalidConfig("level count must be at least 1".into()));
    }
    if !kind.valid_for(domain) {
        return Err(EnvError::InvalidConfig(format!(
            "novelty kind `{kind}` is not defined for domain `{domain}`"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let level_seed: u64 = rng.gen();
            let mut level_rng = ChaCha8Rng::seed_from_u64(level_seed);
            let layout = match domain {
                Domain::Crossroad => Layout::Crossroad(crossroad_level(kind, &mut level_rng)),
                Domain::FrozenLake => Layout::FrozenLake(frozenlake_level(kind, &mut level_rng)),
            };
            Ok(LevelConfig {
                domain,
                novelty: kind,
                layout,
                seed: level_seed,
                max_steps: 200,
            })
        })
        .collect()
}

fn crossroad_level(kind: NoveltyKind, rng: &mut ChaCha8Rng) -> CrossroadLayout {
    let mut layout = CrossroadLayout::standard();
    let base: Vec<i32> = layout.cars.iter().map(|c| c.speed).collect();
    let n = base.len();

    let (speeds, period): (Vec<i32>, u32) = match kind {
        NoveltyKind::Baseline => (base.clone(), 1),
        NoveltyKind::SuperSlow => (base.iter().map(|s| s.signum()).collect(), 2),
        NoveltyKind::SuperFast => (base.iter().map(|s| 3 * s.signum()).collect(), 1),
        NoveltyKind::RandomSpeeds => (
            (0..n)
                .map(|_| {
                    let mag = rng.gen_range(1..=3);
                    if rng.gen_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect(),
            1,
        ),
        NoveltyKind::Opposite => (base.iter().map(|s| -s).collect(), 1),
        NoveltyKind::AllLeft => (base.iter().map(|s| -s.abs()).collect(), 1),
        NoveltyKind::AllRight => (base.iter().map(|s| s.abs()).collect(), 1),
        // The lane keeps its neighbor's baseline speed, rotated one step down.
        NoveltyKind::Shifted => ((0..n).map(|i| base[(i + n - 1) % n]).collect(), 1),
        NoveltyKind::Reversed => ((0..n).map(|i| base[n - 1 - i]).collect(), 1),
        _ => unreachable!("kind validated against domain"),
    };

    for (car, speed) in layout.cars.iter_mut().zip(speeds) {
        car.speed = jitter_speed(speed, rng);
        car.move_period = period;
        car.start_col = rng.gen_range(0..layout.cols);
    }
    layout
}

/// Add -1/0/+1 to the signed speed, keeping it nonzero and within +-4.
fn jitter_speed(speed: i32, rng: &mut ChaCha8Rng) -> i32 {
    let jittered = speed + rng.gen_range(-1..=1);
    let nonzero = if jittered == 0 { speed.signum() } else { jittered };
    nonzero.clamp(-4, 4)
}

fn frozenlake_level(kind: NoveltyKind, rng: &mut ChaCha8Rng) -> FrozenLakeLayout {
    let base = FrozenLakeLayout::standard();
    match kind {
        NoveltyKind::Baseline => base,
        NoveltyKind::FlippedStartGoal => {
            let mut layout = base;
            layout.start.1 = layout.cols - 1 - layout.start.1;
            layout.goal.1 = layout.cols - 1 - layout.goal.1;
            layout
        }
        NoveltyKind::ShuffledHoles => loop {
            let mut layout = base.clone();
            let mut free: Vec<(i32, i32)> = (0..layout.rows)
                .flat_map(|r| (0..layout.cols).map(move |c| (r, c)))
                .filter(|&p| p != layout.start && p != layout.goal)
                .collect();
            let mut holes = Vec::with_capacity(base.holes.len());
            for _ in 0..base.holes.len() {
                let i = rng.gen_range(0..free.len());
                holes.push(free.swap_remove(i));
            }
            holes.sort_unstable();
            layout.holes = holes;
            if layout.solvable() {
                return layout;
            }
        },
        _ => unreachable!("kind validated against domain"),
    }
}
