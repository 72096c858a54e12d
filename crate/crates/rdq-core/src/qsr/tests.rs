use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use super::*;
use crate::envs::{reset, GridObject, GridState, LevelConfig, ObjectType};

fn g(d: u16, k: u16, r: u16) -> QsrGranularity {
    QsrGranularity::new(d, k, r).unwrap()
}

#[test]
fn east_close_example() {
    let region = region_of(1, 0, &g(8, 2, 2)).unwrap().unwrap();
    assert_eq!(region.direction_index, 0);
    assert_eq!(region.band_index, 0);
    assert_eq!(region.name, "e_close");
}

#[test]
fn axis_aligned_north_with_single_band() {
    let region = region_of(0, -2, &g(4, 1, 2)).unwrap().unwrap();
    assert_eq!(region.name, "n");
    assert_eq!(region.band_index, 0);
}

#[test]
fn outside_field_is_none_and_zero_offset_errors() {
    assert!(region_of(3, 0, &g(8, 2, 2)).unwrap().is_none());
    assert!(matches!(region_of(0, 0, &g(8, 2, 2)), Err(QsrError::ZeroOffset)));
}

#[test]
fn diagonal_boundary_is_half_open() {
    // 45 degrees sits exactly on the sector edge for D=4 and must land in
    // the upper sector (inclusive lower bound).
    let region = region_of(1, -1, &g(4, 1, 2)).unwrap().unwrap();
    assert_eq!(region.name, "n");
    let region = region_of(1, 1, &g(4, 1, 2)).unwrap().unwrap();
    assert_eq!(region.name, "s", "-45 degrees belongs to the east..south edge owner");
}

#[test]
fn granularity_validation() {
    assert!(QsrGranularity::new(3, 1, 2).is_err());
    assert!(QsrGranularity::new(4, 0, 2).is_err());
    assert!(QsrGranularity::new(4, 1, 0).is_err());
    assert_eq!(QsrGranularity::default16().granularity(), 16);
    assert_eq!(QsrGranularity::default64().granularity(), 64);
}

/// Every in-field cell belongs to exactly one region, and the per-region
/// counts sum to the number of in-field cells.
#[test]
fn regions_partition_the_field() {
    for gran in [g(8, 2, 2), g(16, 4, 4), g(4, 1, 3), g(12, 3, 3)] {
        let r = gran.field_radius as i32;
        let mut counts: BTreeMap<(u16, u16), usize> = BTreeMap::new();
        let mut cells = 0;
        for dx in -r..=r {
            for dy in -r..=r {
                if dx == 0 && dy == 0 {
                    continue;
                }
                cells += 1;
                let region = region_of(dx, dy, &gran).unwrap().expect("inside field");
                assert!(region.direction_index < gran.directions);
                assert!(region.band_index < gran.distance_bands);
                *counts.entry((region.direction_index, region.band_index)).or_default() += 1;
            }
        }
        assert_eq!(counts.values().sum::<usize>(), cells as usize);
        assert_eq!(cells, (2 * r + 1) * (2 * r + 1) - 1);
    }
}

/// Rotating an offset by a quarter turn advances the sector by D/4 and
/// keeps the band.
#[test]
fn quarter_turn_rotation_consistency() {
    for gran in [g(4, 1, 3), g(8, 2, 2), g(16, 4, 4)] {
        let q = gran.directions / 4;
        let r = gran.field_radius as i32;
        for dx in -r..=r {
            for dy in -r..=r {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let a = region_of(dx, dy, &gran).unwrap().unwrap();
                // Counterclockwise quarter turn in grid coordinates
                // (rows grow downward): (dx, dy) -> (dy, -dx).
                let b = region_of(dy, -dx, &gran).unwrap().unwrap();
                assert_eq!(b.direction_index, (a.direction_index + q) % gran.directions);
                assert_eq!(b.band_index, a.band_index);
            }
        }
    }
}

/// Coarsening the direction count by an odd factor maps each fine sector
/// into exactly one coarse sector. (Even factors split the sectors that
/// straddle the coarse cone edges; centered cones make the boundaries
/// coincide only for odd ratios.)
#[test]
fn odd_factor_refinement_nests() {
    let fine = g(12, 1, 4);
    let coarse = g(4, 1, 4);
    let mut map: BTreeMap<u16, BTreeSet<u16>> = BTreeMap::new();
    let r = fine.field_radius as i32;
    for dx in -r..=r {
        for dy in -r..=r {
            if dx == 0 && dy == 0 {
                continue;
            }
            let f = region_of(dx, dy, &fine).unwrap().unwrap();
            let c = region_of(dx, dy, &coarse).unwrap().unwrap();
            map.entry(f.direction_index).or_default().insert(c.direction_index);
        }
    }
    for (fine_sector, coarse_sectors) in map {
        assert_eq!(
            coarse_sectors.len(),
            1,
            "fine sector {fine_sector} crosses coarse sectors {coarse_sectors:?}"
        );
    }
}

#[test]
fn band_ranges_split_the_radius_evenly() {
    let gran = g(8, 2, 4);
    assert_eq!(gran.band_range(0), (1, 2));
    assert_eq!(gran.band_range(1), (3, 4));
    let gran = g(16, 4, 4);
    for b in 0..4 {
        assert_eq!(gran.band_range(b), (b + 1, b + 1));
    }
}

#[test]
fn encode_crossroad_car_east() {
    let level = LevelConfig::crossroad_baseline();
    let mut state = reset(&level).unwrap();
    state.agent_pos = (4, 6);
    state.objects = vec![GridObject {
        id: 2,
        ty: ObjectType::Car,
        pos: (4, 7),
        vel: (0, 2),
    }];
    let qsr = encode(&state, &QsrGranularity::default16());
    assert_eq!(qsr.len(), 1);
    assert_eq!(qsr.relations()[0].atom(), "e_close(p, c)");
}

#[test]
fn encode_empty_field() {
    let level = LevelConfig::crossroad_baseline();
    let mut state = reset(&level).unwrap();
    state.agent_pos = (10, 7);
    for o in state.objects.iter_mut() {
        o.pos = (2, 0); // all far away
    }
    let qsr = encode(&state, &QsrGranularity::default16());
    assert!(qsr.is_empty());
}

/// Brute-force re-scan of the field agrees with `encode`.
#[test]
fn encode_matches_field_scan() {
    let gran = QsrGranularity::default16();
    let state = GridState {
        agent_pos: (2, 2),
        objects: vec![
            GridObject { id: 0, ty: ObjectType::Hole, pos: (0, 2), vel: (0, 0) },
            GridObject { id: 1, ty: ObjectType::Hole, pos: (2, 1), vel: (0, 0) },
            GridObject { id: 2, ty: ObjectType::Goal, pos: (3, 3), vel: (0, 0) },
            GridObject { id: 3, ty: ObjectType::Hole, pos: (2, 40), vel: (0, 0) },
        ],
        grid_dims: (50, 50),
        tick: 0,
    };
    let qsr = encode(&state, &gran);
    assert_eq!(qsr.len(), 3, "two nearby holes and the goal; far hole omitted");

    let mut expected = Vec::new();
    let r = gran.field_radius as i32;
    for dx in -r..=r {
        for dy in -r..=r {
            if dx == 0 && dy == 0 {
                continue;
            }
            let cell = (state.agent_pos.0 + dy, state.agent_pos.1 + dx);
            for o in &state.objects {
                if o.pos == cell {
                    let region = region_of(dx, dy, &gran).unwrap().unwrap();
                    expected.push(Relation::new(region, o.ty.clone()));
                }
            }
        }
    }
    assert_eq!(qsr, QsrState::new(expected));
}

#[test]
fn encode_is_pure() {
    let level = LevelConfig::frozenlake_baseline();
    let state = reset(&level).unwrap();
    let gran = QsrGranularity::default16();
    assert_eq!(encode(&state, &gran), encode(&state, &gran));
}

#[test]
fn atoms_follow_the_naming_table() {
    let gran = QsrGranularity::default16();
    let north_close = gran.parse_region("n_close").unwrap();
    assert_eq!(Relation::new(north_close, ObjectType::Car).atom(), "n_close(p, c)");
    let east_far = gran.parse_region("e_far").unwrap();
    assert_eq!(Relation::new(east_far, ObjectType::Hole).atom(), "e_far(p, h)");
}

#[test]
fn region_names_are_bijective() {
    for gran in [g(8, 2, 2), g(16, 4, 4), g(6, 5, 5)] {
        let mut seen = BTreeSet::new();
        for d in 0..gran.directions {
            for b in 0..gran.distance_bands {
                assert!(seen.insert(gran.region_name(d, b)), "duplicate region name");
            }
        }
        assert_eq!(seen.len() as u32, gran.granularity());
    }
}

#[test]
fn naming_table_lists_every_symbol() {
    let gran = QsrGranularity::default16();
    let table = gran.naming_table();
    for d in 0..gran.directions {
        for b in 0..gran.distance_bands {
            assert!(table.contains(&gran.region_name(d, b)));
        }
    }
}

#[test]
fn unknown_atom_is_rejected() {
    let gran = QsrGranularity::default16();
    assert!(parse_atom("zz_close(p, c)", &gran).is_err());
    assert!(parse_atom("n_close(q, c)", &gran).is_err());
    assert!(parse_atom("n_close(p)", &gran).is_err());
}

proptest! {
    /// parse(atom(r)) is the identity for every region and object type,
    /// including novel (open-ended) type names.
    #[test]
    fn atom_roundtrip(d in 0u16..8, b in 0u16..2, ty in 0usize..6) {
        let gran = QsrGranularity::default16();
        let object = match ty {
            0 => ObjectType::Car,
            1 => ObjectType::Hole,
            2 => ObjectType::Goal,
            3 => ObjectType::Wall,
            4 => ObjectType::Other("drone".to_string()),
            _ => ObjectType::Other("x9".to_string()),
        };
        let relation = Relation::new(gran.region(d, b), object);
        let parsed = parse_atom(&relation.atom(), &gran).unwrap();
        prop_assert_eq!(parsed, relation);
    }

    /// Canonicalization is order-insensitive.
    #[test]
    fn qsr_state_canonical_order(perm in proptest::sample::subsequence(vec![0usize,1,2,3,4], 5)) {
        let gran = QsrGranularity::default16();
        let rels: Vec<Relation> = [(1,0),(0,1),(2,1),(5,0),(7,1)]
            .iter()
            .map(|&(d, b)| Relation::new(gran.region(d, b), ObjectType::Car))
            .collect();
        let chosen: Vec<Relation> = perm.iter().map(|&i| rels[i].clone()).collect();
        let mut reversed = chosen.clone();
        reversed.reverse();
        prop_assert_eq!(QsrState::new(chosen), QsrState::new(reversed));
    }
}
