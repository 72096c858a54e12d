//! Qualitative spatial relations between the agent and nearby objects.
//!
//! The square observation field around the agent is partitioned into
//! `directions x distance_bands` regions: cone-shaped direction sectors
//! (sector 0 centered east, counterclockwise, half-open at the upper angle)
//! crossed with Chebyshev distance rings of equal width. Each object inside
//! the field yields one [`Relation`]; the set of relations is the symbolic
//! state the safety rules are written against.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;
use thiserror::Error;

use crate::envs::{GridState, ObjectType};

#[derive(Debug, Error)]
pub enum QsrError {
    #[error("invalid granularity: {0}")]
    InvalidGranularity(String),
    #[error("zero offset has no direction: the object is on the agent")]
    ZeroOffset,
    #[error("malformed atom `{atom}`: {reason}")]
    MalformedAtom { atom: String, reason: String },
}

/// Partition parameters of the observation field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QsrGranularity {
    pub directions: u16,
    pub distance_bands: u16,
    pub field_radius: u16,
}

impl QsrGranularity {
    pub fn new(directions: u16, distance_bands: u16, field_radius: u16) -> Result<Self, QsrError> {
        if directions < 4 {
            return Err(QsrError::InvalidGranularity(
                "at least 4 direction sectors required".into(),
            ));
        }
        if distance_bands == 0 {
            return Err(QsrError::InvalidGranularity("at least 1 distance band required".into()));
        }
        if field_radius == 0 {
            return Err(QsrError::InvalidGranularity("field radius must be positive".into()));
        }
        Ok(QsrGranularity {
            directions,
            distance_bands,
            field_radius,
        })
    }

    /// 8 direction sectors x 2 bands over a radius-2 field (granularity 16).
    pub fn default16() -> QsrGranularity {
        QsrGranularity::new(8, 2, 2).expect("valid")
    }

    /// 16 direction sectors x 4 bands over a radius-4 field (granularity 64).
    pub fn default64() -> QsrGranularity {
        QsrGranularity::new(16, 4, 4).expect("valid")
    }

    /// Total number of region symbols.
    pub fn granularity(&self) -> u32 {
        self.directions as u32 * self.distance_bands as u32
    }

    pub fn region(&self, direction_index: u16, band_index: u16) -> RegionSymbol {
        debug_assert!(direction_index < self.directions && band_index < self.distance_bands);
        RegionSymbol {
            direction_index,
            band_index,
            name: self.region_name(direction_index, band_index),
        }
    }

    pub fn region_name(&self, direction_index: u16, band_index: u16) -> String {
        let dir = direction_name(self.directions, direction_index);
        match band_name(self.distance_bands, band_index) {
            Some(band) => format!("{dir}_{band}"),
            None => dir,
        }
    }

    pub fn parse_region(&self, name: &str) -> Option<RegionSymbol> {
        for d in 0..self.directions {
            for b in 0..self.distance_bands {
                if self.region_name(d, b) == name {
                    return Some(self.region(d, b));
                }
            }
        }
        None
    }

    /// Reference table mapping every region symbol to its sector and band,
    /// for humans editing rule files.
    pub fn naming_table(&self) -> String {
        let mut out = String::from("# region symbols: <name>\tdirection sector\tdistance band\n");
        let width = 360.0 / self.directions as f64;
        for d in 0..self.directions {
            let center = d as f64 * width;
            for b in 0..self.distance_bands {
                let (lo, hi) = self.band_range(b);
                out.push_str(&format!(
                    "{}\tsector {} (center {:.1} deg ccw from east, width {:.1} deg)\tband {} (chebyshev {}..={})\n",
                    self.region_name(d, b),
                    d,
                    center,
                    width,
                    b,
                    lo,
                    hi,
                ));
            }
        }
        out
    }

    /// Inclusive Chebyshev distance range of a band.
    pub fn band_range(&self, band_index: u16) -> (u16, u16) {
        let k = self.distance_bands as u32;
        let r = self.field_radius as u32;
        let mut lo = 0;
        let mut hi = 0;
        for d in 1..=r {
            if (d - 1) * k / r == band_index as u32 {
                if lo == 0 {
                    lo = d;
                }
                hi = d;
            }
        }
        (lo as u16, hi as u16)
    }
}

fn direction_name(directions: u16, index: u16) -> String {
    const D4: [&str; 4] = ["e", "n", "w", "s"];
    const D8: [&str; 8] = ["e", "ne", "n", "nw", "w", "sw", "s", "se"];
    const D16: [&str; 16] = [
        "e", "ene", "ne", "nne", "n", "nnw", "nw", "wnw", "w", "wsw", "sw", "ssw", "s", "sse",
        "se", "ese",
    ];
    match directions {
        4 => D4[index as usize].to_string(),
        8 => D8[index as usize].to_string(),
        16 => D16[index as usize].to_string(),
        _ => format!("d{index}"),
    }
}

fn band_name(bands: u16, index: u16) -> Option<String> {
    match bands {
        1 => None,
        2 => Some(["close", "far"][index as usize].to_string()),
        3 => Some(["close", "mid", "far"][index as usize].to_string()),
        _ => Some(format!("r{index}")),
    }
}

/// One cell-region of the partitioned field. The name is a stable function
/// of the granularity; rule files depend on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionSymbol {
    pub direction_index: u16,
    pub band_index: u16,
    pub name: String,
}

/// A spatial relation `region(agent, object_type)`. The subject is always
/// the agent, so only the region and the object type are stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub region: RegionSymbol,
    pub object: ObjectType,
}

impl Relation {
    pub fn new(region: RegionSymbol, object: ObjectType) -> Relation {
        Relation { region, object }
    }

    /// Canonical text form, e.g. `n_close(p, c)`.
    pub fn atom(&self) -> String {
        format!("{}(p, {})", self.region.name, self.object.symbol())
    }
}

// Relations order by atom text so canonicalized relation lists match the
// rule-file sort; region indices break ties across granularities.
impl Ord for Relation {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.region.name.as_str(), self.object.symbol())
            .cmp(&(other.region.name.as_str(), other.object.symbol()))
            .then_with(|| {
                (self.region.direction_index, self.region.band_index)
                    .cmp(&(other.region.direction_index, other.region.band_index))
            })
    }
}

impl PartialOrd for Relation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Parse the canonical atom form back into a relation.
pub fn parse_atom(text: &str, g: &QsrGranularity) -> Result<Relation, QsrError> {
    let malformed = |reason: &str| QsrError::MalformedAtom {
        atom: text.to_string(),
        reason: reason.to_string(),
    };
    let text = text.trim();
    let open = text.find('(').ok_or_else(|| malformed("missing `(`"))?;
    if !text.ends_with(')') {
        return Err(malformed("missing `)`"));
    }
    let name = &text[..open];
    let args: Vec<&str> = text[open + 1..text.len() - 1]
        .split(',')
        .map(str::trim)
        .collect();
    if args.len() != 2 {
        return Err(malformed("expected two arguments"));
    }
    if args[0] != "p" {
        return Err(malformed("subject must be the agent `p`"));
    }
    let region = g
        .parse_region(name)
        .ok_or_else(|| malformed("unknown region symbol"))?;
    Ok(Relation::new(region, ObjectType::from_symbol(args[1])))
}

/// Canonicalized set of relations: sorted by atom text, deduplicated.
/// The empty set is valid (nothing inside the observation field).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QsrState {
    relations: Vec<Relation>,
}

impl QsrState {
    pub fn new(mut relations: Vec<Relation>) -> QsrState {
        relations.sort();
        relations.dedup();
        QsrState { relations }
    }

    pub fn empty() -> QsrState {
        QsrState::default()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    /// Subset test used by rule bodies; both sides are canonicalized.
    pub fn contains_all(&self, body: &[Relation]) -> bool {
        body.iter().all(|r| self.relations.binary_search(r).is_ok())
    }

    pub fn atoms(&self) -> Vec<String> {
        self.relations.iter().map(Relation::atom).collect()
    }
}

/// Region of an offset `(dx, dy)` from the agent (dx east, dy south).
///
/// Returns `None` outside the field (Chebyshev distance > radius). The zero
/// offset is an error: an object on the agent is a collision, not a
/// relation.
pub fn region_of(
    dx: i32,
    dy: i32,
    g: &QsrGranularity,
) -> Result<Option<RegionSymbol>, QsrError> {
    if dx == 0 && dy == 0 {
        return Err(QsrError::ZeroOffset);
    }
    let dist = dx.abs().max(dy.abs()) as u32;
    if dist > g.field_radius as u32 {
        return Ok(None);
    }

    let d = g.directions as f64;
    let width = 2.0 * PI / d;
    // Rows grow downward, so -dy converts to the mathematical convention.
    let mut angle = (-dy as f64).atan2(dx as f64);
    if angle < 0.0 {
        angle += 2.0 * PI;
    }
    // Half-open cones [center - w/2, center + w/2): shift by half a cone and
    // floor. Sector 0 straddles the 0-angle wrap.
    let sector = ((angle + width / 2.0) / width).floor() as u32 % g.directions as u32;

    let band = (dist - 1) * g.distance_bands as u32 / g.field_radius as u32;
    let band = band.min(g.distance_bands as u32 - 1);
    Ok(Some(g.region(sector as u16, band as u16)))
}

/// Encode the observation field of a ground-truth state.
///
/// One relation per non-agent object within the field; objects outside are
/// omitted, and an object sharing the agent's cell (a collision state)
/// yields no relation.
pub fn encode(state: &GridState, g: &QsrGranularity) -> QsrState {
    let mut relations = Vec::new();
    for obj in &state.objects {
        if obj.ty == ObjectType::Agent {
            continue;
        }
        let dx = obj.pos.1 - state.agent_pos.1;
        let dy = obj.pos.0 - state.agent_pos.0;
        if dx == 0 && dy == 0 {
            continue;
        }
        if let Ok(Some(region)) = region_of(dx, dy, g) {
            relations.push(Relation::new(region, obj.ty.clone()));
        }
    }
    QsrState::new(relations)
}

#[cfg(test)]
mod tests;
