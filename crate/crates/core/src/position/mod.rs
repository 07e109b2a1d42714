//! Sprouts positions in the land / region / boundary string notation.
//!
//! A position is a multiset of independent lands. A land is a set of regions
//! connected through shared vertices, a region is a multiset of boundaries and
//! a boundary is the cyclic walk of live vertex corners seen from inside the
//! region. Vertices with 3 curve ends are dead and never stored.
//!
//! Within a [`Land`] vertices are numbered in first-occurrence order, so the
//! derived equality is structural equality up to renaming.

mod canon;
mod parse;
mod render;

pub use canon::{canonize, canonize_land};
pub use parse::{parse, ParseError};
pub use render::{render, RenderError};

use std::cmp::Ordering;

pub type VertexId = u32;

/// Number of curve ends a spot may carry.
pub const MAX_DEGREE: u8 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Boundary {
    walk: Vec<VertexId>,
}

impl Boundary {
    pub fn walk(&self) -> &[VertexId] {
        &self.walk
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    boundaries: Vec<Boundary>,
}

impl Region {
    pub fn boundaries(&self) -> &[Boundary] {
        &self.boundaries
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Land {
    degrees: Vec<u8>,
    regions: Vec<Region>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Position {
    lands: Vec<Land>,
}

/// How a vertex is written in the notation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VertexClass {
    /// A single corner; the digit is the degree.
    Digit(u8),
    /// Two corners on two different boundaries.
    Upper,
    /// Two non-adjacent corners on one boundary.
    Lower,
}

impl Land {
    /// Builds a land from raw walks, collapsing cyclically adjacent corners of
    /// the same vertex and renumbering vertices in first-occurrence order.
    /// Vertices that never occur are dropped.
    pub fn from_walks(degrees: &[u8], regions: Vec<Vec<Vec<VertexId>>>) -> Land {
        let mut remap = vec![u32::MAX; degrees.len()];
        let mut new_degrees = Vec::new();
        let mut out_regions = Vec::with_capacity(regions.len());
        for region in regions {
            let mut boundaries = Vec::with_capacity(region.len());
            for mut walk in region {
                collapse_adjacent(&mut walk);
                for v in walk.iter_mut() {
                    let old = *v as usize;
                    if remap[old] == u32::MAX {
                        remap[old] = new_degrees.len() as u32;
                        new_degrees.push(degrees[old]);
                    }
                    *v = remap[old];
                }
                boundaries.push(Boundary { walk });
            }
            out_regions.push(Region { boundaries });
        }
        Land { degrees: new_degrees, regions: out_regions }
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn vertex_count(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, v: VertexId) -> u8 {
        self.degrees[v as usize]
    }

    pub fn vertex_lives(&self, v: VertexId) -> u8 {
        MAX_DEGREE.saturating_sub(self.degrees[v as usize])
    }

    pub(crate) fn degrees(&self) -> &[u8] {
        &self.degrees
    }

    pub fn lives(&self) -> u32 {
        self.degrees.iter().map(|&d| MAX_DEGREE.saturating_sub(d) as u32).sum()
    }

    /// Total lives of the distinct vertices with a corner in `region`.
    pub fn region_lives(&self, region: usize) -> u32 {
        let mut seen: Vec<VertexId> = self.regions[region]
            .boundaries
            .iter()
            .flat_map(|b| b.walk.iter().copied())
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.iter().map(|&v| self.vertex_lives(v) as u32).sum()
    }

    pub(crate) fn raw_regions(&self) -> Vec<Vec<Vec<VertexId>>> {
        self.regions
            .iter()
            .map(|r| r.boundaries.iter().map(|b| b.walk.clone()).collect())
            .collect()
    }

    /// Classifies every vertex by where its corners lie.
    pub(crate) fn vertex_classes(&self) -> Vec<VertexClass> {
        // (count, first boundary index)
        let mut seen: Vec<(u8, usize)> = vec![(0, usize::MAX); self.degrees.len()];
        let mut classes = vec![VertexClass::Digit(0); self.degrees.len()];
        let mut boundary_index = 0;
        for region in &self.regions {
            for boundary in &region.boundaries {
                for &v in &boundary.walk {
                    let entry = &mut seen[v as usize];
                    entry.0 = entry.0.saturating_add(1);
                    if entry.0 == 1 {
                        entry.1 = boundary_index;
                    } else if entry.1 == boundary_index {
                        classes[v as usize] = VertexClass::Lower;
                    } else {
                        classes[v as usize] = VertexClass::Upper;
                    }
                }
                boundary_index += 1;
            }
        }
        for (v, &(count, _)) in seen.iter().enumerate() {
            if count <= 1 {
                classes[v] = VertexClass::Digit(self.degrees[v]);
            }
        }
        classes
    }

    /// Canonical string of this land on its own, letters starting at `A`/`a`,
    /// terminated by `]`.
    ///
    /// # Panics
    /// When a class needs more than 26 letter names.
    pub fn key(&self) -> String {
        let mut out = String::new();
        let mut names = render::Names::default();
        render::render_land(self, &mut names, &mut out)
            .unwrap_or_else(|e| panic!("cannot name land vertices: {e}"));
        out
    }

    /// Number of corners per vertex, counting a lone corner of a degree-2
    /// vertex as the two cyclically adjacent corners it stands for.
    pub fn occurrence_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.degrees.len()];
        for region in &self.regions {
            for boundary in &region.boundaries {
                for &v in &boundary.walk {
                    counts[v as usize] += 1;
                }
            }
        }
        for (v, c) in counts.iter_mut().enumerate() {
            if *c == 1 && self.degrees[v] == 2 {
                *c = 2;
            }
        }
        counts
    }
}

impl Position {
    pub fn new(lands: Vec<Land>) -> Position {
        Position { lands }
    }

    pub fn empty() -> Position {
        Position::default()
    }

    pub fn lands(&self) -> &[Land] {
        &self.lands
    }

    pub fn into_lands(self) -> Vec<Land> {
        self.lands
    }

    pub fn is_empty(&self) -> bool {
        self.lands.is_empty()
    }

    pub fn lives(&self) -> u32 {
        self.lands.iter().map(Land::lives).sum()
    }

    /// Memo key: the standalone keys of the lands in order, then `!`.
    /// Equals the rendered string whenever at most one land carries letters.
    pub fn key(&self) -> String {
        let mut s = String::new();
        for land in &self.lands {
            s.push_str(&land.key());
        }
        s.push('!');
        s
    }
}

/// `p` isolated spots in one region.
pub fn start_position(spots: usize) -> Result<Position, StartError> {
    if spots == 0 {
        return Err(StartError::NoSpots);
    }
    let degrees = vec![0u8; spots];
    let region = (0..spots as u32).map(|v| vec![v]).collect();
    Ok(Position { lands: vec![Land::from_walks(&degrees, vec![region])] })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StartError {
    #[error("a start position needs at least one spot")]
    NoSpots,
}

pub fn lives(pos: &Position) -> u32 {
    pos.lives()
}

/// Removes dead vertices, then empty boundaries, then regions with at most one
/// life, then empty lands. The game tree is unchanged.
pub fn prune_dead(pos: &Position) -> Position {
    let lands = pos.lands.iter().filter_map(prune_land).collect();
    Position { lands }
}

pub(crate) fn prune_land(land: &Land) -> Option<Land> {
    let mut regions = Vec::with_capacity(land.regions.len());
    for region in &land.regions {
        let mut boundaries = Vec::new();
        for b in &region.boundaries {
            let mut walk: Vec<VertexId> =
                b.walk.iter().copied().filter(|&v| land.degrees[v as usize] < MAX_DEGREE).collect();
            collapse_adjacent(&mut walk);
            if !walk.is_empty() {
                boundaries.push(walk);
            }
        }
        let mut vs: Vec<VertexId> = boundaries.iter().flatten().copied().collect();
        vs.sort_unstable();
        vs.dedup();
        let region_lives: u32 = vs.iter().map(|&v| (MAX_DEGREE - land.degrees[v as usize]) as u32).sum();
        if region_lives >= 2 {
            regions.push(boundaries);
        }
    }
    if regions.is_empty() {
        None
    } else {
        Some(Land::from_walks(&land.degrees, regions))
    }
}

/// Removes cyclically adjacent repeated corners of a vertex. Two consecutive
/// corners of one vertex enclose only dead structure, so either may be used.
pub(crate) fn collapse_adjacent(walk: &mut Vec<VertexId>) {
    walk.dedup();
    while walk.len() >= 2 && walk.first() == walk.last() {
        walk.pop();
    }
}

/// Order on notation characters: digits < uppercase < lowercase < `.` < `}` < `]` < `!`.
pub(crate) fn char_rank(c: u8) -> u8 {
    match c {
        b'0'..=b'9' => c - b'0',
        b'A'..=b'Z' => 10 + (c - b'A'),
        b'a'..=b'z' => 40 + (c - b'a'),
        b'.' => 70,
        b'}' => 71,
        b']' => 72,
        b'!' => 73,
        _ => 100,
    }
}

/// Compares two notation strings under [`char_rank`].
pub fn compare_notation(a: &str, b: &str) -> Ordering {
    a.bytes().map(char_rank).cmp(b.bytes().map(char_rank))
}
