//! Legal moves, move application and decomposition into independent lands.

use std::sync::Arc;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::position::{canonize_land, compare_notation, prune_land, Land, Position, VertexId};

/// A corner of a vertex: position `index` in the walk of `boundary`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Corner {
    pub boundary: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Joins corners on two different boundaries of one region; the two walks merge.
    Join { from: Corner, to: Corner },
    /// Joins two corners of one boundary (or a corner to itself), cutting the
    /// region in two. Bit `i` of `side_one` sends the `i`-th other boundary of
    /// the region (in order, skipping the cut one) to the side walked from
    /// `from` to `to`.
    Split { boundary: usize, from: usize, to: usize, side_one: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub land: usize,
    pub region: usize,
    pub shape: Shape,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MoveError {
    #[error("illegal move: {0}")]
    Illegal(&'static str),
}

pub fn legal_moves(pos: &Position) -> Vec<Move> {
    let mut moves = Vec::new();
    for (li, land) in pos.lands().iter().enumerate() {
        for_each_land_move(land, |region, shape| moves.push(Move { land: li, region, shape }));
    }
    moves
}

fn for_each_land_move(land: &Land, mut emit: impl FnMut(usize, Shape)) {
    for (ri, region) in land.regions().iter().enumerate() {
        let bs = region.boundaries();
        for i in 0..bs.len() {
            for j in i + 1..bs.len() {
                for ia in 0..bs[i].walk().len() {
                    for ib in 0..bs[j].walk().len() {
                        emit(
                            ri,
                            Shape::Join {
                                from: Corner { boundary: i, index: ia },
                                to: Corner { boundary: j, index: ib },
                            },
                        );
                    }
                }
            }
        }
        let others = bs.len().saturating_sub(1);
        assert!(others < 64, "too many boundaries in one region");
        for (bi, b) in bs.iter().enumerate() {
            let walk = b.walk();
            for from in 0..walk.len() {
                for to in from..walk.len() {
                    let (v1, v2) = (walk[from], walk[to]);
                    let legal = if from == to { land.vertex_lives(v1) >= 2 } else { v1 != v2 };
                    if !legal {
                        continue;
                    }
                    for side_one in 0..(1u64 << others) {
                        emit(ri, Shape::Split { boundary: bi, from, to, side_one });
                    }
                }
            }
        }
    }
}

fn check(land: &Land, region: usize, shape: &Shape) -> Result<(), MoveError> {
    let r = land.regions().get(region).ok_or(MoveError::Illegal("no such region"))?;
    let bs = r.boundaries();
    let corner = |c: &Corner| -> Result<VertexId, MoveError> {
        bs.get(c.boundary)
            .and_then(|b| b.walk().get(c.index))
            .copied()
            .ok_or(MoveError::Illegal("no such corner"))
    };
    match shape {
        Shape::Join { from, to } => {
            corner(from)?;
            corner(to)?;
            if from.boundary == to.boundary {
                return Err(MoveError::Illegal("join needs two boundaries"));
            }
        }
        Shape::Split { boundary, from, to, side_one } => {
            let walk = bs.get(*boundary).ok_or(MoveError::Illegal("no such boundary"))?.walk();
            let (v1, v2) = match (walk.get(*from), walk.get(*to)) {
                (Some(&a), Some(&b)) => (a, b),
                _ => return Err(MoveError::Illegal("no such corner")),
            };
            if from > to {
                return Err(MoveError::Illegal("split corners out of order"));
            }
            if from == to && land.vertex_lives(v1) < 2 {
                return Err(MoveError::Illegal("self-loop needs two lives"));
            }
            if from != to && v1 == v2 {
                return Err(MoveError::Illegal("two corners of a one-life vertex"));
            }
            let others = bs.len() - 1;
            if others < 64 && *side_one >> others != 0 {
                return Err(MoveError::Illegal("distribution names a missing boundary"));
            }
        }
    }
    Ok(())
}

/// Draws the curve and returns the raw walks, before pruning.
fn draw(land: &Land, region: usize, shape: &Shape) -> (Vec<u8>, Vec<Vec<Vec<VertexId>>>) {
    let mut degrees = land.degrees().to_vec();
    let z = degrees.len() as VertexId;
    degrees.push(2);
    let mut regions = land.raw_regions();
    let target = std::mem::take(&mut regions[region]);
    let rotated = |walk: &[VertexId], at: usize| -> Vec<VertexId> {
        let mut w = Vec::with_capacity(walk.len() + 3);
        w.extend_from_slice(&walk[at..]);
        w.extend_from_slice(&walk[..at]);
        w
    };
    match shape {
        Shape::Join { from, to } => {
            let a = rotated(&target[from.boundary], from.index);
            let b = rotated(&target[to.boundary], to.index);
            let (v1, v2) = (a[0], b[0]);
            degrees[v1 as usize] += 1;
            degrees[v2 as usize] += 1;
            let mut merged = Vec::with_capacity(a.len() + b.len() + 4);
            merged.extend_from_slice(&[v1, z]);
            merged.extend_from_slice(&b);
            merged.extend_from_slice(&[v2, z]);
            merged.extend_from_slice(&a);
            let mut out: Vec<Vec<VertexId>> = target
                .into_iter()
                .enumerate()
                .filter(|(i, _)| *i != from.boundary && *i != to.boundary)
                .map(|(_, w)| w)
                .collect();
            out.push(merged);
            regions[region] = out;
        }
        Shape::Split { boundary, from, to, side_one } => {
            let w = rotated(&target[*boundary], *from);
            let cut = to - from;
            let (v1, v2) = (w[0], w[cut]);
            let (mut one, mut two);
            if cut == 0 {
                degrees[v1 as usize] += 2;
                one = vec![v1, z];
                two = w.clone();
                two.extend_from_slice(&[v1, z]);
            } else {
                degrees[v1 as usize] += 1;
                degrees[v2 as usize] += 1;
                one = w[..=cut].to_vec();
                one.push(z);
                two = w[cut..].to_vec();
                two.extend_from_slice(&[v1, z]);
            }
            let mut side1 = vec![one];
            let mut side2 = vec![two];
            for (k, walk) in target.into_iter().enumerate().filter(|(i, _)| i != boundary).map(|(_, w)| w).enumerate() {
                if side_one >> k & 1 == 1 {
                    side1.push(walk);
                } else {
                    side2.push(walk);
                }
            }
            regions[region] = side1;
            regions.push(side2);
        }
    }
    (degrees, regions)
}

/// Result of one move inside `land`: pruned, decomposed, canonical lands in
/// canonical order.
fn play(land: &Land, region: usize, shape: &Shape) -> Vec<Land> {
    let (degrees, regions) = draw(land, region, shape);
    let raw = Land::from_walks(&degrees, regions);
    let Some(pruned) = prune_land(&raw) else {
        return Vec::new();
    };
    let mut lands: Vec<(String, Land)> = split_land(&pruned)
        .into_iter()
        .map(|l| {
            let c = canonize_land(&l);
            (c.key(), c)
        })
        .collect();
    lands.sort_by(|a, b| compare_notation(&a.0, &b.0));
    lands.into_iter().map(|(_, l)| l).collect()
}

/// Applies a legal move and returns the canonical resulting position.
pub fn apply(pos: &Position, mv: &Move) -> Result<Position, MoveError> {
    let land = pos.lands().get(mv.land).ok_or(MoveError::Illegal("no such land"))?;
    check(land, mv.region, &mv.shape)?;
    let mut lands: Vec<Land> = pos.lands().iter().enumerate().filter(|(i, _)| *i != mv.land).map(|(_, l)| canonize_land(l)).collect();
    lands.extend(play(land, mv.region, &mv.shape));
    Ok(sorted_position(lands))
}

/// Draws the move without pruning, decomposing or canonizing. Lives drop by
/// exactly one here; [`apply`] may drop more through pruning.
pub fn apply_raw(pos: &Position, mv: &Move) -> Result<Position, MoveError> {
    let land = pos.lands().get(mv.land).ok_or(MoveError::Illegal("no such land"))?;
    check(land, mv.region, &mv.shape)?;
    let (degrees, regions) = draw(land, mv.region, &mv.shape);
    let mut lands = pos.lands().to_vec();
    lands[mv.land] = Land::from_walks(&degrees, regions);
    Ok(Position::new(lands))
}

pub(crate) fn sorted_position(lands: Vec<Land>) -> Position {
    let mut keyed: Vec<(String, Land)> = lands.into_iter().map(|l| (l.key(), l)).collect();
    keyed.sort_by(|a, b| compare_notation(&a.0, &b.0));
    Position::new(keyed.into_iter().map(|(_, l)| l).collect())
}

/// Distinct results of every move inside one land, each a list of canonical
/// lands in canonical order, sorted by key.
pub fn land_children(land: &Land) -> Vec<Vec<Land>> {
    let mut seen = FxHashSet::default();
    let mut out: Vec<(String, Vec<Land>)> = Vec::new();
    for_each_land_move(land, |region, shape| {
        let lands = play(land, region, &shape);
        let key: String = lands.iter().map(Land::key).collect();
        if seen.insert(key.clone()) {
            out.push((key, lands));
        }
    });
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, l)| l).collect()
}

/// Canonical children of a position, duplicates removed, sorted by key.
pub fn children(pos: &Position) -> Vec<Position> {
    let canon = crate::position::canonize(pos);
    let lands = canon.lands();
    let mut seen = FxHashSet::default();
    let mut out: Vec<(String, Position)> = Vec::new();
    for (i, land) in lands.iter().enumerate() {
        if i > 0 && lands[i - 1] == *land {
            continue;
        }
        for child in land_children(land) {
            let mut all: Vec<Land> = lands.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l.clone()).collect();
            all.extend(child);
            let pos = sorted_position(all);
            let key = pos.key();
            if seen.insert(key.clone()) {
                out.push((key, pos));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, p)| p).collect()
}

/// Splits a land into connected components of regions sharing a vertex.
pub(crate) fn split_land(land: &Land) -> Vec<Land> {
    let n = land.regions().len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner = vec![usize::MAX; land.vertex_count()];
    for (r, region) in land.regions().iter().enumerate() {
        for b in region.boundaries() {
            for &v in b.walk() {
                let o = owner[v as usize];
                if o == usize::MAX {
                    owner[v as usize] = r;
                } else {
                    let (a, b) = (find(&mut parent, o), find(&mut parent, r));
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Vec<Vec<VertexId>>>)> = Vec::new();
    let raw = land.raw_regions();
    for (r, walks) in raw.into_iter().enumerate() {
        let root = find(&mut parent, r);
        match groups.iter_mut().find(|(g, _)| *g == root) {
            Some((_, rs)) => rs.push(walks),
            None => groups.push((root, vec![walks])),
        }
    }
    if groups.len() == 1 {
        return vec![land.clone()];
    }
    groups.into_iter().map(|(_, rs)| Land::from_walks(land.degrees(), rs)).collect()
}

/// Independent components of a position.
pub fn decompose(pos: &Position) -> Vec<Land> {
    pos.lands().iter().flat_map(split_land).collect()
}

/// Parses a standalone land key (as produced by [`Land::key`]).
pub fn land_from_key(key: &str) -> Result<Land, crate::position::ParseError> {
    let pos = crate::position::parse(&format!("{key}!"))?;
    Ok(pos.into_lands().pop().expect("a parsed land"))
}

/// Memoized [`land_children`] at the level of land keys.
#[derive(Default)]
pub struct LandCache {
    map: FxHashMap<String, Arc<[Vec<String>]>>,
}

impl LandCache {
    pub fn new() -> LandCache {
        LandCache::default()
    }

    /// Children of the canonical land `key`, each a list of land keys in
    /// canonical order.
    pub fn children(&mut self, key: &str) -> Arc<[Vec<String>]> {
        if let Some(c) = self.map.get(key) {
            return c.clone();
        }
        let land = land_from_key(key).unwrap_or_else(|e| panic!("bad land key {key}: {e}"));
        let kids: Arc<[Vec<String>]> =
            land_children(&land).iter().map(|lands| lands.iter().map(Land::key).collect()).collect();
        self.map.insert(key.to_string(), kids.clone());
        kids
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Sorts land keys into canonical position order.
pub fn sort_keys(keys: &mut [String]) {
    keys.sort_by(|a, b| compare_notation(a, b));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::position::{canonize, parse, render, start_position};

    fn canon(s: &str) -> Position {
        canonize(&parse(s).unwrap())
    }

    #[test]
    fn no_moves_in_empty_position() {
        assert!(legal_moves(&Position::empty()).is_empty());
        assert!(children(&Position::empty()).is_empty());
    }

    #[test]
    fn lone_spot_has_only_a_self_loop() {
        let s1 = start_position(1).unwrap();
        let moves = legal_moves(&s1);
        assert_eq!(moves.len(), 1);
        assert!(matches!(moves[0].shape, Shape::Split { from: 0, to: 0, side_one: 0, .. }));
        assert_eq!(children(&s1), vec![canon("AB.}AB.}]!")]);
    }

    #[test]
    fn single_life_region_has_no_move() {
        let land = Land::from_walks(&[2], vec![vec![vec![0]]]);
        assert!(legal_moves(&Position::new(vec![land])).is_empty());
    }

    #[test]
    fn self_loop_on_two_spots() {
        let s2 = start_position(2).unwrap();
        let mv = Move { land: 0, region: 0, shape: Shape::Split { boundary: 0, from: 0, to: 0, side_one: 0 } };
        assert_eq!(apply(&s2, &mv).unwrap(), canon("0.AB.}AB.}]!"));
        let join = Move {
            land: 0,
            region: 0,
            shape: Shape::Join { from: Corner { boundary: 0, index: 0 }, to: Corner { boundary: 1, index: 0 } },
        };
        assert_eq!(render(&apply(&s2, &join).unwrap()).unwrap(), "1a1a.}]!");
    }

    #[test]
    fn illegal_moves_rejected() {
        let pos = parse("22.}]!").unwrap();
        let mv = Move { land: 0, region: 0, shape: Shape::Split { boundary: 0, from: 0, to: 0, side_one: 0 } };
        assert!(apply(&pos, &mv).is_err());
        let mv = Move { land: 3, region: 0, shape: Shape::Split { boundary: 0, from: 0, to: 1, side_one: 0 } };
        assert!(apply(&pos, &mv).is_err());
    }

    #[test]
    fn twelve_spot_line() {
        let s12 = start_position(12).unwrap();
        let first = canon("0.0.0.0.0.0.0.0.AB.}0.0.0.AB.}]!");
        let kids = children(&s12);
        assert!(kids.contains(&first));
        let second = canon("0.0.0.0.0.0.0.0.}]0.0.A.}0.A.}]!");
        assert!(children(&first).contains(&second));
    }

    #[test]
    fn decomposition() {
        assert_eq!(decompose(&parse("0.0.0.0.0.0.0.0.}]22.}]2ab2ba.}]0.0.A.}2A.}]!").unwrap()).len(), 4);
        assert_eq!(decompose(&start_position(5).unwrap()).len(), 1);
        assert!(decompose(&Position::empty()).is_empty());
        // written as one land, two components
        assert_eq!(decompose(&parse("0.0.}0.0.}]!").unwrap()).len(), 2);
    }

    #[test]
    fn lives_drop_by_one() {
        let mut frontier = vec![start_position(2).unwrap()];
        while let Some(pos) = frontier.pop() {
            for mv in legal_moves(&pos) {
                assert_eq!(apply_raw(&pos, &mv).unwrap().lives() + 1, pos.lives());
                assert!(apply(&pos, &mv).unwrap().lives() < pos.lives());
            }
            frontier.extend(children(&pos));
        }
    }
}
