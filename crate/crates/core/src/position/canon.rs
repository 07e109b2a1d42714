//! Canonical forms.
//!
//! A land is canonical when its rendering is the smallest one, under the
//! notation order, over boundary rotations, reversal of every walk, and
//! reordering of boundaries and regions, letters being named in first-use
//! order. Each land is canonized on its own and lands are then sorted by
//! their standalone strings.
//!
//! Every boundary string ends with `.` and every region with `}`, so no
//! candidate piece is a proper prefix of another; the minimum is found by
//! emitting the smallest next boundary and branching only on exact ties.

use super::{compare_notation, Land, Position, VertexClass, VertexId};

const DOT: u32 = u32::MAX - 1;
const CLOSE: u32 = u32::MAX;
const UPPER_BASE: u32 = 16;
const LOWER_BASE: u32 = 1 << 20;
const UNNAMED: u32 = u32::MAX;

pub fn canonize(pos: &Position) -> Position {
    let mut keyed: Vec<(String, Land)> = pos
        .lands
        .iter()
        .map(|l| {
            let c = canonize_land(l);
            (c.key(), c)
        })
        .collect();
    keyed.sort_by(|a, b| compare_notation(&a.0, &b.0));
    Position { lands: keyed.into_iter().map(|(_, l)| l).collect() }
}

pub fn canonize_land(land: &Land) -> Land {
    let classes = land.vertex_classes();
    let forward = Search::new(land, &classes, false).run();
    let backward = Search::new(land, &classes, true).run();
    let best = if backward.tokens < forward.tokens { backward } else { forward };
    best.build(land)
}

struct Best {
    tokens: Vec<u32>,
    reversed: bool,
    // (region, boundary-in-region, rotation) in emission order
    order: Vec<(usize, usize, usize)>,
}

impl Best {
    fn build(self, land: &Land) -> Land {
        let mut regions: Vec<Vec<Vec<VertexId>>> =
            land.regions.iter().filter(|r| r.boundaries.is_empty()).map(|_| Vec::new()).collect();
        let mut region_slot = vec![usize::MAX; land.regions.len()];
        for (r, b, rot) in self.order {
            if region_slot[r] == usize::MAX {
                region_slot[r] = regions.len();
                regions.push(Vec::new());
            }
            let walk = oriented(&land.regions[r].boundaries[b].walk, self.reversed);
            let mut rotated = Vec::with_capacity(walk.len());
            rotated.extend_from_slice(&walk[rot..]);
            rotated.extend_from_slice(&walk[..rot]);
            regions[region_slot[r]].push(rotated);
        }
        Land::from_walks(&land.degrees, regions)
    }
}

fn oriented(walk: &[VertexId], reversed: bool) -> Vec<VertexId> {
    let mut w = walk.to_vec();
    if reversed {
        w.reverse();
    }
    w
}

struct Search<'a> {
    classes: &'a [VertexClass],
    reversed: bool,
    walks: Vec<Vec<VertexId>>,
    // per flat boundary: (region, index in region)
    place: Vec<(usize, usize)>,
    linked: Vec<bool>,
    used: Vec<bool>,
    region_left: Vec<usize>,
    regions_left: usize,
    current: Option<usize>,
    name: Vec<u32>,
    next_upper: u32,
    next_lower: u32,
    tokens: Vec<u32>,
    order: Vec<(usize, usize, usize)>,
    best: Option<Best>,
}

impl<'a> Search<'a> {
    fn new(land: &Land, classes: &'a [VertexClass], reversed: bool) -> Search<'a> {
        let mut walks = Vec::new();
        let mut place = Vec::new();
        let mut linked = Vec::new();
        let mut region_left = Vec::new();
        for (r, region) in land.regions.iter().enumerate() {
            region_left.push(region.boundaries.len());
            for (b, boundary) in region.boundaries.iter().enumerate() {
                linked.push(boundary.walk.iter().any(|&v| classes[v as usize] == VertexClass::Upper));
                walks.push(oriented(&boundary.walk, reversed));
                place.push((r, b));
            }
        }
        // regions without boundaries still cost a `}`
        let regions_left = land.regions.len();
        Search {
            classes,
            reversed,
            used: vec![false; walks.len()],
            walks,
            place,
            linked,
            region_left,
            regions_left,
            current: None,
            name: vec![UNNAMED; land.degrees.len()],
            next_upper: 0,
            next_lower: 0,
            tokens: Vec::new(),
            order: Vec::new(),
            best: None,
        }
    }

    fn run(mut self) -> Best {
        // empty regions render first as a run of `}`
        for r in 0..self.region_left.len() {
            if self.region_left[r] == 0 {
                self.tokens.push(CLOSE);
                self.regions_left -= 1;
            }
        }
        self.step();
        self.best.expect("search always completes")
    }

    /// Tokens of boundary `b` read from `rot`, naming fresh letters after the
    /// current counters without committing them.
    fn piece(&self, b: usize, rot: usize, out: &mut Vec<u32>) {
        out.clear();
        let walk = &self.walks[b];
        let mut upper = self.next_upper;
        let mut lower = self.next_lower;
        let mut fresh: Vec<(VertexId, u32)> = Vec::new();
        for i in 0..walk.len() {
            let v = walk[(rot + i) % walk.len()];
            let t = match self.classes[v as usize] {
                VertexClass::Digit(d) => d as u32,
                VertexClass::Upper | VertexClass::Lower => {
                    let named = self.name[v as usize];
                    if named != UNNAMED {
                        named
                    } else if let Some(&(_, t)) = fresh.iter().find(|(u, _)| *u == v) {
                        t
                    } else {
                        let t = if self.classes[v as usize] == VertexClass::Upper {
                            upper += 1;
                            UPPER_BASE + upper - 1
                        } else {
                            lower += 1;
                            LOWER_BASE + lower - 1
                        };
                        fresh.push((v, t));
                        t
                    }
                }
            };
            out.push(t);
        }
        out.push(DOT);
    }

    fn commit_names(&mut self, b: usize, rot: usize) -> Vec<VertexId> {
        let mut newly = Vec::new();
        let len = self.walks[b].len();
        for i in 0..len {
            let v = self.walks[b][(rot + i) % len];
            let class = self.classes[v as usize];
            if matches!(class, VertexClass::Digit(_)) || self.name[v as usize] != UNNAMED {
                continue;
            }
            self.name[v as usize] = if class == VertexClass::Upper {
                self.next_upper += 1;
                UPPER_BASE + self.next_upper - 1
            } else {
                self.next_lower += 1;
                LOWER_BASE + self.next_lower - 1
            };
            newly.push(v);
        }
        newly
    }

    fn step(&mut self) {
        if let Some(r) = self.current {
            if self.region_left[r] == 0 {
                self.tokens.push(CLOSE);
                self.current = None;
                self.regions_left -= 1;
                self.step();
                self.regions_left += 1;
                self.current = Some(r);
                self.tokens.pop();
                return;
            }
        }
        if self.regions_left == 0 {
            let better = match &self.best {
                None => true,
                Some(b) => self.tokens < b.tokens,
            };
            if better {
                self.best = Some(Best { tokens: self.tokens.clone(), reversed: self.reversed, order: self.order.clone() });
            }
            return;
        }

        let mut min: Option<Vec<u32>> = None;
        let mut ties: Vec<(usize, usize)> = Vec::new();
        let mut buf = Vec::new();
        for b in 0..self.walks.len() {
            if self.used[b] {
                continue;
            }
            if let Some(r) = self.current {
                if self.place[b].0 != r {
                    continue;
                }
            }
            for rot in 0..self.walks[b].len() {
                self.piece(b, rot, &mut buf);
                match min.as_ref().map(|m| buf.cmp(m)) {
                    None | Some(std::cmp::Ordering::Less) => {
                        min = Some(buf.clone());
                        ties.clear();
                        ties.push((b, rot));
                    }
                    Some(std::cmp::Ordering::Equal) => ties.push((b, rot)),
                    Some(std::cmp::Ordering::Greater) => {}
                }
            }
        }
        let piece = min.expect("a region with boundaries left");

        if let Some(best) = &self.best {
            let start = self.tokens.len();
            if self.tokens[..] == best.tokens[..start] && piece[..] > best.tokens[start..start + piece.len()] {
                return;
            }
        }

        // Pieces without uppercase letters reference nothing outside their own
        // boundary, so ties within one region lead to isomorphic remainders.
        // Ties in different regions do not.
        if !self.linked[ties[0].0] {
            let mut regions = Vec::new();
            ties.retain(|&(b, _)| {
                let r = self.place[b].0;
                if regions.contains(&r) {
                    false
                } else {
                    regions.push(r);
                    true
                }
            });
        }
        for (b, rot) in ties {
            let saved = (self.next_upper, self.next_lower, self.current);
            let newly = self.commit_names(b, rot);
            let (r, idx) = self.place[b];
            self.used[b] = true;
            self.region_left[r] -= 1;
            self.current = Some(r);
            self.tokens.extend_from_slice(&piece);
            self.order.push((r, idx, rot));

            self.step();

            self.order.pop();
            self.tokens.truncate(self.tokens.len() - piece.len());
            self.region_left[r] += 1;
            self.used[b] = false;
            for v in newly {
                self.name[v as usize] = UNNAMED;
            }
            (self.next_upper, self.next_lower, self.current) = saved;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, render};
    use super::*;

    fn canon(s: &str) -> String {
        render(&canonize(&parse(s).unwrap())).unwrap()
    }

    #[test]
    fn region_reorder() {
        assert_eq!(canon("AB.}0.AB.}]!"), canon("0.AB.}AB.}]!"));
    }

    #[test]
    fn equal_pieces_in_different_regions() {
        assert_eq!(canon("TA.0.0.0.}TA.0.0.}]!"), "0.0.0.AB.}0.0.AB.}]!");
        assert_eq!(canon("0.0.AB.}0.0.0.AB.}]!"), "0.0.0.AB.}0.0.AB.}]!");
    }

    #[test]
    fn renaming() {
        assert_eq!(canon("BA.}BA.}]!"), canon("AB.}AB.}]!"));
    }

    #[test]
    fn reflection() {
        assert_eq!(canon("1ab2ba.}]!"), canon("ab2ba1.}]!"));
        assert_eq!(canon("1ABC.}BCDE.}ADE.}]!"), canon("1CBA.}EDCB.}EDA.}]!"));
    }

    #[test]
    fn rotation_and_land_order() {
        assert_eq!(canon("0.}]1a1a.}]!"), canon("a1a1.}]0.}]!"));
    }

    #[test]
    fn idempotent_on_examples() {
        for s in crate::test_support::KNOWN_POSITIONS {
            let once = canonize(&parse(s).unwrap());
            let twice = canonize(&once);
            assert_eq!(once, twice, "{s}");
            let text = render(&once).unwrap();
            assert_eq!(render(&parse(&text).unwrap()).unwrap(), text);
        }
    }

    #[test]
    fn canonical_string_is_minimal_for_small_cases() {
        assert_eq!(canon("AB.}0.AB.}]!"), "0.AB.}AB.}]!");
        assert_eq!(canon("0.0.0.}]!"), "0.0.0.}]!");
        assert_eq!(canon("1a1a.}]!"), "1a1a.}]!");
    }
}
