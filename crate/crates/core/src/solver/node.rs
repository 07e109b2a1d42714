use std::fmt;
use std::sync::Arc;

use rustc_hash::FxHashSet;

use crate::movegen::{sort_keys, LandCache};
use crate::position::{canonize, Position};
use crate::store::BasisDb;
use crate::trees::TreeId;

/// Search state: lands missing from the basis, the *0/*1 part and the trees
/// of the other lands.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    lands: Vec<String>,
    parity: u8,
    rcts: Vec<TreeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed node key '{0}'")]
pub struct NodeKeyError(pub String);

/// Lives of a canonical land key: `3 - d` per digit, one per letter pair.
pub fn land_lives(key: &str) -> u32 {
    let mut lives = 0;
    let mut letters = 0;
    for b in key.bytes() {
        match b {
            b'0'..=b'2' => lives += 3 - (b - b'0') as u32,
            b if b.is_ascii_alphabetic() => letters += 1,
            _ => {}
        }
    }
    lives + letters / 2
}

impl Node {
    /// Builds a node from raw parts, replacing basis lands by their trees,
    /// moving every `+1` factor into the parity and dropping *0 entries.
    pub fn simplify(lands: Vec<String>, parity: u8, rcts: Vec<TreeId>, basis: &BasisDb) -> Node {
        let mut parity = parity & 1;
        let mut kept = Vec::with_capacity(lands.len());
        let mut trees = Vec::with_capacity(rcts.len() + lands.len());
        for land in lands {
            match basis.lookup_land(&land) {
                Some(id) => trees.push(id),
                None => kept.push(land),
            }
        }
        trees.extend(rcts);
        let mut out = Vec::with_capacity(trees.len());
        for id in trees {
            let (base, plus) = if id.plus_one() { (basis.store().toggle(id), true) } else { (id, false) };
            parity ^= plus as u8;
            if !(base.is_nim() && base.height() == 0) {
                out.push(base);
            }
        }
        sort_keys(&mut kept);
        out.sort_unstable();
        Node { lands: kept, parity, rcts: out }
    }

    /// Node of a whole position.
    pub fn from_position(pos: &Position, basis: &BasisDb) -> Node {
        let lands = canonize(pos).lands().iter().map(|l| l.key()).collect();
        Node::simplify(lands, 0, Vec::new(), basis)
    }

    pub fn terminal() -> Node {
        Node { lands: Vec::new(), parity: 0, rcts: Vec::new() }
    }

    pub fn lands(&self) -> &[String] {
        &self.lands
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn rcts(&self) -> &[TreeId] {
        &self.rcts
    }

    pub fn is_terminal(&self) -> bool {
        self.lands.is_empty() && self.parity == 0 && self.rcts.is_empty()
    }

    /// Lives of the lands plus the real heights of the trees and the parity:
    /// a bound on the moves left.
    pub fn lives(&self) -> u32 {
        self.lands.iter().map(|l| land_lives(l)).sum::<u32>()
            + self.rcts.iter().map(|t| t.real_height()).sum::<u32>()
            + self.parity as u32
    }

    /// `lands joined by ';' | parity | ids joined by ','`.
    pub fn key(&self) -> String {
        let mut s = self.lands.join(";");
        s.push('|');
        s.push((b'0' + self.parity) as char);
        s.push('|');
        for (i, id) in self.rcts.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&id.to_string());
        }
        s
    }

    /// Parses a node key. The parts are taken as they are, not re-simplified.
    pub fn from_key(key: &str) -> Result<Node, NodeKeyError> {
        let err = || NodeKeyError(key.to_string());
        let mut parts = key.split('|');
        let (Some(lands), Some(parity), Some(rcts), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(err());
        };
        let parity = match parity {
            "0" => 0,
            "1" => 1,
            _ => return Err(err()),
        };
        let lands: Vec<String> = if lands.is_empty() { Vec::new() } else { lands.split(';').map(str::to_string).collect() };
        if lands.iter().any(|l| !l.ends_with(']') || crate::movegen::land_from_key(l).is_err()) {
            return Err(err());
        }
        let rcts = if rcts.is_empty() {
            Vec::new()
        } else {
            rcts.split(',').map(|t| t.parse::<TreeId>().map_err(|_| err())).collect::<Result<Vec<_>, _>>()?
        };
        Ok(Node { lands, parity, rcts })
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Generates node children against a frozen basis.
pub struct Expander {
    basis: Arc<BasisDb>,
    lands: LandCache,
}

impl Expander {
    pub fn new(basis: Arc<BasisDb>) -> Expander {
        Expander { basis, lands: LandCache::new() }
    }

    pub fn basis(&self) -> &BasisDb {
        &self.basis
    }

    /// Moves in a land, `*1 -> *0`, and moves inside each tree; deduplicated
    /// by key, in generation order.
    pub fn children(&mut self, node: &Node) -> Vec<Node> {
        let mut seen = FxHashSet::default();
        let mut out = Vec::new();
        let mut push = |n: Node, out: &mut Vec<Node>| {
            if seen.insert(n.key()) {
                out.push(n);
            }
        };
        for i in 0..node.lands.len() {
            if i > 0 && node.lands[i] == node.lands[i - 1] {
                continue;
            }
            for child in self.lands.children(&node.lands[i]).iter() {
                let mut lands: Vec<String> = node.lands[..i].iter().chain(&node.lands[i + 1..]).cloned().collect();
                lands.extend(child.iter().cloned());
                push(Node::simplify(lands, node.parity, node.rcts.clone(), &self.basis), &mut out);
            }
        }
        if node.parity == 1 {
            push(Node { lands: node.lands.clone(), parity: 0, rcts: node.rcts.clone() }, &mut out);
        }
        for i in 0..node.rcts.len() {
            if i > 0 && node.rcts[i] == node.rcts[i - 1] {
                continue;
            }
            for c in self.basis.store().children_of(node.rcts[i]) {
                let mut rcts: Vec<TreeId> = node.rcts[..i].iter().chain(&node.rcts[i + 1..]).copied().collect();
                rcts.push(c);
                push(Node::simplify(node.lands.clone(), node.parity, rcts, &self.basis), &mut out);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;
    use crate::store::build_basis;
    use crate::Budget;

    fn basis(p: usize) -> Arc<BasisDb> {
        Arc::new(build_basis(p, Budget::unlimited()).unwrap())
    }

    #[test]
    fn lives_of_keys() {
        assert_eq!(land_lives("0.0.0.}]"), 9);
        assert_eq!(land_lives("1abcde2edcba.2.}]"), 9);
        assert_eq!(land_lives("0.AB.}AB.}]"), 5);
    }

    #[test]
    fn key_round_trip() {
        for k in ["|0|", "0.0.0.0.0.0.0.0.}]|1|2-0-W,3-1-L", "0.}];1a1a.}]|0|"] {
            assert_eq!(Node::from_key(k).unwrap().key(), k);
        }
        for k in ["", "|2|", "0.0.}|0|", "|0|x", "|0||"] {
            assert!(Node::from_key(k).is_err(), "{k}");
        }
    }

    #[test]
    fn terminal_children() {
        let mut e = Expander::new(basis(2));
        assert!(e.children(&Node::terminal()).is_empty());
        let one = Node::from_key("|1|").unwrap();
        assert_eq!(e.children(&one), vec![Node::terminal()]);
        let braced = Node::from_key("|0|3-1-L").unwrap();
        let kids: Vec<String> = e.children(&braced).iter().map(Node::key).collect();
        assert_eq!(kids, ["|0|2-0-W"]);
    }

    #[test]
    fn factored_ids_fold_into_parity() {
        let b = basis(2);
        let mut s = b.store().clone();
        let three = s.nim(3);
        let plus = "3-1+1-W".parse().unwrap();
        let n = Node::simplify(Vec::new(), 0, vec![three, plus], &b);
        assert_eq!(n.key(), "|0|2-0-W,3-1-L");
    }

    #[test]
    fn position_with_four_lands() {
        let b = basis(5);
        let pos = parse("0.0.0.0.0.0.0.0.}]22.}]2ab2ba.}]0.0.A.}2A.}]!").unwrap();
        assert_eq!(Node::from_position(&pos, &b).key(), "0.0.0.0.0.0.0.0.}]|1|2-0-W,3-1-L");
    }
}
