//! Outcome search over nodes made of unresolved lands, a *0/*1 part and a
//! list of reduced trees taken from a frozen basis.

mod node;
mod proof;

pub use node::{land_lives, Expander, Node, NodeKeyError};
pub use proof::{Entry, ProofDb, ProofError};

use std::cmp::Reverse;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::budget::{Budget, BudgetExceeded};
use crate::store::BasisDb;
use crate::trees::Outcome;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Win,
    Loss,
    Unknown,
}

impl Status {
    pub fn letter(self) -> char {
        match self {
            Status::Win => 'W',
            Status::Loss => 'L',
            Status::Unknown => '?',
        }
    }
}

impl From<Outcome> for Status {
    fn from(o: Outcome) -> Status {
        match o {
            Outcome::Win => Status::Win,
            Outcome::Loss => Status::Loss,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Order in which children are tried.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Policy {
    /// Ascending lives, then more lands first, then key.
    #[default]
    Cheapest,
    /// Generation order.
    AsGenerated,
}

/// Counters readable while a search runs on another thread.
#[derive(Debug, Default)]
pub struct Stats {
    explored: AtomicU64,
    memo: AtomicU64,
}

impl Stats {
    pub fn explored(&self) -> u64 {
        self.explored.load(Ordering::Relaxed)
    }

    pub fn memo_size(&self) -> u64 {
        self.memo.load(Ordering::Relaxed)
    }
}

/// Depth-first solver with a memo of every resolved node.
pub struct Solver {
    expander: Expander,
    memo: FxHashMap<String, Entry>,
    stats: Arc<Stats>,
    policy: Policy,
    explored: u64,
}

impl Solver {
    pub fn new(basis: Arc<BasisDb>) -> Solver {
        Solver {
            expander: Expander::new(basis),
            memo: FxHashMap::default(),
            stats: Arc::new(Stats::default()),
            policy: Policy::default(),
            explored: 0,
        }
    }

    pub fn with_policy(mut self, policy: Policy) -> Solver {
        self.policy = policy;
        self
    }

    pub fn stats(&self) -> Arc<Stats> {
        self.stats.clone()
    }

    pub fn expander(&mut self) -> &mut Expander {
        &mut self.expander
    }

    pub fn basis(&self) -> &BasisDb {
        self.expander.basis()
    }

    pub fn status(&self, key: &str) -> Status {
        match self.memo.get(key) {
            Some(Entry::Loss) => Status::Loss,
            Some(Entry::Win(_)) => Status::Win,
            None => Status::Unknown,
        }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Outcome of `node`; `Unknown` when the budget runs out. Resolved nodes
    /// stay in the memo either way.
    pub fn solve(&mut self, node: &Node, budget: &Budget) -> Status {
        let start = self.explored;
        match self.search(node, node.key(), budget, start) {
            Ok(o) => o.into(),
            Err(_) => Status::Unknown,
        }
    }

    fn record(&mut self, key: String, entry: Entry) {
        self.memo.insert(key, entry);
        self.stats.memo.store(self.memo.len() as u64, Ordering::Relaxed);
    }

    fn search(&mut self, node: &Node, key: String, budget: &Budget, start: u64) -> Result<Outcome, BudgetExceeded> {
        if let Some(e) = self.memo.get(&key) {
            return Ok(e.outcome());
        }
        self.explored += 1;
        self.stats.explored.store(self.explored, Ordering::Relaxed);
        budget.check(self.explored - start)?;
        if node.is_terminal() {
            self.record(key, Entry::Win(None));
            return Ok(Outcome::Win);
        }
        let mut children: Vec<(String, Node)> = self.expander.children(node).into_iter().map(|c| (c.key(), c)).collect();
        if self.policy == Policy::Cheapest {
            children.sort_by_cached_key(|(k, c)| (c.lives(), Reverse(c.lands().len()), k.clone()));
        }
        if let Some((k, _)) = children.iter().find(|(k, _)| matches!(self.memo.get(k), Some(Entry::Loss))) {
            let k = k.clone();
            self.record(key, Entry::Win(Some(k)));
            return Ok(Outcome::Win);
        }
        for (k, child) in children {
            if self.search(&child, k.clone(), budget, start)? == Outcome::Loss {
                self.record(key, Entry::Win(Some(k)));
                return Ok(Outcome::Win);
            }
        }
        self.record(key, Entry::Loss);
        Ok(Outcome::Loss)
    }

    /// Every resolved node, rooted at `root`.
    pub fn proof(&self, root: &Node) -> ProofDb {
        let mut db = ProofDb::new(root.key(), self.basis().run());
        for (k, e) in &self.memo {
            db.insert(k.clone(), e.clone());
        }
        db
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::position::start_position;
    use crate::store::build_basis;

    fn solver(p: usize) -> Solver {
        Solver::new(Arc::new(build_basis(p, Budget::unlimited()).unwrap()))
    }

    fn solve_key(s: &mut Solver, key: &str) -> Status {
        s.solve(&Node::from_key(key).unwrap(), &Budget::unlimited())
    }

    #[test]
    fn terminal_is_a_win() {
        assert_eq!(solve_key(&mut solver(2), "|0|"), Status::Win);
    }

    #[test]
    fn restricted_nim() {
        let mut s = solver(2);
        assert_eq!(solve_key(&mut s, "|1|"), Status::Loss);
        assert_eq!(solve_key(&mut s, "|0|2-0-W,2-0-W"), Status::Loss);
        assert_eq!(solve_key(&mut s, "|1|2-0-W,2-0-W"), Status::Win);
        assert_eq!(solve_key(&mut s, "|0|2-0-W"), Status::Win);
    }

    #[test]
    fn small_start_positions() {
        let mut s = solver(3);
        let want = [Status::Win, Status::Loss, Status::Loss, Status::Loss];
        for (p, w) in (1..=4).zip(want) {
            let n = Node::from_position(&start_position(p).unwrap(), s.basis());
            assert_eq!(s.solve(&n, &Budget::unlimited()), w, "p={p}");
        }
    }

    #[test]
    fn budget_gives_unknown() {
        let mut s = solver(2);
        let n = Node::from_position(&start_position(5).unwrap(), s.basis());
        assert_eq!(s.solve(&n, &Budget::nodes(3)), Status::Unknown);
        assert!(s.stats().explored() >= 3);
    }

    #[test]
    fn order_does_not_change_outcomes() {
        let mut a = solver(2);
        let mut b = solver(2).with_policy(Policy::AsGenerated);
        let n = Node::from_position(&start_position(4).unwrap(), a.basis());
        assert_eq!(a.solve(&n, &Budget::unlimited()), b.solve(&n, &Budget::unlimited()));
    }
}
