use rustc_hash::FxHashMap;

use super::{StoreMode, TreeId, TreeStore};
use crate::budget::{Budget, BudgetExceeded};
use crate::movegen::{sort_keys, LandCache};
use crate::position::{canonize, Position};

/// Computes (reduced) canonical trees of positions, memoized on canonical
/// position keys.
pub struct TreeBuilder {
    store: TreeStore,
    memo: FxHashMap<String, TreeId>,
    lands: LandCache,
    budget: Budget,
    visited: u64,
}

/// Land keys of a canonical position, in canonical order.
pub fn position_keys(pos: &Position) -> Vec<String> {
    canonize(pos).lands().iter().map(|l| l.key()).collect()
}

fn joined(keys: &[String]) -> String {
    let mut s = keys.concat();
    s.push('!');
    s
}

impl TreeBuilder {
    pub fn new(mode: StoreMode, budget: Budget) -> TreeBuilder {
        TreeBuilder::with_store(TreeStore::new(mode), budget)
    }

    pub fn with_store(store: TreeStore, budget: Budget) -> TreeBuilder {
        TreeBuilder { store, memo: FxHashMap::default(), lands: LandCache::new(), budget, visited: 0 }
    }

    pub fn store(&self) -> &TreeStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut TreeStore {
        &mut self.store
    }

    pub fn into_parts(self) -> (TreeStore, FxHashMap<String, TreeId>) {
        (self.store, self.memo)
    }

    /// Every position met so far, keyed by its land keys joined and closed by `!`.
    pub fn positions(&self) -> impl Iterator<Item = (&str, TreeId)> {
        self.memo.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn position_count(&self) -> usize {
        self.memo.len()
    }

    pub fn tree_of(&mut self, pos: &Position) -> Result<TreeId, BudgetExceeded> {
        let keys = position_keys(pos);
        self.tree_of_keys(&keys)
    }

    /// Tree of the position made of `keys`, which must be canonical land keys
    /// in canonical order.
    pub fn tree_of_keys(&mut self, keys: &[String]) -> Result<TreeId, BudgetExceeded> {
        let key = joined(keys);
        if let Some(&id) = self.memo.get(&key) {
            return Ok(id);
        }
        self.visited += 1;
        self.budget.check(self.visited)?;
        let mut kids = Vec::new();
        for i in 0..keys.len() {
            if i > 0 && keys[i] == keys[i - 1] {
                continue;
            }
            for child in self.lands.children(&keys[i]).iter() {
                let mut next: Vec<String> = keys[..i].iter().chain(&keys[i + 1..]).cloned().collect();
                next.extend(child.iter().cloned());
                sort_keys(&mut next);
                kids.push(self.tree_of_keys(&next)?);
            }
        }
        let id = self.store.intern(&kids);
        self.memo.insert(key, id);
        Ok(id)
    }
}

/// Number of distinct canonical trees in the game tree of `pos`.
pub fn count_distinct_cts(pos: &Position, budget: Budget) -> Result<usize, BudgetExceeded> {
    let mut b = TreeBuilder::new(StoreMode::CanonicalOnly, budget);
    b.tree_of(pos)?;
    Ok(b.store().len())
}

/// Normal-play Grundy value: per land, the mex over its children; lands add
/// by exclusive or.
pub fn grundy(pos: &Position, budget: Budget) -> Result<u32, BudgetExceeded> {
    let mut g = Grundy { memo: FxHashMap::default(), lands: LandCache::new(), budget, visited: 0 };
    position_keys(pos).iter().try_fold(0, |acc, k| Ok(acc ^ g.land(k)?))
}

struct Grundy {
    memo: FxHashMap<String, u32>,
    lands: LandCache,
    budget: Budget,
    visited: u64,
}

impl Grundy {
    fn land(&mut self, key: &str) -> Result<u32, BudgetExceeded> {
        if let Some(&v) = self.memo.get(key) {
            return Ok(v);
        }
        self.visited += 1;
        self.budget.check(self.visited)?;
        let mut values = Vec::new();
        for child in self.lands.children(key).iter() {
            let mut v = 0;
            for k in child {
                v ^= self.land(k)?;
            }
            values.push(v);
        }
        values.sort_unstable();
        values.dedup();
        let mex = values.iter().enumerate().take_while(|(i, &v)| *i as u32 == v).count() as u32;
        self.memo.insert(key.to_string(), mex);
        Ok(mex)
    }
}

/// All trees of height at most `height`, built level by level from every
/// subset of the previous level. Returns the store and the distinct ids.
pub fn enumerate_rcts(height: u32, mode: StoreMode, budget: Budget) -> Result<(TreeStore, Vec<TreeId>), BudgetExceeded> {
    let mut store = TreeStore::new(mode);
    let mut level = vec![store.nim(0)];
    let mut used = 0u64;
    for h in 1..=height {
        let n = level.len();
        assert!(n < 64, "too many trees below height {h}");
        let mut next = Vec::new();
        for mask in 0u64..(1u64 << n) {
            used += 1;
            budget.check(used)?;
            let kids: Vec<TreeId> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| level[i]).collect();
            next.push(store.intern(&kids));
        }
        next.sort_unstable();
        next.dedup();
        debug_assert!(next.iter().all(|id| id.real_height() <= h));
        level = next;
    }
    Ok((store, level))
}

#[cfg(test)]
mod tests {
    use super::super::TreeExpr;
    use super::*;
    use crate::position::{parse, start_position};

    fn rct(s: &str) -> (String, String) {
        let mut b = TreeBuilder::new(StoreMode::Reduced, Budget::unlimited());
        let id = b.tree_of(&parse(s).unwrap()).unwrap();
        (id.to_string(), TreeExpr::of(b.store(), id).to_string())
    }

    #[test]
    fn small_rcts() {
        assert_eq!(rct("0.0.}]!"), ("3-1-L".into(), "{*2}".into()));
        assert_eq!(rct("0.0.AB.}AB.}]!").1, "{*1;{*2}}");
        assert_eq!(rct("0.0.0.}]!").1, "*1");
        assert_eq!(rct("22.}]!").1, "*1");
    }

    #[test]
    fn small_ct_counts() {
        let n = |p| count_distinct_cts(&start_position(p).unwrap(), Budget::unlimited()).unwrap();
        assert_eq!(n(1), 3);
        assert_eq!(n(2), 10);
        assert_eq!(n(3), 55);
    }

    #[test]
    fn grundy_values() {
        let g = |s: &str| grundy(&parse(s).unwrap(), Budget::unlimited()).unwrap();
        assert_eq!(g("0.0.}]!"), 0);
        assert_eq!(g("ABCD.}AB.}CD.}]!"), 3);
        assert_eq!(grundy(&Position::empty(), Budget::unlimited()), Ok(0));
    }

    #[test]
    fn enumeration_counts() {
        let count = |h, mode| enumerate_rcts(h, mode, Budget::unlimited()).unwrap().1.len();
        let reduced: Vec<usize> = (0..=3).map(|h| count(h, StoreMode::Reduced)).collect();
        assert_eq!(reduced, [1, 2, 3, 5]);
        let canonical: Vec<usize> = (0..=3).map(|h| count(h, StoreMode::CanonicalOnly)).collect();
        assert_eq!(canonical, [1, 2, 4, 16]);
    }

    #[test]
    fn budget_stops_the_build() {
        let mut b = TreeBuilder::new(StoreMode::Reduced, Budget::nodes(5));
        assert!(b.tree_of(&start_position(3).unwrap()).is_err());
    }
}
