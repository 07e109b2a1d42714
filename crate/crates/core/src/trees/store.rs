use rustc_hash::FxHashMap;
use sha2::{Digest, Sha256};

use super::{Outcome, TreeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoreMode {
    /// Only duplicate children are merged.
    CanonicalOnly,
    /// Mex rule, reduction to *0, smallest reducer and *1 factoring.
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("tree {0} is already stored with other children")]
    Conflict(TreeId),
    #[error("tree {0} refers to missing child {1}")]
    Dangling(TreeId, TreeId),
    #[error("tree {0} does not match its children: {1}")]
    Inconsistent(TreeId, &'static str),
    #[error("factored id {0} in a canonical-only store")]
    Factored(TreeId),
}

#[derive(Clone, Debug)]
struct Record {
    id: TreeId,
    children: Box<[TreeId]>,
    /// Outcome of this tree plus *1.
    plus_outcome: Outcome,
}

/// Bidirectional map between tree ids and their sorted child sets.
#[derive(Clone, Debug)]
pub struct TreeStore {
    mode: StoreMode,
    records: Vec<Record>,
    by_id: FxHashMap<(u32, u32), usize>,
    by_children: FxHashMap<Box<[TreeId]>, usize>,
    next_serial: Vec<u32>,
}

/// W iff there is no child or some child is a Loss.
pub fn outcome_of(children: &[TreeId]) -> Outcome {
    if children.is_empty() || children.iter().any(|c| c.outcome() == Outcome::Loss) {
        Outcome::Win
    } else {
        Outcome::Loss
    }
}

pub fn nim_sum(m: u32, n: u32) -> u32 {
    m ^ n
}

fn mex(values: impl IntoIterator<Item = u32>) -> u32 {
    let mut seen: Vec<u32> = values.into_iter().collect();
    seen.sort_unstable();
    seen.dedup();
    seen.iter().enumerate().find(|(i, &v)| *i as u32 != v).map_or(seen.len() as u32, |(i, _)| i as u32)
}

impl TreeStore {
    pub fn new(mode: StoreMode) -> TreeStore {
        let mut store = TreeStore {
            mode,
            records: Vec::new(),
            by_id: FxHashMap::default(),
            by_children: FxHashMap::default(),
            next_serial: Vec::new(),
        };
        store.nim(0);
        store
    }

    pub fn mode(&self) -> StoreMode {
        self.mode
    }

    /// Number of stored trees; `G + *1` forms are implied, not stored.
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Stored trees in insertion order.
    pub fn ids(&self) -> impl Iterator<Item = TreeId> + '_ {
        self.records.iter().map(|r| r.id)
    }

    fn record(&self, id: TreeId) -> Option<&Record> {
        self.by_id.get(&id.base()).map(|&i| &self.records[i])
    }

    /// Whether `id` (or the stored tree behind a `+1` id) is present with the
    /// same outcome.
    pub fn contains(&self, id: TreeId) -> bool {
        match self.record(id) {
            Some(r) if id.plus_one() => self.mode == StoreMode::Reduced && r.plus_outcome == id.outcome(),
            Some(r) => r.id == id,
            None => false,
        }
    }

    /// Stored children of a stored tree (not of a `+1` id).
    pub fn stored_children(&self, id: TreeId) -> Option<&[TreeId]> {
        self.record(id).map(|r| &r.children[..])
    }

    /// Children of the tree `id` denotes, sorted. For `G + *1` these are `G`
    /// and every child of `G` with its `+1` factor toggled.
    pub fn children_of(&self, id: TreeId) -> Vec<TreeId> {
        let record = self.record(id).unwrap_or_else(|| panic!("tree {id} is not in the store"));
        if !id.plus_one() {
            return record.children.to_vec();
        }
        let mut out: Vec<TreeId> = record.children.iter().map(|&c| self.toggle(c)).collect();
        out.push(record.id);
        out.sort_unstable();
        out
    }

    /// `id + *1`, using `*1 + *1 = *0`.
    pub fn toggle(&self, id: TreeId) -> TreeId {
        let record = self.record(id).unwrap_or_else(|| panic!("tree {id} is not in the store"));
        if id.plus_one() {
            record.id
        } else {
            TreeId::new(id.height(), id.serial(), true, record.plus_outcome)
        }
    }

    /// Strips a `+1` factor: returns the stored tree and whether a factor was removed.
    pub fn split_plus_one(&self, id: TreeId) -> (TreeId, bool) {
        if id.plus_one() {
            (self.toggle(id), true)
        } else {
            (id, false)
        }
    }

    /// Id of the Nim-heap `*n`. Odd heaps are `*(n-1) + *1` in reduced mode.
    pub fn nim(&mut self, n: u32) -> TreeId {
        if self.mode == StoreMode::Reduced && n % 2 == 1 {
            let base = self.nim(n - 1);
            return self.toggle(base);
        }
        if let Some(r) = self.by_id.get(&(n, 0)) {
            return self.records[*r].id;
        }
        let children: Vec<TreeId> = (0..n).map(|k| self.nim(k)).collect();
        self.insert(n, 0, children)
    }

    fn insert(&mut self, height: u32, serial: u32, children: Vec<TreeId>) -> TreeId {
        let outcome = outcome_of(&children);
        let id = TreeId::new(height, serial, false, outcome);
        let plus_outcome = if outcome == Outcome::Loss
            || children.iter().any(|&c| self.toggle_outcome(c) == Outcome::Loss)
        {
            Outcome::Win
        } else {
            Outcome::Loss
        };
        let children: Box<[TreeId]> = children.into();
        let index = self.records.len();
        self.records.push(Record { id, children: children.clone(), plus_outcome });
        self.by_id.insert((height, serial), index);
        self.by_children.insert(children, index);
        let h = height as usize;
        if self.next_serial.len() <= h {
            self.next_serial.resize(h + 1, 1);
        }
        if serial >= self.next_serial[h] {
            self.next_serial[h] = serial + 1;
        }
        id
    }

    fn toggle_outcome(&self, id: TreeId) -> Outcome {
        match self.mode {
            StoreMode::Reduced => self.toggle(id).outcome(),
            // never consulted in canonical-only mode
            StoreMode::CanonicalOnly => Outcome::Win,
        }
    }

    /// Exact lookup of a child set, including the implied `G + *1` forms.
    /// Never inserts.
    pub fn lookup(&self, children: &[TreeId]) -> Option<TreeId> {
        if let Some(&i) = self.by_children.get(children) {
            return Some(self.records[i].id);
        }
        if self.mode == StoreMode::Reduced {
            return self.factor_star1(children).map(|g| self.toggle(g));
        }
        None
    }

    /// Mex rule: a set of Nim-heaps containing *0 or *1 is the Nim-heap of its mex.
    pub fn reduce_mex(&mut self, children: &[TreeId]) -> Option<TreeId> {
        let sizes: Option<Vec<u32>> = children.iter().map(|c| c.nim_value()).collect();
        let sizes = sizes?;
        if !sizes.iter().any(|&s| s <= 1) {
            return None;
        }
        Some(self.nim(mex(sizes)))
    }

    /// Every child being reversible through *0 reduces a Win to *0.
    pub fn reduce_to_zero(&mut self, children: &[TreeId]) -> Option<TreeId> {
        if children.is_empty() || outcome_of(children) != Outcome::Win {
            return None;
        }
        let zero = self.nim(0);
        children.iter().all(|&c| self.children_of(c).contains(&zero)).then_some(zero)
    }

    /// Smallest reducer among the height prefixes of `children`.
    ///
    /// A prefix is tried where the next height jumps by at least 2. A prefix
    /// that is not already stored is itself reducible and is skipped.
    pub fn find_reducer(&self, children: &[TreeId]) -> Option<TreeId> {
        let mut sorted = children.to_vec();
        sorted.sort_by_key(|c| c.real_height());
        for cut in 1..sorted.len() {
            if sorted[cut].real_height() < sorted[cut - 1].real_height() + 2 {
                continue;
            }
            let mut prefix = sorted[..cut].to_vec();
            prefix.sort_unstable();
            let Some(candidate) = self.lookup(&prefix) else {
                continue;
            };
            if sorted[cut..].iter().all(|&e| self.children_of(e).contains(&candidate)) {
                return Some(candidate);
            }
        }
        None
    }

    /// If `children` is the child set of `G + *1` for a stored `G`, returns `G`.
    pub fn factor_star1(&self, children: &[TreeId]) -> Option<TreeId> {
        let top = children.iter().map(|c| c.real_height()).max()?;
        let mut candidates = children.iter().filter(|c| c.real_height() == top && !c.plus_one());
        let g = *candidates.next()?;
        if candidates.next().is_some() {
            return None;
        }
        let record = self.record(g)?;
        if record.children.len() + 1 != children.len() {
            return None;
        }
        let mut expected: Vec<TreeId> = record.children.iter().map(|&c| self.toggle(c)).collect();
        expected.push(g);
        expected.sort_unstable();
        (expected == children).then_some(g)
    }

    /// Interns the tree whose children are `children` (all already stored),
    /// reducing it first in reduced mode.
    pub fn intern(&mut self, children: &[TreeId]) -> TreeId {
        let mut set = children.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            return self.nim(0);
        }
        match self.mode {
            StoreMode::CanonicalOnly => {
                let is_heap = set.iter().enumerate().all(|(k, c)| c.serial() == 0 && c.height() == k as u32);
                if is_heap {
                    return self.nim(set.len() as u32);
                }
            }
            StoreMode::Reduced => {
                if let Some(id) = self.reduce_mex(&set) {
                    return id;
                }
                if let Some(id) = self.reduce_to_zero(&set) {
                    return id;
                }
                if let Some(id) = self.find_reducer(&set) {
                    return id;
                }
                if let Some(g) = self.factor_star1(&set) {
                    return self.toggle(g);
                }
            }
        }
        if let Some(&i) = self.by_children.get(&set[..]) {
            return self.records[i].id;
        }
        let height = 1 + set.iter().map(|c| c.real_height()).max().unwrap_or(0);
        let h = height as usize;
        if self.next_serial.len() <= h {
            self.next_serial.resize(h + 1, 1);
        }
        let serial = self.next_serial[h];
        self.insert(height, serial, set)
    }

    /// Inserts a tree under a given id without reducing it, as when loading a
    /// saved store. Children must already be present.
    pub fn insert_exact(&mut self, id: TreeId, children: &[TreeId]) -> Result<(), StoreError> {
        if id.plus_one() {
            return Err(StoreError::Inconsistent(id, "stored trees carry no +1 factor"));
        }
        for &c in children {
            if c.plus_one() && self.mode == StoreMode::CanonicalOnly {
                return Err(StoreError::Factored(c));
            }
            if !self.contains(c) {
                return Err(StoreError::Dangling(id, c));
            }
        }
        let mut set = children.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.len() != children.len() {
            return Err(StoreError::Inconsistent(id, "children not distinct"));
        }
        if outcome_of(&set) != id.outcome() {
            return Err(StoreError::Inconsistent(id, "outcome"));
        }
        let height = set.iter().map(|c| c.real_height() + 1).max().unwrap_or(0);
        if height != id.height() {
            return Err(StoreError::Inconsistent(id, "height"));
        }
        if let Some(r) = self.record(id) {
            if r.children[..] == set[..] {
                return Ok(());
            }
            return Err(StoreError::Conflict(id));
        }
        if self.by_children.contains_key(&set[..]) {
            return Err(StoreError::Conflict(id));
        }
        self.insert(id.height(), id.serial(), set);
        Ok(())
    }

    /// Content hash of the stored trees in insertion order; distinguishes
    /// stores whose serials were assigned by different runs.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for line in self.tree_lines() {
            hasher.update(line.as_bytes());
            hasher.update(b"\n");
        }
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `T <id> : <child> <child> ...` lines, in insertion order.
    pub fn tree_lines(&self) -> impl Iterator<Item = String> + '_ {
        self.records.iter().map(|r| {
            let mut line = format!("T {} :", r.id);
            for c in r.children.iter() {
                line.push(' ');
                line.push_str(&c.to_string());
            }
            line
        })
    }
}
