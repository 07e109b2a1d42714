use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};

use super::{Expander, Node};
use crate::store::BasisDb;
use crate::trees::Outcome;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Entry {
    /// Win, with the key of a losing child (none for the terminal node).
    Win(Option<String>),
    Loss,
}

impl Entry {
    pub fn outcome(&self) -> Outcome {
        match self {
            Entry::Win(_) => Outcome::Win,
            Entry::Loss => Outcome::Loss,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProofError {
    #[error("proof was made against basis run {proof}, not {basis}")]
    RunMismatch { proof: String, basis: String },
    #[error("node {0} is missing")]
    Missing(String),
    #[error("node {0} is not a well-formed simplified node")]
    BadKey(String),
    #[error("node {0}: terminal node must be a win")]
    TerminalLoss(String),
    #[error("node {0}: win without a witness")]
    NoWitness(String),
    #[error("node {key}: witness {witness} is not a child")]
    NotAChild { key: String, witness: String },
    #[error("node {key}: witness {witness} is not a loss")]
    WitnessNotLoss { key: String, witness: String },
    #[error("node {key}: child {child} is not a win")]
    ChildNotWin { key: String, child: String },
}

/// Solved nodes with their witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofDb {
    root: String,
    run: String,
    entries: FxHashMap<String, Entry>,
}

impl ProofDb {
    pub fn new(root: String, run: String) -> ProofDb {
        ProofDb { root, run, entries: FxHashMap::default() }
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn run(&self) -> &str {
        &self.run
    }

    pub fn entries(&self) -> &FxHashMap<String, Entry> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: String, entry: Entry) -> Option<Entry> {
        self.entries.insert(key, entry)
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.entries.get(&self.root).map(Entry::outcome)
    }

    /// Only what the root needs: every child of a loss, the witness of a win.
    pub fn prune(&self, expander: &mut Expander) -> Result<ProofDb, ProofError> {
        let mut out = ProofDb::new(self.root.clone(), self.run.clone());
        let mut queue = VecDeque::from([self.root.clone()]);
        let mut seen = FxHashSet::default();
        seen.insert(self.root.clone());
        while let Some(key) = queue.pop_front() {
            let entry = self.entries.get(&key).ok_or_else(|| ProofError::Missing(key.clone()))?.clone();
            let next: Vec<String> = match &entry {
                Entry::Win(Some(w)) => vec![w.clone()],
                Entry::Win(None) => Vec::new(),
                Entry::Loss => {
                    let node = Node::from_key(&key).map_err(|_| ProofError::BadKey(key.clone()))?;
                    expander.children(&node).iter().map(Node::key).collect()
                }
            };
            out.entries.insert(key, entry);
            for k in next {
                if seen.insert(k.clone()) {
                    queue.push_back(k);
                }
            }
        }
        Ok(out)
    }

    /// Re-checks every entry against regenerated children.
    pub fn verify(&self, expander: &mut Expander) -> Result<(), ProofError> {
        let basis_run = expander.basis().run();
        if self.run != basis_run {
            return Err(ProofError::RunMismatch { proof: self.run.clone(), basis: basis_run });
        }
        if !self.entries.contains_key(&self.root) {
            return Err(ProofError::Missing(self.root.clone()));
        }
        let mut keys: Vec<&String> = self.entries.keys().collect();
        keys.sort();
        for key in keys {
            let node = checked_node(key, expander.basis())?;
            match &self.entries[key] {
                Entry::Win(None) if node.is_terminal() => {}
                Entry::Win(None) => return Err(ProofError::NoWitness(key.clone())),
                Entry::Win(Some(w)) => {
                    if !expander.children(&node).iter().any(|c| c.key() == *w) {
                        return Err(ProofError::NotAChild { key: key.clone(), witness: w.clone() });
                    }
                    if self.entries.get(w) != Some(&Entry::Loss) {
                        return Err(ProofError::WitnessNotLoss { key: key.clone(), witness: w.clone() });
                    }
                }
                Entry::Loss => {
                    if node.is_terminal() {
                        return Err(ProofError::TerminalLoss(key.clone()));
                    }
                    for child in expander.children(&node) {
                        let ck = child.key();
                        if !matches!(self.entries.get(&ck), Some(Entry::Win(_))) {
                            return Err(ProofError::ChildNotWin { key: key.clone(), child: ck });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A key must name a node that is already in simplified form.
fn checked_node(key: &str, basis: &BasisDb) -> Result<Node, ProofError> {
    let bad = || ProofError::BadKey(key.to_string());
    let node = Node::from_key(key).map_err(|_| bad())?;
    if node.rcts().iter().any(|&t| !basis.store().contains(t)) {
        return Err(bad());
    }
    let again = Node::simplify(node.lands().to_vec(), node.parity(), node.rcts().to_vec(), basis);
    if again.key() != key {
        return Err(bad());
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::super::Solver;
    use super::*;
    use crate::position::start_position;
    use crate::store::build_basis;
    use crate::Budget;

    fn setup(p: usize, basis_spots: usize) -> (Arc<BasisDb>, ProofDb) {
        let basis = Arc::new(build_basis(basis_spots, Budget::unlimited()).unwrap());
        let mut s = Solver::new(basis.clone());
        let root = Node::from_position(&start_position(p).unwrap(), &basis);
        s.solve(&root, &Budget::unlimited());
        (basis, s.proof(&root))
    }

    #[test]
    fn parity_only_proof() {
        let basis = Arc::new(build_basis(2, Budget::unlimited()).unwrap());
        let mut s = Solver::new(basis.clone());
        let root = Node::from_key("|1|").unwrap();
        s.solve(&root, &Budget::unlimited());
        let mut e = Expander::new(basis);
        let pruned = s.proof(&root).prune(&mut e).unwrap();
        assert_eq!(pruned.len(), 2);
        assert_eq!(pruned.outcome(), Some(Outcome::Loss));
    }

    #[test]
    fn generated_proofs_verify() {
        let (basis, db) = setup(4, 2);
        let mut e = Expander::new(basis);
        db.verify(&mut e).unwrap();
        let pruned = db.prune(&mut e).unwrap();
        assert!(pruned.len() <= db.len());
        pruned.verify(&mut e).unwrap();
        assert_eq!(pruned.outcome(), Some(Outcome::Loss));
    }

    #[test]
    fn every_flipped_outcome_is_rejected() {
        let (basis, db) = setup(3, 2);
        let mut e = Expander::new(basis);
        let pruned = db.prune(&mut e).unwrap();
        for key in pruned.entries().keys() {
            let mut bad = pruned.clone();
            let flipped = match &pruned.entries()[key] {
                Entry::Loss => Entry::Win(None),
                Entry::Win(_) => Entry::Loss,
            };
            bad.insert(key.clone(), flipped);
            assert!(bad.verify(&mut e).is_err(), "{key}");
        }
    }

    #[test]
    fn other_basis_run_is_rejected() {
        let (_, db) = setup(2, 2);
        let other = Arc::new(build_basis(3, Budget::unlimited()).unwrap());
        let mut e = Expander::new(other);
        assert!(matches!(db.verify(&mut e), Err(ProofError::RunMismatch { .. })));
    }

    #[test]
    fn text_round_trip() {
        let (_, db) = setup(3, 2);
        let again = ProofDb::from_text(&db.to_text()).unwrap();
        assert_eq!(again, db);
    }
}
