//! Basis and proof files.
//!
//! Both formats are line oriented text. A basis file holds a reduced tree
//! store and a position map; a proof file holds solved nodes. The header
//! checksum ties a proof to the basis run whose tree ids it uses.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rustc_hash::FxHashMap;

use crate::budget::{Budget, BudgetExceeded};
use crate::movegen::land_from_key;
use crate::position::{parse, render, start_position, Position};
use crate::solver::{Entry, ProofDb};
use crate::trees::{StoreError, StoreMode, TreeBuilder, TreeId, TreeStore};

const BASIS_MAGIC: &str = "SPROUTS-RCT";
const PROOF_MAGIC: &str = "SPROUTS-PROOF";
const VERSION: &str = "v1";

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line 1: unsupported format version '{0}'")]
    Version(String),
    #[error("tree checksum {found} does not match header run={expected}")]
    Checksum { expected: String, found: String },
    #[error("line {line}: {source}")]
    Tree { line: usize, source: StoreError },
    #[error("line {line}: unknown tree id {id}")]
    Dangling { line: usize, id: TreeId },
    #[error("file ends before any content")]
    Empty,
}

fn syntax(line: usize, message: impl Into<String>) -> FileError {
    FileError::Syntax { line, message: message.into() }
}

/// Frozen reduced tree store with the tree of every position met while
/// building it.
#[derive(Clone, Debug)]
pub struct BasisDb {
    spots: usize,
    store: TreeStore,
    positions: FxHashMap<String, TreeId>,
}

impl BasisDb {
    pub fn spots(&self) -> usize {
        self.spots
    }

    pub fn store(&self) -> &TreeStore {
        &self.store
    }

    pub fn run(&self) -> String {
        self.store.checksum()
    }

    /// Tree of a position string in canonical notation, if it was met.
    pub fn lookup(&self, position: &str) -> Option<TreeId> {
        self.positions.get(position).copied()
    }

    /// Tree of a single canonical land given by its key.
    pub fn lookup_land(&self, land_key: &str) -> Option<TreeId> {
        let mut s = String::with_capacity(land_key.len() + 1);
        s.push_str(land_key);
        s.push('!');
        self.positions.get(&s).copied()
    }

    pub fn position_count(&self) -> usize {
        self.positions.len()
    }

    /// Number of distinct tree ids over the stored positions.
    pub fn distinct_rcts(&self) -> usize {
        self.positions.values().collect::<HashSet<_>>().len()
    }

    pub fn positions(&self) -> impl Iterator<Item = (&str, TreeId)> {
        self.positions.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// An empty basis: every land stays a position in solver nodes.
    pub fn empty() -> BasisDb {
        BasisDb { spots: 0, store: TreeStore::new(StoreMode::Reduced), positions: FxHashMap::default() }
    }

    pub fn save(&self, path: &Path) -> Result<(), FileError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<BasisDb, FileError> {
        BasisDb::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{BASIS_MAGIC} {VERSION} spots={} run={}\n", self.spots, self.run());
        for line in self.store.tree_lines() {
            out.push_str(&line);
            out.push('\n');
        }
        let mut entries: Vec<(&String, &TreeId)> = self.positions.iter().collect();
        entries.sort();
        for (pos, id) in entries {
            let _ = writeln!(out, "P {pos} {id}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<BasisDb, FileError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or(FileError::Empty)?;
        let fields = header_fields(header, BASIS_MAGIC)?;
        let spots = field(&fields, "spots")?.parse().map_err(|_| syntax(1, "bad spots field"))?;
        let run = field(&fields, "run")?.to_string();

        let mut store = TreeStore::new(StoreMode::Reduced);
        let mut positions = FxHashMap::default();
        let mut trees_done = false;
        for (n, line) in lines {
            if let Some(rest) = line.strip_prefix("T ") {
                if trees_done {
                    return Err(syntax(n, "tree line after position lines"));
                }
                let (id, children) = rest.split_once(" :").ok_or_else(|| syntax(n, "missing ':'"))?;
                let id: TreeId = id.parse().map_err(|e| syntax(n, format!("{e}")))?;
                let children = children
                    .split_whitespace()
                    .map(|c| c.parse::<TreeId>().map_err(|e| syntax(n, format!("{e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                store.insert_exact(id, &children).map_err(|source| FileError::Tree { line: n, source })?;
            } else if let Some(rest) = line.strip_prefix("P ") {
                if !trees_done {
                    trees_done = true;
                    let found = store.checksum();
                    if found != run {
                        return Err(FileError::Checksum { expected: run, found });
                    }
                }
                let (pos, id) = rest.rsplit_once(' ').ok_or_else(|| syntax(n, "expected position and id"))?;
                if !pos.ends_with('!') {
                    return Err(syntax(n, "position must end with '!'"));
                }
                let id: TreeId = id.parse().map_err(|e| syntax(n, format!("{e}")))?;
                if !store.contains(id) {
                    return Err(FileError::Dangling { line: n, id });
                }
                positions.insert(pos.to_string(), id);
            } else if !line.is_empty() {
                return Err(syntax(n, "expected a T or P line"));
            }
        }
        if !trees_done {
            let found = store.checksum();
            if found != run {
                return Err(FileError::Checksum { expected: run, found });
            }
        }
        Ok(BasisDb { spots, store, positions })
    }
}

fn header_fields<'a>(header: &'a str, magic: &str) -> Result<Vec<(&'a str, &'a str)>, FileError> {
    let mut words = header.split_whitespace();
    if words.next() != Some(magic) {
        return Err(syntax(1, format!("expected '{magic}' header")));
    }
    match words.next() {
        Some(VERSION) => {}
        Some(v) => return Err(FileError::Version(v.to_string())),
        None => return Err(syntax(1, "missing version")),
    }
    words.map(|w| w.split_once('=').ok_or_else(|| syntax(1, format!("bad header field '{w}'")))).collect()
}

fn field<'a>(fields: &[(&str, &'a str)], name: &str) -> Result<&'a str, FileError> {
    fields.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).ok_or_else(|| syntax(1, format!("missing {name}=")))
}

/// Notation string for a position given by canonical land keys: letters are
/// renamed across lands so the result parses.
pub fn render_keys(keys: &[&str]) -> String {
    if keys.iter().filter(|k| k.bytes().any(|b| b.is_ascii_alphabetic())).count() <= 1 {
        let mut s = keys.concat();
        s.push('!');
        return s;
    }
    let lands = keys.iter().map(|k| land_from_key(k).expect("stored land keys parse")).collect();
    render(&Position::new(lands)).expect("at most 26 names per class")
}

/// Computes the reduced tree of `S_p`, recording every position met.
pub fn build_basis(spots: usize, budget: Budget) -> Result<BasisDb, BudgetExceeded> {
    let start = start_position(spots).expect("at least one spot");
    let mut builder = TreeBuilder::new(StoreMode::Reduced, budget);
    builder.tree_of(&start)?;
    let (store, memo) = builder.into_parts();
    let positions = memo
        .into_iter()
        .map(|(key, id)| {
            let lands: Vec<&str> = key.trim_end_matches('!').split_inclusive(']').collect();
            (render_keys(&lands), id)
        })
        .collect();
    Ok(BasisDb { spots, store, positions })
}

/// Checks that a position string is in canonical notation.
pub fn is_canonical(text: &str) -> bool {
    match parse(text) {
        Ok(p) => render(&crate::position::canonize(&p)).is_ok_and(|c| c == text),
        Err(_) => false,
    }
}

impl ProofDb {
    pub fn to_text(&self) -> String {
        let mut out = format!("{PROOF_MAGIC} {VERSION} root={} run={}\n", self.root(), self.run());
        let mut keys: Vec<&String> = self.entries().keys().collect();
        keys.sort();
        for key in keys {
            match &self.entries()[key] {
                Entry::Win(Some(w)) => {
                    let _ = writeln!(out, "N {key} W {w}");
                }
                Entry::Win(None) => {
                    let _ = writeln!(out, "N {key} W");
                }
                Entry::Loss => {
                    let _ = writeln!(out, "N {key} L");
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<ProofDb, FileError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or(FileError::Empty)?;
        let fields = header_fields(header, PROOF_MAGIC)?;
        let root = field(&fields, "root")?.to_string();
        let run = field(&fields, "run")?.to_string();
        let mut db = ProofDb::new(root, run);
        for (n, line) in lines {
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split(' ').collect();
            let entry = match words.as_slice() {
                ["N", _, "L"] => Entry::Loss,
                ["N", _, "W"] => Entry::Win(None),
                ["N", _, "W", w] => Entry::Win(Some(w.to_string())),
                _ => return Err(syntax(n, "expected 'N <key> W [<witness>]' or 'N <key> L'")),
            };
            if db.insert(words[1].to_string(), entry).is_some() {
                return Err(syntax(n, "duplicate node"));
            }
        }
        Ok(db)
    }

    pub fn save(&self, path: &Path) -> Result<(), FileError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ProofDb, FileError> {
        ProofDb::from_text(&std::fs::read_to_string(path)?)
    }
}
