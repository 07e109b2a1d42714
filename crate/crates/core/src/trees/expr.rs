use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::{TreeId, TreeStore};

/// A tree written out in full: `*n` for a Nim-heap, `{a;b;...}` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeExpr {
    Nim(u32),
    Set(Vec<TreeExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad tree expression at byte {offset}: {message}")]
pub struct ExprError {
    pub offset: usize,
    pub message: &'static str,
}

impl TreeExpr {
    pub fn height(&self) -> u32 {
        match self {
            TreeExpr::Nim(n) => *n,
            TreeExpr::Set(kids) => kids.iter().map(|k| k.height() + 1).max().unwrap_or(0),
        }
    }

    /// Heaps written as sets become `*n`, duplicates go, children are sorted.
    pub fn normalized(&self) -> TreeExpr {
        match self {
            TreeExpr::Nim(n) => TreeExpr::Nim(*n),
            TreeExpr::Set(kids) => {
                let mut kids: Vec<TreeExpr> = kids.iter().map(|k| k.normalized()).collect();
                kids.sort_by(display_order);
                kids.dedup();
                let heap = kids.iter().enumerate().all(|(i, k)| *k == TreeExpr::Nim(i as u32));
                if heap {
                    TreeExpr::Nim(kids.len() as u32)
                } else {
                    TreeExpr::Set(kids)
                }
            }
        }
    }

    /// Full expansion of a stored id, children in id order; `+1` forms are
    /// written out.
    pub fn of(store: &TreeStore, id: TreeId) -> TreeExpr {
        if let Some(n) = id.nim_value() {
            return TreeExpr::Nim(n);
        }
        TreeExpr::Set(store.children_of(id).into_iter().map(|c| TreeExpr::of(store, c)).collect())
    }

    /// Equality up to child order, duplicates and heaps written as sets.
    pub fn same_tree(&self, other: &TreeExpr) -> bool {
        self.normalized() == other.normalized()
    }

    /// Interns the tree, children first.
    pub fn intern(&self, store: &mut TreeStore) -> TreeId {
        match self {
            TreeExpr::Nim(n) => store.nim(*n),
            TreeExpr::Set(kids) => {
                let ids: Vec<TreeId> = kids.iter().map(|k| k.intern(store)).collect();
                store.intern(&ids)
            }
        }
    }
}

// heaps first by size, then sets by height and text
fn display_order(a: &TreeExpr, b: &TreeExpr) -> Ordering {
    match (a, b) {
        (TreeExpr::Nim(x), TreeExpr::Nim(y)) => x.cmp(y),
        (TreeExpr::Nim(_), TreeExpr::Set(_)) => Ordering::Less,
        (TreeExpr::Set(_), TreeExpr::Nim(_)) => Ordering::Greater,
        _ => a.height().cmp(&b.height()).then_with(|| a.to_string().cmp(&b.to_string())),
    }
}

impl fmt::Display for TreeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeExpr::Nim(n) => write!(f, "*{n}"),
            TreeExpr::Set(kids) => {
                f.write_str("{")?;
                for (i, k) in kids.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{k}")?;
                }
                f.write_str("}")
            }
        }
    }
}

impl FromStr for TreeExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<TreeExpr, ExprError> {
        let bytes = s.as_bytes();
        let mut pos = 0;
        let e = parse_expr(bytes, &mut pos)?;
        if pos != bytes.len() {
            return Err(ExprError { offset: pos, message: "trailing input" });
        }
        Ok(e)
    }
}

fn parse_expr(b: &[u8], pos: &mut usize) -> Result<TreeExpr, ExprError> {
    match b.get(*pos) {
        Some(b'*') => {
            *pos += 1;
            let start = *pos;
            while b.get(*pos).is_some_and(u8::is_ascii_digit) {
                *pos += 1;
            }
            let digits = std::str::from_utf8(&b[start..*pos]).unwrap();
            digits
                .parse()
                .map(TreeExpr::Nim)
                .map_err(|_| ExprError { offset: start, message: "expected heap size" })
        }
        Some(b'{') => {
            *pos += 1;
            let mut kids = Vec::new();
            if b.get(*pos) == Some(&b'}') {
                *pos += 1;
                return Ok(TreeExpr::Set(kids));
            }
            loop {
                kids.push(parse_expr(b, pos)?);
                match b.get(*pos) {
                    Some(b';') => *pos += 1,
                    Some(b'}') => {
                        *pos += 1;
                        return Ok(TreeExpr::Set(kids));
                    }
                    _ => return Err(ExprError { offset: *pos, message: "expected ';' or '}'" }),
                }
            }
        }
        _ => Err(ExprError { offset: *pos, message: "expected '*' or '{'" }),
    }
}
