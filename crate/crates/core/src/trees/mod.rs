//! Interned canonical trees and reduced canonical trees (RCTs).
//!
//! Trees are hash-consed in a [`TreeStore`] and referred to by a [`TreeId`]
//! carrying the height, a per-height serial (0 for Nim-heaps), an optional
//! `+1` factor and the misère outcome.

mod analysis;
mod expr;
mod store;

pub use analysis::{count_distinct_cts, enumerate_rcts, grundy, position_keys, TreeBuilder};
pub use expr::{ExprError, TreeExpr};
pub use store::{nim_sum, outcome_of, StoreError, StoreMode, TreeStore};

use std::fmt;
use std::str::FromStr;

/// Misère outcome for the player to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Win,
    Loss,
}

impl Outcome {
    pub fn letter(self) -> char {
        match self {
            Outcome::Win => 'W',
            Outcome::Loss => 'L',
        }
    }

    pub fn from_letter(c: char) -> Option<Outcome> {
        match c {
            'W' => Some(Outcome::Win),
            'L' => Some(Outcome::Loss),
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Identifier of an interned tree, written `h-n-O` or `h-n+1-O`.
///
/// With `plus_one` set the id denotes `G + *1` where `G` is the stored tree
/// `h-n`; `height` stays the height of `G` and `outcome` is the outcome of the
/// sum. Derived order is (height, serial, plus_one).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TreeId {
    height: u32,
    serial: u32,
    plus_one: bool,
    outcome: Outcome,
}

impl TreeId {
    pub(crate) fn new(height: u32, serial: u32, plus_one: bool, outcome: Outcome) -> TreeId {
        TreeId { height, serial, plus_one, outcome }
    }

    pub fn height(self) -> u32 {
        self.height
    }

    /// Height of the tree this id denotes, counting the `+1` factor.
    pub fn real_height(self) -> u32 {
        self.height + self.plus_one as u32
    }

    pub fn serial(self) -> u32 {
        self.serial
    }

    pub fn plus_one(self) -> bool {
        self.plus_one
    }

    pub fn outcome(self) -> Outcome {
        self.outcome
    }

    pub fn is_nim(self) -> bool {
        self.serial == 0
    }

    /// Heap size when this id is a Nim-heap.
    pub fn nim_value(self) -> Option<u32> {
        self.is_nim().then(|| self.real_height())
    }

    /// The stored tree `G` of `G + *1`, or `self` when not factored.
    pub fn base(self) -> (u32, u32) {
        (self.height, self.serial)
    }
}

impl fmt::Display for TreeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.plus_one {
            write!(f, "{}-{}+1-{}", self.height, self.serial, self.outcome)
        } else {
            write!(f, "{}-{}-{}", self.height, self.serial, self.outcome)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed tree id '{0}'")]
pub struct IdParseError(pub String);

impl FromStr for TreeId {
    type Err = IdParseError;

    /// Accepts the factored form as well as the plain `2k+1-0-O` spelling of
    /// an odd Nim-heap, which is normalized to `2k-0+1-O`.
    fn from_str(s: &str) -> Result<TreeId, IdParseError> {
        let err = || IdParseError(s.to_string());
        let (rest, outcome) = s.rsplit_once('-').ok_or_else(err)?;
        let outcome = match outcome {
            "W" => Outcome::Win,
            "L" => Outcome::Loss,
            _ => return Err(err()),
        };
        let (rest, plus_one) = match rest.strip_suffix("+1") {
            Some(r) => (r, true),
            None => (rest, false),
        };
        let (h, n) = rest.split_once('-').ok_or_else(err)?;
        let parse_num = |t: &str| -> Result<u32, IdParseError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            t.parse().map_err(|_| err())
        };
        let (height, serial) = (parse_num(h)?, parse_num(n)?);
        if serial == 0 && !plus_one && height % 2 == 1 {
            return Ok(TreeId { height: height - 1, serial, plus_one: true, outcome });
        }
        Ok(TreeId { height, serial, plus_one, outcome })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_text_forms() {
        let id: TreeId = "3-1+1-W".parse().unwrap();
        assert_eq!(id.height(), 3);
        assert!(id.plus_one());
        assert_eq!(id.real_height(), 4);
        assert_eq!(id.to_string(), "3-1+1-W");
        assert_eq!("5-1-W".parse::<TreeId>().unwrap().to_string(), "5-1-W");
    }

    #[test]
    fn odd_nim_aliases() {
        assert_eq!("1-0-L".parse::<TreeId>().unwrap().to_string(), "0-0+1-L");
        assert_eq!("3-0-W".parse::<TreeId>().unwrap().to_string(), "2-0+1-W");
        assert_eq!("2-0-W".parse::<TreeId>().unwrap().nim_value(), Some(2));
    }

    #[test]
    fn malformed_ids() {
        for s in ["", "1-0", "1-0-X", "a-0-W", "1--W", "1-0+2-W", "-1-0-W"] {
            assert!(s.parse::<TreeId>().is_err(), "{s}");
        }
    }
}
