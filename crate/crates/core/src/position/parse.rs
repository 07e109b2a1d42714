use super::{Land, Position, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: &'static str },
    #[error("letter '{letter}' {message}")]
    Letter { letter: char, message: &'static str },
    #[error("digit 0 at byte {offset} is not alone on its boundary")]
    LonelyZero { offset: usize },
}

fn syntax(offset: usize, message: &'static str) -> ParseError {
    ParseError::Syntax { offset, message }
}

#[derive(Clone, Copy)]
struct Slot {
    land: usize,
    region: usize,
    boundary: usize,
}

/// Parses `land+ '!'`. The bare `!` denotes the empty position.
pub fn parse(text: &str) -> Result<Position, ParseError> {
    let bytes = text.as_bytes();
    // global vertex table; letters map to a vertex on first use
    let mut degrees: Vec<u8> = Vec::new();
    let mut letter_vertex: [Option<VertexId>; 52] = [None; 52];
    let mut letter_slots: Vec<Vec<Slot>> = vec![Vec::new(); 52];

    let mut lands: Vec<Vec<Vec<Vec<VertexId>>>> = Vec::new();
    let mut regions: Vec<Vec<Vec<VertexId>>> = Vec::new();
    let mut boundaries: Vec<Vec<VertexId>> = Vec::new();
    let mut walk: Vec<VertexId> = Vec::new();
    let mut zero_at: Option<usize> = None;
    let mut finished = false;

    for (offset, &c) in bytes.iter().enumerate() {
        if finished {
            return Err(syntax(offset, "trailing characters after '!'"));
        }
        match c {
            b'0' | b'1' | b'2' => {
                if c == b'0' {
                    zero_at = Some(offset);
                }
                degrees.push(c - b'0');
                walk.push(degrees.len() as u32 - 1);
            }
            b'A'..=b'Z' | b'a'..=b'z' => {
                let idx = if c.is_ascii_uppercase() { (c - b'A') as usize } else { 26 + (c - b'a') as usize };
                let v = *letter_vertex[idx].get_or_insert_with(|| {
                    degrees.push(2);
                    degrees.len() as u32 - 1
                });
                letter_slots[idx].push(Slot { land: lands.len(), region: regions.len(), boundary: boundaries.len() });
                walk.push(v);
            }
            b'.' => {
                if walk.is_empty() {
                    return Err(syntax(offset, "empty boundary"));
                }
                if let Some(z) = zero_at.take() {
                    if walk.len() != 1 {
                        return Err(ParseError::LonelyZero { offset: z });
                    }
                }
                boundaries.push(std::mem::take(&mut walk));
            }
            b'}' => {
                if !walk.is_empty() {
                    return Err(syntax(offset, "region terminator inside an unterminated boundary"));
                }
                regions.push(std::mem::take(&mut boundaries));
            }
            b']' => {
                if !walk.is_empty() || !boundaries.is_empty() {
                    return Err(syntax(offset, "land terminator inside an unterminated region"));
                }
                if regions.is_empty() {
                    return Err(syntax(offset, "land without regions"));
                }
                lands.push(std::mem::take(&mut regions));
            }
            b'!' => {
                if !walk.is_empty() || !boundaries.is_empty() || !regions.is_empty() {
                    return Err(syntax(offset, "position terminator inside an unterminated land"));
                }
                finished = true;
            }
            _ => return Err(syntax(offset, "unexpected character")),
        }
    }
    if !finished {
        return Err(syntax(bytes.len(), "missing '!' terminator"));
    }

    for (idx, slots) in letter_slots.iter().enumerate() {
        if slots.is_empty() {
            continue;
        }
        let letter = if idx < 26 { (b'A' + idx as u8) as char } else { (b'a' + (idx - 26) as u8) as char };
        if slots.len() != 2 {
            return Err(ParseError::Letter { letter, message: "must occur exactly twice" });
        }
        let (a, b) = (slots[0], slots[1]);
        if a.land != b.land {
            return Err(ParseError::Letter { letter, message: "spans two lands" });
        }
        let same_boundary = a.region == b.region && a.boundary == b.boundary;
        if letter.is_ascii_lowercase() && !same_boundary {
            return Err(ParseError::Letter { letter, message: "is lowercase but spans two boundaries" });
        }
        if letter.is_ascii_uppercase() && same_boundary {
            return Err(ParseError::Letter { letter, message: "is uppercase but both corners share a boundary" });
        }
        if letter.is_ascii_uppercase() && a.region == b.region {
            return Err(ParseError::Letter { letter, message: "joins two boundaries of one region" });
        }
    }

    let lands = lands.into_iter().map(|regions| Land::from_walks(&degrees, regions)).collect();
    Ok(Position { lands })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_spots() {
        let pos = parse("0.0.}]!").unwrap();
        assert_eq!(pos.lands().len(), 1);
        let land = &pos.lands()[0];
        assert_eq!(land.regions().len(), 1);
        assert_eq!(land.regions()[0].boundaries().len(), 2);
        assert_eq!(land.vertex_count(), 2);
        assert!((0..2).all(|v| land.degree(v) == 0));
    }

    #[test]
    fn shared_vertices() {
        let pos = parse("1ABC.}BCDE.}ADE.}]!").unwrap();
        let land = &pos.lands()[0];
        assert_eq!(land.regions().len(), 3);
        // the digit plus five letters
        assert_eq!(land.vertex_count(), 6);
        assert_eq!(land.degree(0), 1);
        assert!((1..6).all(|v| land.degree(v) == 2));
    }

    #[test]
    fn empty_position() {
        assert!(parse("!").unwrap().is_empty());
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse("0.0.}}!"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("0.0}]!"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("0.0.}]"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("0.3.}]!"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("0.}]!0"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse(".}]!"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("]!"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(parse("A.}A.}A.}]!"), Err(ParseError::Letter { letter: 'A', .. })));
        assert!(matches!(parse("A1.}]!"), Err(ParseError::Letter { letter: 'A', .. })));
        assert!(matches!(parse("a1.}a1.}]!"), Err(ParseError::Letter { letter: 'a', .. })));
        assert!(matches!(parse("A1A.}]!"), Err(ParseError::Letter { letter: 'A', .. })));
        assert!(matches!(parse("A1.A1.}]!"), Err(ParseError::Letter { letter: 'A', .. })));
        assert!(matches!(parse("A1.}]A1.}]!"), Err(ParseError::Letter { letter: 'A', .. })));
        assert!(matches!(parse("01.}]!"), Err(ParseError::LonelyZero { .. })));
    }

    #[test]
    fn known_corpus_parses() {
        for s in crate::test_support::KNOWN_POSITIONS {
            parse(s).unwrap_or_else(|e| panic!("{s}: {e}"));
        }
    }
}
