use super::{Land, Position, VertexClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("more than 26 {0} vertex names needed")]
    TooManyNames(&'static str),
    #[error("dead vertex in a stored position")]
    DeadVertex,
}

/// Letter counters shared by all lands of one rendered position.
#[derive(Default)]
pub(crate) struct Names {
    upper: u8,
    lower: u8,
}

/// Renders a position; letters are named in first-use order.
pub fn render(pos: &Position) -> Result<String, RenderError> {
    let mut out = String::new();
    let mut names = Names::default();
    for land in &pos.lands {
        render_land(land, &mut names, &mut out)?;
    }
    out.push('!');
    Ok(out)
}

pub(crate) fn render_land(land: &Land, names: &mut Names, out: &mut String) -> Result<(), RenderError> {
    let classes = land.vertex_classes();
    let mut assigned: Vec<Option<u8>> = vec![None; land.vertex_count()];
    for region in &land.regions {
        for boundary in &region.boundaries {
            for &v in &boundary.walk {
                let c = match classes[v as usize] {
                    VertexClass::Digit(d) if d < 3 => b'0' + d,
                    VertexClass::Digit(_) => return Err(RenderError::DeadVertex),
                    VertexClass::Upper => letter(&mut assigned[v as usize], &mut names.upper, b'A', "uppercase")?,
                    VertexClass::Lower => letter(&mut assigned[v as usize], &mut names.lower, b'a', "lowercase")?,
                };
                out.push(c as char);
            }
            out.push('.');
        }
        out.push('}');
    }
    out.push(']');
    Ok(())
}

fn letter(slot: &mut Option<u8>, counter: &mut u8, base: u8, class: &'static str) -> Result<u8, RenderError> {
    if let Some(c) = *slot {
        return Ok(c);
    }
    if *counter >= 26 {
        return Err(RenderError::TooManyNames(class));
    }
    let c = base + *counter;
    *counter += 1;
    *slot = Some(c);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn round_trip_on_canonical_input() {
        assert_eq!(render(&parse("0.0.}]!").unwrap()).unwrap(), "0.0.}]!");
    }

    #[test]
    fn letter_rules() {
        // z has two adjacent corners on one boundary: digit 2
        let land = Land::from_walks(&[2, 1, 1], vec![vec![vec![0, 0, 1, 2]]]);
        assert_eq!(render(&Position::new(vec![land])).unwrap(), "211.}]!");
        // corners on different boundaries: uppercase
        let land = Land::from_walks(&[2, 2, 0], vec![vec![vec![2], vec![0, 1]], vec![vec![0, 1]]]);
        assert_eq!(render(&Position::new(vec![land])).unwrap(), "0.AB.}AB.}]!");
        // non-adjacent corners on one boundary: lowercase
        let land = Land::from_walks(&[1, 2, 1], vec![vec![vec![0, 1, 2, 1]]]);
        assert_eq!(render(&Position::new(vec![land])).unwrap(), "1a1a.}]!");
    }

    #[test]
    fn letters_continue_across_lands() {
        let s = "AB.}AB.}]AB.}0.AB.}]!";
        let pos = parse("AB.}AB.}]CD.}0.CD.}]!").unwrap();
        assert_eq!(render(&pos).unwrap(), "AB.}AB.}]CD.}0.CD.}]!");
        assert!(parse(s).is_err());
    }

    #[test]
    fn too_many_names() {
        let n = 27u32;
        let degrees = vec![2u8; n as usize];
        let walk: Vec<u32> = (0..n).chain(0..n).collect();
        let land = Land::from_walks(&degrees, vec![vec![walk]]);
        assert_eq!(render(&Position::new(vec![land])), Err(RenderError::TooManyNames("lowercase")));
    }
}
