//! Line-oriented space files:
//!
//! ```text
//! # comment
//! atom x1 0.2
//! atom x2 1/5
//! event A1 x1 x2
//! ```
//!
//! All `atom` lines come before the first `event` line. Atom order fixes atom
//! indices and event order fixes the event index `i` of `A_i`.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, ParseError};
use crate::rational::{fmt_exact, parse_rational, Rational};
use crate::space::{AtomSet, Event, EventSystem, FiniteSpace};

/// A non-fatal finding from [`parse_space_with_warnings`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

pub fn parse_space(text: &str) -> Result<EventSystem, ParseError> {
    parse_space_with_warnings(text).map(|(sys, _)| sys)
}

type RawEvent = (usize, String, Vec<(usize, String)>);

/// Parses a space file, also returning warnings for zero-probability events
/// (they are legal here but rejected by the bound computations).
pub fn parse_space_with_warnings(text: &str) -> Result<(EventSystem, Vec<ParseWarning>), ParseError> {
    let mut atoms: Vec<(String, Rational)> = Vec::new();
    let mut atom_ids: HashSet<String> = HashSet::new();
    let mut last_atom_line = 0;
    // (line, name, [(column, atom id)])
    let mut raw_events: Vec<RawEvent> = Vec::new();
    let mut event_names: HashSet<String> = HashSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(line);
        let Some(&(kw_col, keyword)) = tokens.first() else {
            continue;
        };
        match keyword {
            "atom" => {
                if !raw_events.is_empty() {
                    return Err(ParseError::new(lineno, kw_col, "atom declared after the first event"));
                }
                if tokens.len() != 3 {
                    return Err(ParseError::new(lineno, kw_col, "expected `atom <id> <prob>`"));
                }
                let (id_col, id) = tokens[1];
                let (p_col, p) = tokens[2];
                if !atom_ids.insert(id.to_string()) {
                    return Err(ParseError::new(lineno, id_col, format!("duplicate atom id `{id}`")));
                }
                let prob = parse_rational(p).map_err(|e| ParseError::new(lineno, p_col, e))?;
                if prob < Rational::zero() {
                    return Err(ParseError::new(lineno, p_col, format!("negative probability `{p}`")));
                }
                atoms.push((id.to_string(), prob));
                last_atom_line = lineno;
            }
            "event" => {
                if tokens.len() < 3 {
                    return Err(ParseError::new(lineno, kw_col, "expected `event <name> <atom-id> [<atom-id> ...]`"));
                }
                let (name_col, name) = tokens[1];
                if !event_names.insert(name.to_string()) {
                    return Err(ParseError::new(lineno, name_col, format!("duplicate event name `{name}`")));
                }
                let members = tokens[2..].iter().map(|&(c, id)| (c, id.to_string())).collect();
                raw_events.push((lineno, name.to_string(), members));
            }
            other => {
                return Err(ParseError::new(
                    lineno,
                    kw_col,
                    format!("unknown directive `{other}` (expected `atom` or `event`)"),
                ));
            }
        }
    }

    let end_line = text.lines().count().max(1);
    if atoms.is_empty() {
        return Err(ParseError::new(end_line, 1, "no atoms declared"));
    }
    let space = FiniteSpace::new(atoms).map_err(|e| match e {
        Error::Space(msg) => ParseError::new(last_atom_line, 1, msg),
        other => ParseError::new(last_atom_line, 1, other.to_string()),
    })?;
    let space = Arc::new(space);

    if raw_events.is_empty() {
        return Err(ParseError::new(end_line, 1, "no events declared"));
    }
    let mut events = Vec::with_capacity(raw_events.len());
    let mut warnings = Vec::new();
    for (lineno, name, members) in raw_events {
        let mut idx = Vec::with_capacity(members.len());
        for (col, id) in members {
            let i = space.atom_index(&id).ok_or_else(|| {
                ParseError::new(lineno, col, format!("event `{name}` references unknown atom `{id}`"))
            })?;
            idx.push(i);
        }
        let event = Event::new(name.clone(), space.clone(), AtomSet::from_indices(idx))
            .map_err(|e| ParseError::new(lineno, 1, e.to_string()))?;
        if event.prob().is_zero() {
            warnings.push(ParseWarning {
                line: lineno,
                message: format!("event `{name}` has zero probability; bound computations will reject it"),
            });
        }
        events.push(event);
    }
    let sys = EventSystem::new(space, events).map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    Ok((sys, warnings))
}

/// 1-based column and text of each whitespace-separated token.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(byte, tok)| (line[..byte].chars().count() + 1, tok)).collect()
}

/// Canonical space-file text: probabilities as `num/den`, one line per atom
/// and event. `header` lines are emitted as `#` comments.
pub fn write_space(sys: &EventSystem, header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    let space = sys.space();
    for (id, p) in space.atoms() {
        let _ = writeln!(out, "atom {id} {}", fmt_exact(&p));
    }
    for e in sys.events() {
        let ids: Vec<_> = e.members().indices().map(|i| space.atom_id(i).into_owned()).collect();
        let _ = writeln!(out, "event {} {}", e.name(), ids.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    const PAPER: &str = include_str!("../examples/six_events.space");

    #[test]
    fn example_file_parses() {
        let sys = parse_space(PAPER).unwrap();
        assert_eq!(sys.space().len(), 5);
        assert!(sys.space().atoms().all(|(_, p)| *p == ratio(1, 5)));
        assert_eq!(sys.len(), 6);
        let a1 = &sys.events()[0];
        assert_eq!(a1.name(), "A1");
        assert_eq!(a1.members().indices().collect::<Vec<_>>(), vec![0, 1, 3]);
        assert_eq!(a1.prob(), ratio(3, 5));
    }

    #[test]
    fn single_atom_file() {
        let sys = parse_space("atom only 1\nevent A only\n").unwrap();
        assert_eq!(sys.probs(), vec![int(1)]);
    }

    #[test]
    fn sum_error_message() {
        let err = parse_space("atom a 1/2\natom b 1/3\nevent A a\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("probabilities sum to 5/6 ≠ 1"), "{err}");
    }

    #[test]
    fn errors_carry_line_and_column() {
        let err = parse_space("atom a 1\nevent A a  zz\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 12));
        assert!(err.message.contains("unknown atom `zz`"));

        let err = parse_space("atom a 1/2\n  atom a 1/2\n").unwrap_err();
        assert_eq!((err.line, err.column), (2, 8));

        let err = parse_space("atom a 1\nevent A a\natom b 0\n").unwrap_err();
        assert_eq!(err.line, 3);

        let err = parse_space("atom a 0.x\n").unwrap_err();
        assert_eq!((err.line, err.column), (1, 8));

        assert!(parse_space("bogus\n").is_err());
        assert!(parse_space("atom a 1\n").is_err());
        assert!(parse_space("# nothing\n").is_err());
        assert!(parse_space("atom a 1\nevent A\n").is_err());
        assert!(parse_space("atom a 1\nevent A a\nevent A a\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\n# header\natom a 1/2 # first\n\natom b 0.5\nevent E a b # all\n";
        let sys = parse_space(text).unwrap();
        assert_eq!(sys.union_prob(), int(1));
    }

    #[test]
    fn zero_probability_event_warns() {
        let (sys, warnings) = parse_space_with_warnings("atom a 1\natom z 0\nevent Z z\n").unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].line, 3);
    }

    #[test]
    fn canonical_text_round_trips() {
        let sys = parse_space(PAPER).unwrap();
        let text = write_space(&sys, &["round trip".into()]);
        assert_eq!(parse_space(&text).unwrap(), sys);
        assert_eq!(write_space(&parse_space(&text).unwrap(), &["round trip".into()]), text);
    }
}
