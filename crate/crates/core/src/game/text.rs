//! Line-based game file format.
//!
//! ```text
//! game <name>
//! state <id> (p1|p2|chance)
//! init <id>
//! edge <src> <dst>
//! prob <src> <dst> <num>/<den>
//! ```
//!
//! `#` starts a comment; `;` separates statements on one line. State
//! declarations may appear after the transitions that mention them.

use std::fmt::Write as _;

use super::{GameBuilder, Owner, Prob, StochasticGame};
use crate::error::{Error, Result};

struct Stmt<'a> {
    line: usize,
    words: Vec<&'a str>,
}

fn statements(text: &str) -> Vec<Stmt<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        for part in body.split(';') {
            let words: Vec<&str> = part.split_whitespace().collect();
            if !words.is_empty() {
                out.push(Stmt { line: i + 1, words });
            }
        }
    }
    out
}

pub(crate) fn parse_prob(text: &str) -> Option<Prob> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
        None => (text.parse::<i64>().ok()?, 1),
    };
    if den <= 0 {
        return None;
    }
    Some(Prob::new(num, den))
}

fn parse_owner(word: &str) -> Option<Owner> {
    match word {
        "p1" => Some(Owner::P1),
        "p2" => Some(Owner::P2),
        "chance" => Some(Owner::Chance),
        _ => None,
    }
}

/// Parse a game, discarding the auto-completion notes.
pub fn parse_game(text: &str) -> Result<StochasticGame> {
    parse_game_with_notes(text).map(|(g, _)| g)
}

/// Parse a game and return the diagnostic notes recorded on the way
/// (currently: terminal states that received an implicit self-loop).
pub fn parse_game_with_notes(text: &str) -> Result<(StochasticGame, Vec<String>)> {
    let stmts = statements(text);
    let mut b = GameBuilder::new("");
    let mut named = false;

    for st in &stmts {
        match st.words[0] {
            "game" => {
                if st.words.len() != 2 {
                    return Err(Error::parse(st.line, "expected `game <name>`"));
                }
                if named {
                    return Err(Error::parse(st.line, "duplicate `game` line"));
                }
                named = true;
                b.set_name(st.words[1]);
            }
            "state" => {
                if st.words.len() != 3 {
                    return Err(Error::parse(st.line, "expected `state <id> (p1|p2|chance)`"));
                }
                let owner = parse_owner(st.words[2])
                    .ok_or_else(|| Error::parse(st.line, format!("unknown owner `{}`", st.words[2])))?;
                b.state(st.words[1], owner).map_err(|e| Error::parse(st.line, strip(e)))?;
            }
            "init" | "edge" | "prob" => {}
            other => return Err(Error::parse(st.line, format!("unknown keyword `{other}`"))),
        }
    }

    let mut init_seen = false;
    for st in &stmts {
        let at = |e: Error| Error::parse(st.line, strip(e));
        match st.words[0] {
            "init" => {
                if st.words.len() != 2 {
                    return Err(Error::parse(st.line, "expected `init <id>`"));
                }
                if init_seen {
                    return Err(Error::parse(st.line, "duplicate `init` line"));
                }
                init_seen = true;
                let s = b.id(st.words[1]).map_err(at)?;
                b.init(s);
            }
            "edge" => {
                if st.words.len() != 3 {
                    return Err(Error::parse(st.line, "expected `edge <src> <dst>`"));
                }
                let from = b.id(st.words[1]).map_err(at)?;
                let to = b.id(st.words[2]).map_err(at)?;
                b.edge(from, to).map_err(at)?;
            }
            "prob" => {
                if st.words.len() != 4 {
                    return Err(Error::parse(st.line, "expected `prob <src> <dst> <num>/<den>`"));
                }
                let from = b.id(st.words[1]).map_err(at)?;
                let to = b.id(st.words[2]).map_err(at)?;
                let p = parse_prob(st.words[3])
                    .ok_or_else(|| Error::parse(st.line, format!("bad probability `{}`", st.words[3])))?;
                b.prob(from, to, p).map_err(at)?;
            }
            _ => {}
        }
    }
    b.build_with_notes()
}

fn strip(e: Error) -> String {
    match e {
        Error::Invalid(m) => m,
        other => other.to_string(),
    }
}

/// Serialize a game in the canonical file format. Self-loops are written
/// explicitly, so parsing the output yields an identical game with no notes.
pub fn write_game(g: &StochasticGame) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "game {}", g.name());
    for s in g.states() {
        let _ = writeln!(out, "state {} {}", g.state_name(s), g.owner(s));
    }
    let _ = writeln!(out, "init {}", g.state_name(g.init()));
    for s in g.states() {
        if g.owner(s) == Owner::Chance {
            for (t, p) in g.distribution(s) {
                let _ = writeln!(out, "prob {} {} {}/{}", g.state_name(s), g.state_name(t), p.numer(), p.denom());
            }
        } else {
            for &t in g.successors(s) {
                let _ = writeln!(out, "edge {} {}", g.state_name(s), g.state_name(t));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "\
game fig1
state s0 p1
state s1 p2
state s2 chance
state s3 chance
state s4 chance
init s0
edge s0 s1
edge s0 s2
edge s1 s3
edge s1 s4
";

    #[test]
    fn parses_fig1_with_auto_loops() {
        let (g, notes) = parse_game_with_notes(FIG1).unwrap();
        assert_eq!(g.num_states(), 5);
        assert_eq!(g.owner(0), Owner::P1);
        assert_eq!(g.owner(1), Owner::P2);
        for s in 2..5 {
            assert_eq!(g.successors(s), &[s]);
        }
        assert_eq!(notes.len(), 3);
    }

    #[test]
    fn single_state_line() {
        let g = parse_game("state a p1; init a").unwrap();
        assert_eq!(g.successors(0), &[0]);
        assert_eq!(g.name(), "game");
    }

    #[test]
    fn chance_mass_must_sum_to_one() {
        let text = "state c chance\nstate x chance\nstate y chance\ninit c\nprob c x 1/3; prob c y 1/3";
        let err = parse_game(text).unwrap_err();
        assert!(err.to_string().contains("chance mass 2/3 ≠ 1"), "{err}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_game("state a p1\ninit a\nedge a b\n").unwrap_err();
        assert_eq!(err, Error::parse(3, "unknown state `b`"));
        let err = parse_game("state a p1\nstate a p2\ninit a").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_game("state a p1").is_err());
    }

    #[test]
    fn write_then_parse_is_identity() {
        let g = parse_game(FIG1).unwrap();
        let text = write_game(&g);
        let (h, notes) = parse_game_with_notes(&text).unwrap();
        assert_eq!(g, h);
        assert!(notes.is_empty());
    }

    #[test]
    fn complete_games_are_untouched() {
        let text = "state a p1\nstate b chance\ninit a\nedge a b\nedge a a\nprob b a 1/2\nprob b b 1/2\n";
        let (g, notes) = parse_game_with_notes(text).unwrap();
        assert!(notes.is_empty());
        assert_eq!(g.successors(0), &[0, 1]);
        assert_eq!(g.probability(1, 0), Prob::new(1, 2));
    }
}
