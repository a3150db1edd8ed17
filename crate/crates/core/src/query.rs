//! Qualitative queries: Boolean combinations of almost-sure / nonzero
//! reachability and safety atoms.
//!
//! Text syntax (precedence `!` > `&` > `|`):
//!
//! ```text
//! query := or
//! or    := and ('|' and)*
//! and   := unary ('&' unary)*
//! unary := '!' unary | '(' query ')' | atom
//! atom  := ('AS'|'NZ') ('F'|'G') set
//! set   := '{' id (',' id)* '}' | '~' '{' id (',' id)* '}' | '{}' | '~{}'
//! ```
//!
//! `~{...}` is the complement relative to the game's state set.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{StateId, StochasticGame};
use crate::set::StateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Mode {
    /// Probability one.
    #[serde(rename = "AS")]
    As,
    /// Positive probability.
    #[serde(rename = "NZ")]
    Nz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Shape {
    /// Eventually visit the target (`F`).
    Reach,
    /// Never leave the target (`G`).
    Safe,
}

impl Mode {
    pub fn dual(self) -> Mode {
        match self {
            Mode::As => Mode::Nz,
            Mode::Nz => Mode::As,
        }
    }
}

impl Shape {
    pub fn dual(self) -> Shape {
        match self {
            Shape::Reach => Shape::Safe,
            Shape::Safe => Shape::Reach,
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            Shape::Reach => "F",
            Shape::Safe => "G",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::As => "AS",
            Mode::Nz => "NZ",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    pub mode: Mode,
    pub shape: Shape,
    pub target: StateSet,
}

impl Atom {
    pub fn new(mode: Mode, shape: Shape, target: StateSet) -> Atom {
        Atom { mode, shape, target }
    }

    pub fn as_reach(target: StateSet) -> Atom {
        Atom::new(Mode::As, Shape::Reach, target)
    }

    pub fn as_safe(target: StateSet) -> Atom {
        Atom::new(Mode::As, Shape::Safe, target)
    }

    pub fn nz_reach(target: StateSet) -> Atom {
        Atom::new(Mode::Nz, Shape::Reach, target)
    }

    pub fn nz_safe(target: StateSet) -> Atom {
        Atom::new(Mode::Nz, Shape::Safe, target)
    }

    /// The atom equivalent to the negation of `self`, e.g.
    /// `!AS F T` is `NZ G ~T`.
    pub fn negated(&self) -> Atom {
        Atom::new(self.mode.dual(), self.shape.dual(), self.target.complement())
    }

    pub fn is_nz_safe(&self) -> bool {
        self.mode == Mode::Nz && self.shape == Shape::Safe
    }

    pub fn to_text(&self, names: &[String]) -> String {
        format!("{} {} {}", self.mode, self.shape.letter(), set_text(&self.target, names))
    }
}

/// Render a state set, using the `~{...}` form when that is shorter.
pub fn set_text(set: &StateSet, names: &[String]) -> String {
    let n = set.universe();
    let members = set.len();
    let list = |s: &StateSet| -> String {
        let v: Vec<&str> = s.iter().map(|i| names[i].as_str()).collect();
        format!("{{{}}}", v.join(", "))
    };
    if members > 0 && n - members < members {
        format!("~{}", list(&set.complement()))
    } else {
        list(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Query {
    Atom(Atom),
    And(Vec<Query>),
    Or(Vec<Query>),
    Not(Box<Query>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FragmentClass {
    SingleObjective,
    ConjunctionASNZ,
    DisjunctionASNZ,
    PositiveAS,
    PositiveNZ,
    GeneralNoNZSafe,
    General,
}

impl FragmentClass {
    /// Whether the class is known to be determined and decided by the solver.
    pub fn is_determined(self) -> bool {
        !matches!(self, FragmentClass::GeneralNoNZSafe | FragmentClass::General)
    }

    /// The class of the dual query.
    pub fn dual(self) -> FragmentClass {
        match self {
            FragmentClass::ConjunctionASNZ => FragmentClass::DisjunctionASNZ,
            FragmentClass::DisjunctionASNZ => FragmentClass::ConjunctionASNZ,
            FragmentClass::PositiveAS => FragmentClass::PositiveNZ,
            FragmentClass::PositiveNZ => FragmentClass::PositiveAS,
            other => other,
        }
    }

    pub const ALL: [FragmentClass; 7] = [
        FragmentClass::SingleObjective,
        FragmentClass::ConjunctionASNZ,
        FragmentClass::DisjunctionASNZ,
        FragmentClass::PositiveAS,
        FragmentClass::PositiveNZ,
        FragmentClass::GeneralNoNZSafe,
        FragmentClass::General,
    ];
}

impl fmt::Display for FragmentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Query {
    pub fn atom(a: Atom) -> Query {
        Query::Atom(a)
    }

    pub fn negation(q: Query) -> Query {
        Query::Not(Box::new(q))
    }

    /// The always-true query `AS G ~{}` over `n` states.
    pub fn truth(n: usize) -> Query {
        Query::Atom(Atom::as_safe(StateSet::full(n)))
    }

    /// The always-false query `NZ F {}` over `n` states.
    pub fn falsity(n: usize) -> Query {
        Query::Atom(Atom::nz_reach(StateSet::empty(n)))
    }

    /// Conjunction, collapsing the empty and singleton cases.
    pub fn and_of(mut qs: Vec<Query>, n: usize) -> Query {
        match qs.len() {
            0 => Query::truth(n),
            1 => qs.pop().unwrap(),
            _ => Query::And(qs),
        }
    }

    /// Disjunction, collapsing the empty and singleton cases.
    pub fn or_of(mut qs: Vec<Query>, n: usize) -> Query {
        match qs.len() {
            0 => Query::falsity(n),
            1 => qs.pop().unwrap(),
            _ => Query::Or(qs),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Query::Atom(_) => true,
            Query::And(qs) | Query::Or(qs) => qs.iter().all(Query::is_positive),
            Query::Not(_) => false,
        }
    }

    /// Atoms in left-to-right order (with repetitions).
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        match self {
            Query::Atom(a) => out.push(a),
            Query::And(qs) | Query::Or(qs) => qs.iter().for_each(|q| q.collect_atoms(out)),
            Query::Not(q) => q.collect_atoms(out),
        }
    }

    /// Evaluate given a truth value for every atom.
    pub fn eval(&self, atom: &mut impl FnMut(&Atom) -> bool) -> bool {
        match self {
            Query::Atom(a) => atom(a),
            Query::And(qs) => qs.iter().all(|q| q.eval(atom)),
            Query::Or(qs) => qs.iter().any(|q| q.eval(atom)),
            Query::Not(q) => !q.eval(atom),
        }
    }

    /// Three-valued evaluation: `None` atoms are unknown, and a connective
    /// is decided as soon as its known operands decide it.
    pub fn eval_partial(&self, atom: &mut impl FnMut(&Atom) -> Option<bool>) -> Option<bool> {
        match self {
            Query::Atom(a) => atom(a),
            Query::Not(q) => q.eval_partial(atom).map(|b| !b),
            Query::And(qs) | Query::Or(qs) => {
                let short = matches!(self, Query::Or(_));
                let mut open = false;
                for q in qs {
                    match q.eval_partial(atom) {
                        Some(b) if b == short => return Some(short),
                        Some(_) => {}
                        None => open = true,
                    }
                }
                if open {
                    None
                } else {
                    Some(!short)
                }
            }
        }
    }

    /// Apply `f` to every atom target.
    pub fn map_targets(&self, f: &mut impl FnMut(&StateSet) -> StateSet) -> Query {
        match self {
            Query::Atom(a) => Query::Atom(Atom::new(a.mode, a.shape, f(&a.target))),
            Query::And(qs) => Query::And(qs.iter().map(|q| q.map_targets(f)).collect()),
            Query::Or(qs) => Query::Or(qs.iter().map(|q| q.map_targets(f)).collect()),
            Query::Not(q) => Query::negation(q.map_targets(f)),
        }
    }

    /// State universe size of the targets, if the query has any atom.
    pub fn universe(&self) -> Option<usize> {
        self.atoms().first().map(|a| a.target.universe())
    }

    pub fn to_text(&self, names: &[String]) -> String {
        let mut out = String::new();
        self.write_text(names, Prec::Top, &mut out);
        out
    }

    pub fn display<'a>(&'a self, g: &'a StochasticGame) -> impl fmt::Display + 'a {
        QueryDisplay { q: self, names: g.state_names() }
    }

    fn write_text(&self, names: &[String], ctx: Prec, out: &mut String) {
        match self {
            Query::Atom(a) => out.push_str(&a.to_text(names)),
            Query::Not(q) => {
                out.push('!');
                q.write_text(names, Prec::Nested, out);
            }
            Query::And(qs) | Query::Or(qs) if qs.is_empty() => {
                let n = names.len();
                let c = if matches!(self, Query::And(_)) { Query::truth(n) } else { Query::falsity(n) };
                c.write_text(names, ctx, out);
            }
            Query::And(qs) | Query::Or(qs) => {
                let sep = if matches!(self, Query::And(_)) { " & " } else { " | " };
                // Nested connectives are always parenthesized so the printed
                // text reparses to the same tree.
                let wrap = ctx != Prec::Top;
                if wrap {
                    out.push('(');
                }
                for (i, q) in qs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    q.write_text(names, Prec::Nested, out);
                }
                if wrap {
                    out.push(')');
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Prec {
    Top,
    Nested,
}

struct QueryDisplay<'a> {
    q: &'a Query,
    names: &'a [String],
}

impl fmt::Display for QueryDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.q.to_text(self.names))
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Bang,
    Amp,
    Bar,
    Tilde,
    Word(String),
}

const SPECIAL: &str = "(){},!&|~";

fn tokenize(text: &str) -> Vec<(usize, Tok)> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '~' => Tok::Tilde,
            _ => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || SPECIAL.contains(c) {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                out.push((i, Tok::Word(word)));
                continue;
            }
        };
        chars.next();
        out.push((i, tok));
    }
    out
}

#[derive(Debug)]
struct RawSet {
    complement: bool,
    names: Vec<(usize, String)>,
}

#[derive(Debug)]
enum Raw {
    Atom(Mode, Shape, RawSet),
    And(Vec<Raw>),
    Or(Vec<Raw>),
    Not(Box<Raw>),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let at = self.offset();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(Error::syntax(at, format!("expected {what}, found {}", show(&t)))),
            None => Err(Error::syntax(at, format!("expected {what}, found end of input"))),
        }
    }

    fn or(&mut self) -> Result<Raw> {
        let mut items = vec![self.and()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            items.push(self.and()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::Or(items) })
    }

    fn and(&mut self) -> Result<Raw> {
        let mut items = vec![self.unary()?];
        while self.peek() == Some(&Tok::Amp) {
            self.pos += 1;
            items.push(self.unary()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Raw::And(items) })
    }

    fn unary(&mut self) -> Result<Raw> {
        let at = self.offset();
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Raw::Not(Box::new(self.unary()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let q = self.or()?;
                let close = self.offset();
                match self.next() {
                    Some(Tok::RParen) => Ok(q),
                    _ => Err(Error::syntax(close, format!("unbalanced parentheses: `(` at offset {at} is not closed"))),
                }
            }
            Some(Tok::Word(_)) => self.atom(),
            Some(t) => Err(Error::syntax(at, format!("expected an atom, found {}", show(t)))),
            None => Err(Error::syntax(at, "expected an atom, found end of input")),
        }
    }

    fn atom(&mut self) -> Result<Raw> {
        let at = self.offset();
        let mode = match self.next() {
            Some(Tok::Word(w)) if w == "AS" => Mode::As,
            Some(Tok::Word(w)) if w == "NZ" => Mode::Nz,
            Some(Tok::Word(w)) => return Err(Error::syntax(at, format!("expected `AS` or `NZ`, found `{w}`"))),
            _ => return Err(Error::syntax(at, "expected `AS` or `NZ`")),
        };
        let at = self.offset();
        let shape = match self.next() {
            Some(Tok::Word(w)) if w == "F" => Shape::Reach,
            Some(Tok::Word(w)) if w == "G" => Shape::Safe,
            Some(t) => return Err(Error::syntax(at, format!("expected `F` or `G`, found {}", show(&t)))),
            None => return Err(Error::syntax(at, "expected `F` or `G`, found end of input")),
        };
        let complement = if self.peek() == Some(&Tok::Tilde) {
            self.pos += 1;
            true
        } else {
            false
        };
        self.expect(Tok::LBrace, "`{`")?;
        let mut names = Vec::new();
        if self.peek() == Some(&Tok::RBrace) {
            self.pos += 1;
        } else {
            loop {
                let at = self.offset();
                match self.next() {
                    Some(Tok::Word(w)) => names.push((at, w)),
                    Some(t) => return Err(Error::syntax(at, format!("expected a state id, found {}", show(&t)))),
                    None => return Err(Error::syntax(at, "expected a state id, found end of input")),
                }
                let at = self.offset();
                match self.next() {
                    Some(Tok::Comma) => continue,
                    Some(Tok::RBrace) => break,
                    Some(t) => return Err(Error::syntax(at, format!("expected `,` or `}}`, found {}", show(&t)))),
                    None => return Err(Error::syntax(at, "expected `}`, found end of input")),
                }
            }
        }
        Ok(Raw::Atom(mode, shape, RawSet { complement, names }))
    }
}

fn show(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBrace => "`{`".into(),
        Tok::RBrace => "`}`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Tilde => "`~`".into(),
    }
}

fn parse_raw(text: &str) -> Result<Raw> {
    let toks = tokenize(text);
    if toks.is_empty() {
        return Err(Error::syntax(0, "empty formula"));
    }
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let q = p.or()?;
    if p.pos < p.toks.len() {
        let at = p.offset();
        let msg = match p.peek() {
            Some(Tok::RParen) => "unbalanced parentheses: unexpected `)`".to_string(),
            Some(t) => format!("unexpected {}", show(t)),
            None => unreachable!(),
        };
        return Err(Error::syntax(at, msg));
    }
    Ok(q)
}

fn resolve(raw: &Raw, n: usize, id: &dyn Fn(usize, &str) -> Result<StateId>) -> Result<Query> {
    Ok(match raw {
        Raw::Atom(mode, shape, set) => {
            let mut target = StateSet::empty(n);
            for (at, name) in &set.names {
                target.insert(id(*at, name)?);
            }
            if set.complement {
                target = target.complement();
            }
            Query::Atom(Atom::new(*mode, *shape, target))
        }
        Raw::And(items) => Query::And(items.iter().map(|r| resolve(r, n, id)).collect::<Result<_>>()?),
        Raw::Or(items) => Query::Or(items.iter().map(|r| resolve(r, n, id)).collect::<Result<_>>()?),
        Raw::Not(r) => Query::negation(resolve(r, n, id)?),
    })
}

/// Parse a query whose set literals refer to states of `g`.
pub fn parse_query(text: &str, g: &StochasticGame) -> Result<Query> {
    let raw = parse_raw(text)?;
    resolve(&raw, g.num_states(), &|at, name| {
        g.state_id(name).ok_or_else(|| Error::syntax(at, format!("unknown state `{name}`")))
    })
}

/// Parse a query without a game. The state universe consists of the names
/// mentioned in the query, in order of first appearance.
pub fn parse_query_free(text: &str) -> Result<(Query, Vec<String>)> {
    let raw = parse_raw(text)?;
    let mut names: Vec<String> = Vec::new();
    fn collect(r: &Raw, names: &mut Vec<String>) {
        match r {
            Raw::Atom(_, _, set) => {
                for (_, n) in &set.names {
                    if !names.contains(n) {
                        names.push(n.clone());
                    }
                }
            }
            Raw::And(items) | Raw::Or(items) => items.iter().for_each(|r| collect(r, names)),
            Raw::Not(r) => collect(r, names),
        }
    }
    collect(&raw, &mut names);
    let q = resolve(&raw, names.len(), &|_, name| Ok(names.iter().position(|n| n == name).expect("collected above")))?;
    Ok((q, names))
}

// ---------------------------------------------------------------------------
// Normal forms and classification
// ---------------------------------------------------------------------------

/// Push negations to the atoms and eliminate them through the atom
/// dualities. Queries without negation are returned structurally unchanged.
pub fn negate_normalize(q: &Query) -> Query {
    push_not(q, false)
}

fn push_not(q: &Query, neg: bool) -> Query {
    match (q, neg) {
        (Query::Atom(a), false) => Query::Atom(a.clone()),
        (Query::Atom(a), true) => Query::Atom(a.negated()),
        (Query::Not(inner), _) => push_not(inner, !neg),
        (Query::And(qs), false) => Query::And(qs.iter().map(|q| push_not(q, false)).collect()),
        (Query::Or(qs), false) => Query::Or(qs.iter().map(|q| push_not(q, false)).collect()),
        (Query::And(qs), true) => Query::Or(qs.iter().map(|q| push_not(q, true)).collect()),
        (Query::Or(qs), true) => Query::And(qs.iter().map(|q| push_not(q, true)).collect()),
    }
}

/// The positive form of `!q`.
pub fn dual(q: &Query) -> Query {
    push_not(q, true)
}

fn only_connective(q: &Query, conj: bool) -> bool {
    match q {
        Query::Atom(_) => true,
        Query::And(qs) if conj => qs.iter().all(|q| only_connective(q, conj)),
        Query::Or(qs) if !conj => qs.iter().all(|q| only_connective(q, conj)),
        _ => false,
    }
}

/// Every fragment label that applies to the positive-form query `q`.
pub fn fragment_labels(q: &Query) -> Vec<FragmentClass> {
    debug_assert!(q.is_positive());
    let atoms = q.atoms();
    let mut out = Vec::new();
    if atoms.len() == 1 {
        out.push(FragmentClass::SingleObjective);
    }
    if only_connective(q, true) {
        out.push(FragmentClass::ConjunctionASNZ);
    }
    if atoms.iter().all(|a| a.mode == Mode::As) {
        out.push(FragmentClass::PositiveAS);
    }
    if only_connective(q, false) {
        out.push(FragmentClass::DisjunctionASNZ);
    }
    if atoms.iter().all(|a| a.mode == Mode::Nz) {
        out.push(FragmentClass::PositiveNZ);
    }
    if !atoms.iter().any(|a| a.is_nz_safe()) {
        out.push(FragmentClass::GeneralNoNZSafe);
    }
    out.push(FragmentClass::General);
    out
}

/// The most specific fragment of the positive-form query `q`. Labels are
/// tried in the order single objective, conjunction, positive AS,
/// disjunction, positive NZ, so a disjunction of AS atoms is `PositiveAS`.
pub fn classify(q: &Query) -> FragmentClass {
    fragment_labels(q)[0]
}

/// Disjunctive normal form of a positive query as a list of terms. Atoms are
/// deduplicated within a term and duplicate terms are dropped; order follows
/// left-to-right distribution. Fails if more than `cap` terms arise.
pub fn dnf_terms(q: &Query, cap: usize) -> Result<Vec<Vec<Atom>>> {
    let terms = match q {
        Query::Atom(a) => vec![vec![a.clone()]],
        Query::Or(qs) => {
            let mut out = Vec::new();
            for q in qs {
                out.extend(dnf_terms(q, cap)?);
                if out.len() > cap {
                    return Err(Error::resource("DNF terms", cap));
                }
            }
            out
        }
        Query::And(qs) => {
            let mut acc: Vec<Vec<Atom>> = vec![Vec::new()];
            for q in qs {
                let sub = dnf_terms(q, cap)?;
                if acc.len().saturating_mul(sub.len()) > cap {
                    return Err(Error::resource("DNF terms", cap));
                }
                let mut next = Vec::with_capacity(acc.len() * sub.len());
                for a in &acc {
                    for s in &sub {
                        let mut t = a.clone();
                        t.extend(s.iter().cloned());
                        next.push(t);
                    }
                }
                acc = next;
            }
            acc
        }
        Query::Not(_) => return Err(Error::Invalid("DNF requires a negation-free query".into())),
    };
    let mut seen_terms = HashSet::new();
    let mut out = Vec::new();
    for t in terms {
        let mut seen = HashSet::new();
        let t: Vec<Atom> = t.into_iter().filter(|a| seen.insert(a.clone())).collect();
        if seen_terms.insert(t.clone()) {
            out.push(t);
        }
    }
    Ok(out)
}

/// DNF as a query: an `Or` of `And` terms, with singleton levels collapsed.
pub fn to_dnf(q: &Query, cap: usize) -> Result<Query> {
    let n = q.universe().unwrap_or(0);
    let terms = dnf_terms(q, cap)?;
    Ok(Query::or_of(terms.into_iter().map(|t| Query::and_of(t.into_iter().map(Query::Atom).collect(), n)).collect(), n))
}
