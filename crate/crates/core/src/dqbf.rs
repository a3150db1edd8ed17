//! Dependency quantified Boolean formulas in S-form: parsing, brute-force
//! satisfiability over Skolem functions, and the reduction to a stochastic
//! game with a positive query over AS◇ and NZ◇ atoms.
//!
//! File format (statements separated by `;` or newlines):
//!
//! ```text
//! forall x1 x2
//! exists y1 deps {x1}
//! exists y2 deps {}
//! matrix (x1 & y1) | (!x1 & !y1)
//! ```

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::game::{GameBuilder, Owner, Prob, StochasticGame};
use crate::query::{Atom, Query};
use crate::set::StateSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// Universal variable by index.
    X(usize),
    /// Existential variable by index.
    Y(usize),
}

/// Propositional matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    Var(Var),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    pub fn eval(&self, value: &impl Fn(Var) -> bool) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Var(v) => value(*v),
            Prop::Not(p) => !p.eval(value),
            Prop::And(ps) => ps.iter().all(|p| p.eval(value)),
            Prop::Or(ps) => ps.iter().any(|p| p.eval(value)),
        }
    }

    /// Negation normal form: negations only on variables.
    pub fn nnf(&self) -> Prop {
        self.push_not(false)
    }

    fn push_not(&self, neg: bool) -> Prop {
        match self {
            Prop::Const(b) => Prop::Const(b ^ neg),
            Prop::Var(v) if neg => Prop::Not(Box::new(Prop::Var(*v))),
            Prop::Var(v) => Prop::Var(*v),
            Prop::Not(p) => p.push_not(!neg),
            Prop::And(ps) if neg => Prop::Or(ps.iter().map(|p| p.push_not(true)).collect()),
            Prop::And(ps) => Prop::And(ps.iter().map(|p| p.push_not(false)).collect()),
            Prop::Or(ps) if neg => Prop::And(ps.iter().map(|p| p.push_not(true)).collect()),
            Prop::Or(ps) => Prop::Or(ps.iter().map(|p| p.push_not(false)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DqbfFormula {
    pub universals: Vec<String>,
    pub existentials: Vec<String>,
    /// Dependency set of each existential, as ascending universal indices.
    pub deps: Vec<Vec<usize>>,
    pub matrix: Prop,
}

impl DqbfFormula {
    pub fn n(&self) -> usize {
        self.universals.len()
    }

    pub fn m(&self) -> usize {
        self.existentials.len()
    }

    pub fn var_name(&self, v: Var) -> &str {
        match v {
            Var::X(i) => &self.universals[i],
            Var::Y(j) => &self.existentials[j],
        }
    }
}

impl fmt::Display for DqbfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.universals.is_empty() {
            writeln!(f, "forall {}", self.universals.join(" "))?;
        }
        for (j, y) in self.existentials.iter().enumerate() {
            let deps: Vec<&str> = self.deps[j].iter().map(|&i| self.universals[i].as_str()).collect();
            writeln!(f, "exists {y} deps {{{}}}", deps.join(", "))?;
        }
        writeln!(f, "matrix {}", self.prop_text(&self.matrix, 0))
    }
}

impl DqbfFormula {
    fn prop_text(&self, p: &Prop, outer: u8) -> String {
        let (text, prec) = match p {
            Prop::Const(b) => (b.to_string(), 3),
            Prop::Var(v) => (self.var_name(*v).to_string(), 3),
            Prop::Not(q) => (format!("!{}", self.prop_text(q, 3)), 3),
            Prop::And(ps) if ps.is_empty() => ("true".into(), 3),
            Prop::Or(ps) if ps.is_empty() => ("false".into(), 3),
            Prop::And(ps) => (ps.iter().map(|q| self.prop_text(q, 2)).collect::<Vec<_>>().join(" & "), 2),
            Prop::Or(ps) => (ps.iter().map(|q| self.prop_text(q, 1)).collect::<Vec<_>>().join(" | "), 1),
        };
        if prec < outer {
            format!("({text})")
        } else {
            text
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Sym(char),
}

fn tokenize(text: &str, line: usize) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if "&|!(),{}".contains(c) {
            out.push(Tok::Sym(c));
            chars.next();
        } else if c.is_alphanumeric() || c == '_' {
            let mut w = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' {
                    w.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Tok::Word(w));
        } else {
            return Err(Error::parse(line, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct PropParser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a HashMap<String, Var>,
    line: usize,
}

impl PropParser<'_> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, msg.into())
    }

    fn eat(&mut self, c: char) -> bool {
        if self.toks.get(self.pos) == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Prop> {
        let mut parts = vec![self.and()?];
        while self.eat('|') {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Prop::Or(parts) })
    }

    fn and(&mut self) -> Result<Prop> {
        let mut parts = vec![self.unary()?];
        while self.eat('&') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Prop::And(parts) })
    }

    fn unary(&mut self) -> Result<Prop> {
        if self.eat('!') {
            return Ok(Prop::Not(Box::new(self.unary()?)));
        }
        if self.eat('(') {
            let p = self.or()?;
            if !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(p);
        }
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Word(w)) => {
                self.pos += 1;
                match w.as_str() {
                    "true" => Ok(Prop::Const(true)),
                    "false" => Ok(Prop::Const(false)),
                    _ => self
                        .vars
                        .get(&w)
                        .map(|&v| Prop::Var(v))
                        .ok_or_else(|| self.err(format!("unknown variable `{w}`"))),
                }
            }
            Some(Tok::Sym(c)) => Err(self.err(format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end of matrix")),
        }
    }
}

pub fn parse_dqbf(text: &str) -> Result<DqbfFormula> {
    let mut universals: Vec<String> = Vec::new();
    let mut existentials: Vec<String> = Vec::new();
    let mut dep_names: Vec<(usize, Vec<String>)> = Vec::new();
    let mut matrix: Option<(usize, String)> = None;
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut declare = |name: &str, line: usize| -> Result<()> {
        if name == "true" || name == "false" {
            return Err(Error::parse(line, format!("`{name}` is reserved")));
        }
        if let Some(first) = seen.insert(name.to_string(), line) {
            return Err(Error::parse(line, format!("variable `{name}` already declared on line {first}")));
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        for stmt in body.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            let (head, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
            match head {
                "forall" => {
                    for x in rest.split_whitespace() {
                        declare(x, line)?;
                        universals.push(x.to_string());
                    }
                }
                "exists" => {
                    let toks = tokenize(rest, line)?;
                    let name = match toks.first() {
                        Some(Tok::Word(w)) => w.clone(),
                        _ => return Err(Error::parse(line, "expected `exists <id> deps {<ids>}`")),
                    };
                    declare(&name, line)?;
                    let mut deps = Vec::new();
                    match toks.get(1) {
                        None => {}
                        Some(Tok::Word(w)) if w == "deps" => {
                            if toks.get(2) != Some(&Tok::Sym('{')) || toks.last() != Some(&Tok::Sym('}')) {
                                return Err(Error::parse(line, "expected `deps {<ids>}`"));
                            }
                            for t in &toks[3..toks.len() - 1] {
                                match t {
                                    Tok::Word(w) => deps.push(w.clone()),
                                    Tok::Sym(',') => {}
                                    Tok::Sym(c) => return Err(Error::parse(line, format!("unexpected `{c}`"))),
                                }
                            }
                        }
                        _ => return Err(Error::parse(line, "expected `deps {<ids>}`")),
                    }
                    existentials.push(name);
                    dep_names.push((line, deps));
                }
                "matrix" => {
                    if matrix.is_some() {
                        return Err(Error::parse(line, "duplicate `matrix`"));
                    }
                    matrix = Some((line, rest.to_string()));
                }
                other => return Err(Error::parse(line, format!("unknown statement `{other}`"))),
            }
        }
    }

    let xi: HashMap<&str, usize> = universals.iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect();
    let mut deps = Vec::new();
    for (line, names) in &dep_names {
        let mut d = Vec::new();
        for n in names {
            match xi.get(n.as_str()) {
                Some(&i) => d.push(i),
                None => return Err(Error::parse(*line, format!("dependency on unknown universal `{n}`"))),
            }
        }
        d.sort();
        d.dedup();
        deps.push(d);
    }
    let (mline, mtext) = matrix.ok_or_else(|| Error::parse(text.lines().count().max(1), "missing `matrix`"))?;
    let mut vars: HashMap<String, Var> = HashMap::new();
    for (i, x) in universals.iter().enumerate() {
        vars.insert(x.clone(), Var::X(i));
    }
    for (j, y) in existentials.iter().enumerate() {
        vars.insert(y.clone(), Var::Y(j));
    }
    let mut p = PropParser { toks: tokenize(&mtext, mline)?, pos: 0, vars: &vars, line: mline };
    if p.toks.is_empty() {
        return Err(Error::parse(mline, "empty matrix"));
    }
    let m = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input in matrix"));
    }
    Ok(DqbfFormula { universals, existentials, deps, matrix: m })
}

// ---------------------------------------------------------------------------
// Brute-force satisfiability
// ---------------------------------------------------------------------------

/// Default bound on universals and on existentials.
pub const DEFAULT_VAR_CAP: usize = 4;

/// Skolem functions: for each existential, a truth table indexed by the
/// values of its dependencies (bit `k` of the index is dependency `k`).
pub type Skolem = Vec<u64>;

/// Search all tuples of Skolem functions; returns a satisfying tuple.
pub fn dqbf_skolem(f: &DqbfFormula, var_cap: usize) -> Result<Option<Skolem>> {
    if f.n() > var_cap || f.m() > var_cap {
        return Err(Error::resource("DQBF variables per quantifier", var_cap));
    }
    let sizes: Vec<u32> = f.deps.iter().map(|d| 1u32 << d.len()).collect();
    let mut tables: Skolem = vec![0; f.m()];
    let y_value = |tables: &Skolem, j: usize, x: u64| -> bool {
        let idx = f.deps[j].iter().enumerate().fold(0u64, |a, (k, &i)| a | (((x >> i) & 1) << k));
        (tables[j] >> idx) & 1 == 1
    };
    loop {
        let ok = (0..1u64 << f.n()).all(|x| {
            f.matrix.eval(&|v| match v {
                Var::X(i) => (x >> i) & 1 == 1,
                Var::Y(j) => y_value(&tables, j, x),
            })
        });
        if ok {
            return Ok(Some(tables));
        }
        // Next tuple: each table ranges over 2^(2^|S_j|) values.
        let mut j = 0;
        loop {
            if j == f.m() {
                return Ok(None);
            }
            let limit = if sizes[j] >= 64 { u64::MAX } else { (1u64 << sizes[j]) - 1 };
            if tables[j] < limit {
                tables[j] += 1;
                break;
            }
            tables[j] = 0;
            j += 1;
        }
    }
}

pub fn dqbf_brute_sat(f: &DqbfFormula, var_cap: usize) -> Result<bool> {
    Ok(dqbf_skolem(f, var_cap)?.is_some())
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

/// The reduced game and query, with the target sets per variable.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub game: StochasticGame,
    pub query: Query,
    /// Variable order of each branch.
    pub branches: Vec<Vec<Var>>,
    /// `T_{v,⊤}` and `T_{v,⊥}` for each variable.
    pub targets: HashMap<Var, (StateSet, StateSet)>,
}

/// Module order of branch `j`: universals in `S_j`, then `y_j`, then the
/// other universals, then the other existentials, each ascending.
pub fn branch_order(f: &DqbfFormula, j: usize) -> Vec<Var> {
    let mut order: Vec<Var> = f.deps[j].iter().map(|&i| Var::X(i)).collect();
    order.push(Var::Y(j));
    order.extend((0..f.n()).filter(|i| !f.deps[j].contains(i)).map(Var::X));
    order.extend((0..f.m()).filter(|&i| i != j).map(Var::Y));
    order
}

fn module_names(f: &DqbfFormula, j: usize, v: Var) -> [String; 3] {
    let base = format!("b{}.{}", j + 1, f.var_name(v));
    [base.clone(), format!("{base}.t"), format!("{base}.f")]
}

/// Build the game: a uniform chance root over `m` branches, one
/// chooser module per variable on each branch. Player 1 owns existential
/// choosers and player 2 universal ones. The query is
/// `(φ' ∧ ψ1) ∨ ψ2` where φ' replaces literals by AS◇ atoms, ψ1 asks
/// player 1 to fix each existential almost surely and ψ2 holds if player 2
/// plays some universal both ways.
pub fn reduce_to_game(f: &DqbfFormula) -> Result<Reduction> {
    let m = f.m();
    if m == 0 {
        return Err(Error::Invalid("reduction needs at least one existential variable".into()));
    }
    let mut b = GameBuilder::new("dqbf");
    let root = b.state("root", Owner::Chance)?;
    b.init(root);
    let mut branches = Vec::new();
    for j in 0..m {
        let order = branch_order(f, j);
        for &v in &order {
            let [c, t, fl] = module_names(f, j, v);
            let owner = match v {
                Var::X(_) => Owner::P2,
                Var::Y(_) => Owner::P1,
            };
            b.state(&c, owner)?;
            b.state(&t, Owner::Chance)?;
            b.state(&fl, Owner::Chance)?;
        }
        branches.push(order);
    }
    for (j, order) in branches.iter().enumerate() {
        let first = b.id(&module_names(f, j, order[0])[0]).expect("declared");
        b.prob(root, first, Prob::new(1, m as i64))?;
        for (k, &v) in order.iter().enumerate() {
            let [c, t, fl] = module_names(f, j, v).map(|n| b.id(&n).expect("declared"));
            b.edge(c, t)?;
            b.edge(c, fl)?;
            let next = order.get(k + 1).map(|&w| b.id(&module_names(f, j, w)[0]).expect("declared"));
            for leaf in [t, fl] {
                match next {
                    Some(nx) => b.prob(leaf, nx, Prob::new(1, 1))?,
                    None => b.prob(leaf, leaf, Prob::new(1, 1))?,
                }
            }
        }
    }
    let game = b.build()?;
    let n_states = game.num_states();

    let mut targets = HashMap::new();
    let all_vars = (0..f.n()).map(Var::X).chain((0..m).map(Var::Y));
    for v in all_vars {
        let mut top = game.empty_set();
        let mut bot = game.empty_set();
        for j in 0..m {
            let [_, t, fl] = module_names(f, j, v);
            top.insert(game.state_id(&t).expect("built"));
            bot.insert(game.state_id(&fl).expect("built"));
        }
        targets.insert(v, (top, bot));
    }

    let phi = literal_query(&f.matrix.nnf(), &targets, n_states);
    let psi1 = Query::and_of(
        (0..m)
            .map(|j| {
                let (t, fl) = &targets[&Var::Y(j)];
                Query::or_of(
                    vec![Query::atom(Atom::as_reach(t.clone())), Query::atom(Atom::as_reach(fl.clone()))],
                    n_states,
                )
            })
            .collect(),
        n_states,
    );
    let psi2 = Query::or_of(
        (0..f.n())
            .map(|i| {
                let (t, fl) = &targets[&Var::X(i)];
                Query::and_of(
                    vec![Query::atom(Atom::nz_reach(t.clone())), Query::atom(Atom::nz_reach(fl.clone()))],
                    n_states,
                )
            })
            .collect(),
        n_states,
    );
    // With no universals ψ2 is the empty disjunction and is left out.
    let mut parts = vec![Query::and_of(vec![phi, psi1], n_states)];
    if f.n() > 0 {
        parts.push(psi2);
    }
    let query = Query::or_of(parts, n_states);
    Ok(Reduction { game, query, branches, targets })
}

fn literal_query(p: &Prop, targets: &HashMap<Var, (StateSet, StateSet)>, n: usize) -> Query {
    match p {
        Prop::Const(true) => Query::truth(n),
        Prop::Const(false) => Query::falsity(n),
        Prop::Var(v) => Query::atom(Atom::as_reach(targets[v].0.clone())),
        Prop::Not(inner) => match inner.as_ref() {
            Prop::Var(v) => Query::atom(Atom::as_reach(targets[v].1.clone())),
            _ => unreachable!("matrix is in negation normal form"),
        },
        Prop::And(ps) => Query::and_of(ps.iter().map(|q| literal_query(q, targets, n)).collect(), n),
        Prop::Or(ps) => Query::or_of(ps.iter().map(|q| literal_query(q, targets, n)).collect(), n),
    }
}

/// Structural check of a reduction: the root branches uniformly, each
/// branch visits one ⊤/⊥ pair per variable in its declared order, and every
/// play ends in a terminal self-loop.
pub fn check_reduction(f: &DqbfFormula, r: &Reduction) -> Result<()> {
    let g = &r.game;
    let m = f.m();
    let expected = 1 + 3 * m * (f.n() + m);
    if g.num_states() != expected {
        return Err(Error::Invariant(format!("{} states, expected {expected}", g.num_states())));
    }
    let root = g.init();
    if g.owner(root) != Owner::Chance || g.successors(root).len() != m {
        return Err(Error::Invariant("root is not a chance state over the branches".into()));
    }
    for (j, order) in r.branches.iter().enumerate() {
        let mut cur = g.state_id(&module_names(f, j, order[0])[0]).expect("built");
        if g.probability(root, cur) != Prob::new(1, m as i64) {
            return Err(Error::Invariant(format!("branch {} is not entered with probability 1/{m}", j + 1)));
        }
        for (k, &v) in order.iter().enumerate() {
            let [c, t, fl] = module_names(f, j, v).map(|n| g.state_id(&n).expect("built"));
            let (top, bot) = &r.targets[&v];
            if cur != c || g.successors(c) != sorted(&[t, fl]) || !top.contains(t) || !bot.contains(fl) {
                return Err(Error::Invariant(format!("module {} of branch {} is miswired", k + 1, j + 1)));
            }
            let next = match order.get(k + 1) {
                Some(&w) => g.state_id(&module_names(f, j, w)[0]).expect("built"),
                None => {
                    if g.successors(t) != [t] || g.successors(fl) != [fl] {
                        return Err(Error::Invariant(format!("branch {} does not end in terminals", j + 1)));
                    }
                    break;
                }
            };
            if g.successors(t) != [next] || g.successors(fl) != [next] {
                return Err(Error::Invariant(format!("module {} of branch {} does not funnel", k + 1, j + 1)));
            }
            cur = next;
        }
    }
    Ok(())
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Curated matrices over at most four literals, using `x1 x2 y1 y2`.
pub const MATRIX_FAMILY: [&str; 20] = [
    "y1",
    "!y1",
    "(x1 & y1) | (!x1 & !y1)",
    "(x1 | y1) & (!x1 | !y1)",
    "x1 & y1",
    "x1 | y1",
    "(x2 & y1) | (!x2 & !y1)",
    "(x2 | y1) & (!x2 | !y1)",
    "y1 & y2",
    "(y1 | y2) & (!y1 | !y2)",
    "(x1 & y2) | (!x1 & !y2)",
    "(x2 & y2) | (!x2 & !y2)",
    "!x1 | !x2 | y1",
    "(x1 | y1) & (x2 | y2)",
    "(x1 & y1) | (x2 & y2)",
    "(y1 | y2) & (!x1 | !y2)",
    "(x1 & !y1) | (x2 & y1)",
    "y1 & !y1",
    "x1 | !x1",
    "(y1 | x1) & (y2 | !x1)",
];

/// Every S-form formula with `n` universals `x1..xn`, `m` existentials
/// `y1..ym` and the given matrix, one per choice of dependency sets.
/// Matrices mentioning undeclared variables yield nothing.
pub fn s_form_family(n: usize, m: usize, matrix: &str) -> Vec<DqbfFormula> {
    let mut out = Vec::new();
    let subsets = 1usize << n;
    for combo in 0..subsets.pow(m as u32) {
        let mut text = String::new();
        if n > 0 {
            text.push_str(&format!("forall {}\n", (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(" ")));
        }
        let mut c = combo;
        for j in 1..=m {
            let s = c % subsets;
            c /= subsets;
            let deps: Vec<String> = (0..n).filter(|i| s & (1 << i) != 0).map(|i| format!("x{}", i + 1)).collect();
            text.push_str(&format!("exists y{j} deps {{{}}}\n", deps.join(", ")));
        }
        text.push_str(&format!("matrix {matrix}\n"));
        match parse_dqbf(&text) {
            Ok(f) => out.push(f),
            Err(_) => return Vec::new(),
        }
    }
    out
}
