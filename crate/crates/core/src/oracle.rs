//! Brute-force ground truth: search over finite classes of strategies for a
//! winner of a query, within the class.
//!
//! A class is a memory structure plus, optionally, randomization. Randomized
//! classes play the uniform distribution over a chosen nonempty support;
//! since qualitative objectives only depend on supports, this covers every
//! randomized strategy with that memory structure. Strategies are built
//! lazily: only decisions actually met in some induced chain are assigned.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::chain::{build_chain, explore_chain, OpenPoint, SupportGraph};
use crate::error::{Error, Result};
use crate::game::{Owner, Prob, StateId, StochasticGame};
use crate::query::{negate_normalize, Atom, Query};
use crate::set::StateSet;
use crate::strategy::{Mem, Memory, Point, Policy, Step, Strategy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MemoryKind {
    Memoryless,
    /// Remembers which of the given target sets have been visited.
    TargetSets(Vec<StateSet>),
    /// Remembers the set of visited states.
    VisitedSet,
    /// `k` memory states with an arbitrary deterministic update table.
    Explicit(usize),
}

impl MemoryKind {
    pub fn label(&self) -> String {
        match self {
            MemoryKind::Memoryless => "memoryless".into(),
            MemoryKind::TargetSets(_) => "target-set".into(),
            MemoryKind::VisitedSet => "visited-set".into(),
            MemoryKind::Explicit(k) => format!("explicit:{k}"),
        }
    }

    fn memory(&self, g: &StochasticGame) -> Result<Memory> {
        let m = match self {
            MemoryKind::Memoryless => Memory::Memoryless,
            MemoryKind::TargetSets(ts) => Memory::TargetSets(ts.clone()),
            MemoryKind::VisitedSet => Memory::VisitedSet,
            MemoryKind::Explicit(k) => {
                Memory::Table { names: (0..*k).map(|i| format!("m{i}")).collect(), init: 0, update: HashMap::new() }
            }
        };
        m.check(g)?;
        Ok(m)
    }
}

impl fmt::Display for MemoryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The distinct targets of a query's atoms, in order of first appearance;
/// the natural target-set memory for that query.
pub fn query_targets(q: &Query) -> Vec<StateSet> {
    let mut out: Vec<StateSet> = Vec::new();
    for a in q.atoms() {
        if !out.contains(&a.target) {
            out.push(a.target.clone());
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyClass {
    pub player: Owner,
    pub kind: MemoryKind,
    pub randomized: bool,
}

impl StrategyClass {
    pub fn new(player: Owner, kind: MemoryKind, randomized: bool) -> Self {
        assert!(player != Owner::Chance);
        StrategyClass { player, kind, randomized }
    }
}

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Maximum number of induced chains evaluated by one search.
    pub eval_budget: usize,
    /// Maximum size of one induced chain.
    pub chain_cap: usize,
    /// Largest strategy class enumerated in full (matrices, listings).
    pub class_cap: usize,
    /// Maximum number of base states.
    pub max_states: usize,
    /// Maximum number of target sets in target-set memory.
    pub max_targets: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { eval_budget: 5_000_000, chain_cap: 1 << 16, class_cap: 4096, max_states: 8, max_targets: 8 }
    }
}

/// Option `o` at an output point: the support as a bitmask over the
/// successor list. Deterministic classes only use singletons.
fn output_options(n_succ: usize, randomized: bool) -> Vec<u32> {
    if randomized {
        let mut v: Vec<u32> = (1..(1u32 << n_succ)).collect();
        v.sort_by_key(|m| (m.count_ones(), *m));
        v
    } else {
        (0..n_succ).map(|i| 1 << i).collect()
    }
}

type Assignment = HashMap<Point, u32>;

/// A class member under construction.
struct Partial<'a> {
    g: &'a StochasticGame,
    class: &'a StrategyClass,
    memory: &'a Memory,
    options: &'a HashMap<usize, Vec<u32>>,
    choice: &'a Assignment,
}

impl Partial<'_> {
    fn support_of(&self, s: StateId, option: u32) -> Vec<StateId> {
        let mask = self.options[&self.g.successors(s).len()][option as usize];
        self.g.successors(s).iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &t)| t).collect()
    }
}

fn uniform(support: &[StateId]) -> Vec<(StateId, Prob)> {
    let p = Prob::new(1, support.len() as i64);
    support.iter().map(|&t| (t, p)).collect()
}

impl Policy for Partial<'_> {
    fn player(&self) -> Owner {
        self.class.player
    }

    fn init_mem(&self) -> Mem {
        0
    }

    fn update(&self, _g: &StochasticGame, m: Mem, s: StateId) -> Step<Mem> {
        match self.class.kind {
            MemoryKind::Explicit(_) => {
                let point = Point::Update { mem: m, state: s };
                match self.choice.get(&point) {
                    Some(&o) => Step::Known(o as Mem),
                    None => Step::Open(point),
                }
            }
            _ => Step::Known(self.memory.update(m, s)),
        }
    }

    fn play(&self, _g: &StochasticGame, m: Mem, s: StateId) -> Step<Vec<(StateId, Prob)>> {
        if self.g.successors(s).len() == 1 {
            return Step::Known(vec![(self.g.successors(s)[0], Prob::one())]);
        }
        let point = Point::Output { mem: m, state: s };
        match self.choice.get(&point) {
            Some(&o) => Step::Known(uniform(&self.support_of(s, o))),
            None => Step::Open(point),
        }
    }
}

/// One side of an evaluation: a fixed strategy or a partial class member.
enum Side<'a> {
    Fixed(&'a Strategy),
    Partial(Partial<'a>),
}

impl Policy for Side<'_> {
    fn player(&self) -> Owner {
        match self {
            Side::Fixed(s) => s.player,
            Side::Partial(p) => p.player(),
        }
    }

    fn init_mem(&self) -> Mem {
        match self {
            Side::Fixed(s) => s.init_mem(),
            Side::Partial(p) => p.init_mem(),
        }
    }

    fn update(&self, g: &StochasticGame, m: Mem, s: StateId) -> Step<Mem> {
        match self {
            Side::Fixed(x) => x.update(g, m, s),
            Side::Partial(p) => p.update(g, m, s),
        }
    }

    fn play(&self, g: &StochasticGame, m: Mem, s: StateId) -> Step<Vec<(StateId, Prob)>> {
        match self {
            Side::Fixed(x) => x.play(g, m, s),
            Side::Partial(p) => p.play(g, m, s),
        }
    }
}

/// Prepared data for one class on one game.
struct ClassData {
    class: StrategyClass,
    memory: Memory,
    options: HashMap<usize, Vec<u32>>,
}

impl ClassData {
    fn new(g: &StochasticGame, class: &StrategyClass) -> Result<ClassData> {
        let memory = class.kind.memory(g)?;
        let mut options = HashMap::new();
        for s in g.states() {
            let n = g.successors(s).len();
            if n > 16 {
                return Err(Error::resource("successors of one state", 16));
            }
            options.entry(n).or_insert_with(|| output_options(n, class.randomized));
        }
        Ok(ClassData { class: class.clone(), memory, options })
    }

    fn partial<'a>(&'a self, g: &'a StochasticGame, choice: &'a Assignment) -> Partial<'a> {
        Partial { g, class: &self.class, memory: &self.memory, options: &self.options, choice }
    }

    fn option_count(&self, g: &StochasticGame, p: Point) -> u32 {
        match p {
            Point::Output { state, .. } => self.options[&g.successors(state).len()].len() as u32,
            Point::Update { .. } => match self.class.kind {
                MemoryKind::Explicit(k) => k as u32,
                _ => 1,
            },
        }
    }

    /// Turn an assignment into a strategy; unassigned decisions take their
    /// first option.
    fn to_strategy(&self, g: &StochasticGame, choice: &Assignment) -> Strategy {
        let mut memory = self.memory.clone();
        if let Memory::Table { update, .. } = &mut memory {
            for (p, &o) in choice {
                if let Point::Update { mem, state } = *p {
                    update.insert((mem as usize, state), o as usize);
                }
            }
        }
        let mut st = Strategy::new(self.class.player, memory);
        let partial = self.partial(g, choice);
        let mut points: Vec<(&Point, &u32)> = choice.iter().collect();
        points.sort();
        for (p, &o) in points {
            if let Point::Output { mem, state } = *p {
                st.set_uniform(mem, state, &partial.support_of(state, o));
            }
        }
        st
    }
}

#[derive(Debug)]
enum Eval {
    Done(bool),
    Open(OpenPoint),
}

enum Spoil {
    Found(Assignment),
    NeedsMe(Point),
    None,
}

/// Lazy search for a strategy of one player (`me`) that wins against every
/// member of the opponent's class.
struct Search<'a> {
    g: &'a StochasticGame,
    q: &'a Query,
    me: Owner,
    my: Option<&'a ClassData>,
    other: &'a ClassData,
    config: &'a OracleConfig,
    spent: usize,
    killers: Vec<Assignment>,
}

const KILLERS: usize = 32;

impl Search<'_> {
    fn eval(&mut self, mine: &Side, theirs: &Side) -> Result<Eval> {
        self.spent += 1;
        if self.spent > self.config.eval_budget {
            return Err(Error::resource("oracle strategy-pair evaluations", self.config.eval_budget));
        }
        let chain = if self.me == Owner::P1 {
            explore_chain(self.g, mine, theirs, self.config.chain_cap)?
        } else {
            explore_chain(self.g, theirs, mine, self.config.chain_cap)?
        };
        Ok(match chain.decide(self.q, self.me.swapped()) {
            Ok(holds) => Eval::Done(if self.me == Owner::P1 { holds } else { !holds }),
            Err(open) => Eval::Open(open),
        })
    }

    /// Look for an opponent member that defeats every completion of `mine`.
    fn spoiler(&mut self, mine: &Side) -> Result<Spoil> {
        let killers = std::mem::take(&mut self.killers);
        let mut hit = None;
        for (i, k) in killers.iter().enumerate() {
            let theirs = Side::Partial(self.other.partial(self.g, k));
            if let Eval::Done(false) = self.eval(mine, &theirs)? {
                hit = Some(i);
                break;
            }
        }
        self.killers = killers;
        if let Some(i) = hit {
            let k = self.killers.remove(i);
            self.killers.insert(0, k.clone());
            return Ok(Spoil::Found(k));
        }
        let mut needs = None;
        let mut theirs = Assignment::new();
        if self.spoil_dfs(mine, &mut theirs, &mut needs)? {
            self.killers.insert(0, theirs.clone());
            self.killers.truncate(KILLERS);
            return Ok(Spoil::Found(theirs));
        }
        Ok(match needs {
            Some(p) => Spoil::NeedsMe(p),
            None => Spoil::None,
        })
    }

    fn spoil_dfs(&mut self, mine: &Side, theirs: &mut Assignment, needs: &mut Option<Point>) -> Result<bool> {
        let e = {
            let t = Side::Partial(self.other.partial(self.g, theirs));
            self.eval(mine, &t)?
        };
        match e {
            Eval::Done(won) => Ok(!won),
            Eval::Open(open) if open.player == self.me => {
                if needs.is_none() {
                    *needs = Some(open.point);
                }
                Ok(false)
            }
            Eval::Open(open) => {
                for o in 0..self.other.option_count(self.g, open.point) {
                    theirs.insert(open.point, o);
                    if self.spoil_dfs(mine, theirs, needs)? {
                        return Ok(true);
                    }
                }
                theirs.remove(&open.point);
                Ok(false)
            }
        }
    }

    fn find_winner(&mut self, mine: &mut Assignment) -> Result<bool> {
        let my = self.my.expect("searching player has a class");
        let spoil = {
            let side = Side::Partial(my.partial(self.g, mine));
            self.spoiler(&side)?
        };
        match spoil {
            Spoil::None => Ok(true),
            Spoil::Found(_) => Ok(false),
            Spoil::NeedsMe(p) => {
                for o in 0..my.option_count(self.g, p) {
                    mine.insert(p, o);
                    if self.find_winner(mine)? {
                        return Ok(true);
                    }
                }
                mine.remove(&p);
                Ok(false)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Player1WinsInClass,
    Player2WinsInClass,
    NoWinnerInClass,
}

/// Satisfaction of the query for every pair of class members.
#[derive(Debug, Clone)]
pub struct Matrix {
    pub rows: Vec<Strategy>,
    pub cols: Vec<Strategy>,
    pub holds: Vec<Vec<bool>>,
}

#[derive(Debug, Clone)]
pub struct OracleVerdict {
    pub outcome: Outcome,
    /// A winning strategy of the winning player, if there is one.
    pub witness: Option<Strategy>,
    /// The full satisfaction matrix, when nobody wins and both classes are
    /// small enough to list.
    pub matrix: Option<Matrix>,
    pub evaluations: usize,
}

fn check_size(g: &StochasticGame, classes: &[&StrategyClass], config: &OracleConfig) -> Result<()> {
    if g.num_states() > config.max_states {
        return Err(Error::resource("oracle game states", config.max_states));
    }
    for c in classes {
        if let MemoryKind::TargetSets(ts) = &c.kind {
            if ts.len() > config.max_targets {
                return Err(Error::resource("target sets in target-set memory", config.max_targets));
            }
        }
    }
    Ok(())
}

fn search<'a>(
    g: &'a StochasticGame,
    q: &'a Query,
    me: Owner,
    my: Option<&'a ClassData>,
    other: &'a ClassData,
    config: &'a OracleConfig,
) -> Search<'a> {
    Search { g, q, me, my, other, config, spent: 0, killers: Vec::new() }
}

/// Search `class` for a strategy of its player that wins `q` (player 1) or
/// `!q` (player 2) against every member of `against`.
pub fn find_winning_strategy(
    g: &StochasticGame,
    q: &Query,
    class: &StrategyClass,
    against: &StrategyClass,
    config: &OracleConfig,
) -> Result<(Option<Strategy>, usize)> {
    check_size(g, &[class, against], config)?;
    let q = negate_normalize(q);
    let my = ClassData::new(g, class)?;
    let other = ClassData::new(g, against)?;
    let mut s = search(g, &q, class.player, Some(&my), &other, config);
    let mut mine = Assignment::new();
    let found = s.find_winner(&mut mine)?;
    Ok((found.then(|| my.to_strategy(g, &mine)), s.spent))
}

/// Search the opponent class for a strategy defeating the fixed `sigma`.
/// Returns the spoiler if one exists.
pub fn find_spoiler(
    g: &StochasticGame,
    q: &Query,
    sigma: &Strategy,
    against: &StrategyClass,
    config: &OracleConfig,
) -> Result<(Option<Strategy>, usize)> {
    check_size(g, &[against], config)?;
    sigma.validate(g)?;
    let q = negate_normalize(q);
    let other = ClassData::new(g, against)?;
    let mut s = search(g, &q, sigma.player, None, &other, config);
    let side = Side::Fixed(sigma);
    match s.spoiler(&side)? {
        Spoil::Found(a) => Ok((Some(other.to_strategy(g, &a)), s.spent)),
        Spoil::None => Ok((None, s.spent)),
        Spoil::NeedsMe(_) => Err(Error::Invariant("fixed strategy reported an open decision".into())),
    }
}

/// Decide, within the given classes, whether player 1 has a strategy winning
/// `q`, player 2 has one winning `!q`, or neither.
pub fn brute_force_winner(
    g: &StochasticGame,
    q: &Query,
    class1: &StrategyClass,
    class2: &StrategyClass,
    config: &OracleConfig,
) -> Result<OracleVerdict> {
    assert_eq!(class1.player, Owner::P1);
    assert_eq!(class2.player, Owner::P2);
    let (w1, n1) = find_winning_strategy(g, q, class1, class2, config)?;
    if let Some(w) = w1 {
        return Ok(OracleVerdict {
            outcome: Outcome::Player1WinsInClass,
            witness: Some(w),
            matrix: None,
            evaluations: n1,
        });
    }
    let (w2, n2) = find_winning_strategy(g, q, class2, class1, config)?;
    if let Some(w) = w2 {
        return Ok(OracleVerdict {
            outcome: Outcome::Player2WinsInClass,
            witness: Some(w),
            matrix: None,
            evaluations: n1 + n2,
        });
    }
    let matrix = satisfaction_matrix(g, q, class1, class2, config).ok();
    Ok(OracleVerdict { outcome: Outcome::NoWinnerInClass, witness: None, matrix, evaluations: n1 + n2 })
}

/// Whether player 1 wins `q` from the initial state within `class1` against
/// `class2`. Cheaper than [`brute_force_winner`] when only player 1 matters.
pub fn player1_wins(
    g: &StochasticGame,
    q: &Query,
    class1: &StrategyClass,
    class2: &StrategyClass,
    config: &OracleConfig,
) -> Result<bool> {
    Ok(find_winning_strategy(g, q, class1, class2, config)?.0.is_some())
}

/// Decision points of a class: reachable `(memory, state)` pairs at owned
/// states with a choice, and, for explicit memory, every update entry.
fn class_points(g: &StochasticGame, data: &ClassData) -> Vec<Point> {
    let player = data.class.player;
    let mut points = Vec::new();
    match data.class.kind {
        MemoryKind::Explicit(k) => {
            for m in 0..k as Mem {
                for s in g.states() {
                    points.push(Point::Update { mem: m, state: s });
                    if g.owner(s) == player && g.successors(s).len() > 1 {
                        points.push(Point::Output { mem: m, state: s });
                    }
                }
            }
        }
        _ => {
            let start = (g.init(), 0 as Mem);
            let mut seen = HashSet::from([start]);
            let mut stack = vec![start];
            while let Some((s, m)) = stack.pop() {
                if g.owner(s) == player && g.successors(s).len() > 1 {
                    points.push(Point::Output { mem: m, state: s });
                }
                let m2 = data.memory.update(m, s);
                for &t in g.successors(s) {
                    if seen.insert((t, m2)) {
                        stack.push((t, m2));
                    }
                }
            }
        }
    }
    points.sort();
    points
}

fn enumerate_assignments(g: &StochasticGame, data: &ClassData, cap: usize) -> Result<Vec<Assignment>> {
    let points = class_points(g, data);
    let counts: Vec<u32> = points.iter().map(|&p| data.option_count(g, p)).collect();
    let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c as usize).filter(|&t| t <= cap));
    if total.is_none() {
        return Err(Error::resource("strategies in class", cap));
    }
    let mut out = Vec::new();
    let mut digits = vec![0u32; points.len()];
    loop {
        out.push(points.iter().copied().zip(digits.iter().copied()).collect());
        // Mixed-radix increment, last point fastest.
        let mut i = points.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < counts[i] {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Every member of a class in canonical order. Deterministic classes have
/// `∏ |succ(s)|` members over the reachable decision points.
pub fn enumerate_strategies(g: &StochasticGame, class: &StrategyClass, cap: usize) -> Result<Vec<Strategy>> {
    let data = ClassData::new(g, class)?;
    Ok(enumerate_assignments(g, &data, cap)?.iter().map(|a| data.to_strategy(g, a)).collect())
}

/// Satisfaction of `q` for every pair of class members.
pub fn satisfaction_matrix(
    g: &StochasticGame,
    q: &Query,
    class1: &StrategyClass,
    class2: &StrategyClass,
    config: &OracleConfig,
) -> Result<Matrix> {
    check_size(g, &[class1, class2], config)?;
    let q = negate_normalize(q);
    let d1 = ClassData::new(g, class1)?;
    let d2 = ClassData::new(g, class2)?;
    let rows = enumerate_assignments(g, &d1, config.class_cap)?;
    let cols = enumerate_assignments(g, &d2, config.class_cap)?;
    if rows.len() * cols.len() > config.class_cap * 16 {
        return Err(Error::resource("satisfaction matrix entries", config.class_cap * 16));
    }
    let mut holds = Vec::with_capacity(rows.len());
    for r in &rows {
        let mut line = Vec::with_capacity(cols.len());
        for c in &cols {
            let chain = build_chain(g, &d1.partial(g, r), &d2.partial(g, c), config.chain_cap)?
                .map_err(|open| Error::Invariant(format!("complete strategy left {:?} open", open.point)))?;
            line.push(chain.eval(&q));
        }
        holds.push(line);
    }
    Ok(Matrix {
        rows: rows.iter().map(|a| d1.to_strategy(g, a)).collect(),
        cols: cols.iter().map(|a| d2.to_strategy(g, a)).collect(),
        holds,
    })
}

/// Oracle verdicts for increasingly rich memory classes (memoryless, the
/// query's target sets, visited sets), both players randomized. The result
/// is evidence within the enumerated classes only.
pub fn nondeterminacy_evidence(
    g: &StochasticGame,
    q: &Query,
    config: &OracleConfig,
) -> Result<Vec<(MemoryKind, OracleVerdict)>> {
    let q = negate_normalize(q);
    let kinds = [MemoryKind::Memoryless, MemoryKind::TargetSets(query_targets(&q)), MemoryKind::VisitedSet];
    kinds
        .into_iter()
        .map(|k| {
            let c1 = StrategyClass::new(Owner::P1, k.clone(), true);
            let c2 = StrategyClass::new(Owner::P2, k.clone(), true);
            Ok((k, brute_force_winner(g, &q, &c1, &c2, config)?))
        })
        .collect()
}

/// States from which player 1 wins `atom` when both players are restricted
/// to deterministic memoryless strategies, by exhaustive enumeration.
pub fn memoryless_winning_states(g: &StochasticGame, atom: &Atom) -> Result<StateSet> {
    let owned = |o: Owner| -> Vec<StateId> { g.owned_by(o).filter(|&s| g.successors(s).len() > 1).collect() };
    let choices = |states: &[StateId]| -> Vec<BTreeMap<StateId, StateId>> {
        let mut all = vec![BTreeMap::new()];
        for &s in states {
            let mut next = Vec::new();
            for m in &all {
                for &t in g.successors(s) {
                    let mut m2 = m.clone();
                    m2.insert(s, t);
                    next.push(m2);
                }
            }
            all = next;
        }
        all
    };
    let to_strategy = |player: Owner, m: &BTreeMap<StateId, StateId>| {
        let mut st = Strategy::new(player, Memory::Memoryless);
        for (&s, &t) in m {
            st.set_dirac(0, s, t);
        }
        st
    };
    let sigmas: Vec<Strategy> = choices(&owned(Owner::P1)).iter().map(|m| to_strategy(Owner::P1, m)).collect();
    let taus: Vec<Strategy> = choices(&owned(Owner::P2)).iter().map(|m| to_strategy(Owner::P2, m)).collect();
    let mut win = g.empty_set();
    for s in g.states() {
        let h = g.with_init(s);
        let mut wins = false;
        for sigma in &sigmas {
            let mut all = true;
            for tau in &taus {
                let chain = crate::chain::induced_chain(&h, sigma, tau, 1 << 12)?;
                if !chain.eval_atom(atom) {
                    all = false;
                    break;
                }
            }
            if all {
                wins = true;
                break;
            }
        }
        if wins {
            win.insert(s);
        }
    }
    Ok(win)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;
    use crate::query::parse_query;

    fn fig1() -> StochasticGame {
        parse_game(
            "state s0 p1; state s1 p2; state s2 chance; state s3 chance; state s4 chance
             init s0; edge s0 s1; edge s0 s2; edge s1 s3; edge s1 s4",
        )
        .unwrap()
    }

    fn class(p: Owner, k: MemoryKind, r: bool) -> StrategyClass {
        StrategyClass::new(p, k, r)
    }

    #[test]
    fn enumerates_memoryless_fig1() {
        let g = fig1();
        let c = class(Owner::P1, MemoryKind::Memoryless, false);
        assert_eq!(enumerate_strategies(&g, &c, 100).unwrap().len(), 2);
        let c = class(Owner::P2, MemoryKind::Memoryless, false);
        assert_eq!(enumerate_strategies(&g, &c, 100).unwrap().len(), 2);
        let c = class(Owner::P2, MemoryKind::Memoryless, true);
        assert_eq!(enumerate_strategies(&g, &c, 100).unwrap().len(), 3);
        let one = parse_game("state a p1; state b chance; init a; edge a b").unwrap();
        let c = class(Owner::P1, MemoryKind::Memoryless, false);
        assert_eq!(enumerate_strategies(&one, &c, 100).unwrap().len(), 1);
    }

    #[test]
    fn nz_conjunction_is_lost_on_fig1() {
        let g = fig1();
        let q = parse_query("NZ F {s2} & NZ F {s4}", &g).unwrap();
        let v = brute_force_winner(
            &g,
            &q,
            &class(Owner::P1, MemoryKind::Memoryless, false),
            &class(Owner::P2, MemoryKind::Memoryless, false),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(v.outcome, Outcome::Player2WinsInClass);
        let tau = v.witness.unwrap();
        assert_eq!(tau.support(&g, 0, 1), vec![g.state_id("s3").unwrap()]);
    }

    #[test]
    fn trivial_query_is_won() {
        let g = fig1();
        let q = Query::truth(g.num_states());
        let v = brute_force_winner(
            &g,
            &q,
            &class(Owner::P1, MemoryKind::VisitedSet, true),
            &class(Owner::P2, MemoryKind::VisitedSet, true),
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(v.outcome, Outcome::Player1WinsInClass);
    }

    #[test]
    fn memoryless_regions_on_fig1() {
        let g = fig1();
        let a = Atom::nz_reach(g.set_of(&["s2"]).unwrap());
        assert_eq!(memoryless_winning_states(&g, &a).unwrap(), g.set_of(&["s0", "s2"]).unwrap());
        let a = Atom::as_reach(g.set_of(&["s3"]).unwrap());
        assert_eq!(memoryless_winning_states(&g, &a).unwrap(), g.set_of(&["s3"]).unwrap());
    }
}
