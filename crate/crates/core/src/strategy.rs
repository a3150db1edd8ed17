//! Finite-memory randomized strategies.
//!
//! Memory is updated when the play *leaves* a state: in a history
//! `s_0 ... s_k` the memory at `s_k` is `upd(...upd(m_0, s_0)..., s_{k-1})`,
//! and the strategy's move at `s_k` depends on that memory and `s_k`. With
//! visited-set memory the memory at `s_k` is therefore exactly the set of
//! states visited before `s_k`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{Owner, Prob, StateId, StochasticGame};
use crate::set::StateSet;

/// Memory value. Its meaning depends on the [`Memory`] structure.
pub type Mem = u64;

/// A decision of a strategy: what to play at `(mem, state)`, or how to
/// update the memory when leaving `state` with memory `mem`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Output { mem: Mem, state: StateId },
    Update { mem: Mem, state: StateId },
}

/// Outcome of asking a possibly partial strategy for a decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step<T> {
    Known(T),
    Open(Point),
}

/// Memory structure of a strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Memory {
    /// A single memory state.
    Memoryless,
    /// Bit `i` records whether target `i` has been left.
    TargetSets(Vec<StateSet>),
    /// Bit `s` records whether state `s` has been left (at most 64 states).
    VisitedSet,
    /// Explicit memory states with a transition table. Missing table entries
    /// keep the memory unchanged.
    Table { names: Vec<String>, init: usize, update: HashMap<(usize, StateId), usize> },
}

impl Memory {
    pub fn init(&self) -> Mem {
        match self {
            Memory::Table { init, .. } => *init as Mem,
            _ => 0,
        }
    }

    pub fn update(&self, m: Mem, s: StateId) -> Mem {
        match self {
            Memory::Memoryless => 0,
            Memory::TargetSets(ts) => {
                ts.iter().enumerate().filter(|(_, t)| t.contains(s)).fold(m, |m, (i, _)| m | (1 << i))
            }
            Memory::VisitedSet => m | (1 << s),
            Memory::Table { update, .. } => update.get(&(m as usize, s)).map(|&x| x as Mem).unwrap_or(m),
        }
    }

    /// Human-readable name of a memory value.
    pub fn mem_name(&self, g: &StochasticGame, m: Mem) -> String {
        match self {
            Memory::Memoryless => "-".into(),
            Memory::TargetSets(ts) => {
                let v: Vec<String> = (0..ts.len()).filter(|i| m & (1 << i) != 0).map(|i| format!("T{i}")).collect();
                format!("{{{}}}", v.join(","))
            }
            Memory::VisitedSet => {
                let v: Vec<&str> = g.states().filter(|&s| m & (1 << s) != 0).map(|s| g.state_name(s)).collect();
                format!("{{{}}}", v.join(","))
            }
            Memory::Table { names, .. } => names[m as usize].clone(),
        }
    }

    pub fn check(&self, g: &StochasticGame) -> Result<()> {
        match self {
            Memory::VisitedSet if g.num_states() > 64 => Err(Error::resource("states for visited-set memory", 64)),
            Memory::TargetSets(ts) if ts.len() > 64 => Err(Error::resource("memory target sets", 64)),
            _ => Ok(()),
        }
    }
}

/// Anything that can drive one player's moves in an induced chain.
pub trait Policy {
    fn player(&self) -> Owner;
    fn init_mem(&self) -> Mem;
    fn update(&self, g: &StochasticGame, m: Mem, s: StateId) -> Step<Mem>;
    /// Distribution over successors of the owned state `s`.
    fn play(&self, g: &StochasticGame, m: Mem, s: StateId) -> Step<Vec<(StateId, Prob)>>;
}

/// A finite-memory strategy with deterministic memory updates and
/// randomized outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    pub player: Owner,
    pub memory: Memory,
    /// Output distributions; a missing entry plays the first successor.
    pub output: BTreeMap<(Mem, StateId), Vec<(StateId, Prob)>>,
}

impl Strategy {
    pub fn new(player: Owner, memory: Memory) -> Strategy {
        assert!(player != Owner::Chance);
        Strategy { player, memory, output: BTreeMap::new() }
    }

    /// Uniform distribution over `support` at `(m, s)`.
    pub fn set_uniform(&mut self, m: Mem, s: StateId, support: &[StateId]) {
        assert!(!support.is_empty());
        let p = Prob::new(1, support.len() as i64);
        self.output.insert((m, s), support.iter().map(|&t| (t, p)).collect());
    }

    pub fn set_dirac(&mut self, m: Mem, s: StateId, t: StateId) {
        self.output.insert((m, s), vec![(t, Prob::one())]);
    }

    /// Check outputs against the game: owned states, successors only,
    /// positive probabilities summing to one.
    pub fn validate(&self, g: &StochasticGame) -> Result<()> {
        self.memory.check(g)?;
        for (&(m, s), dist) in &self.output {
            if s >= g.num_states() || g.owner(s) != self.player {
                return Err(Error::Invalid(format!("output at state {} not owned by {}", name(g, s), self.player)));
            }
            let mut sum = Prob::zero();
            for &(t, p) in dist {
                if !g.successors(s).contains(&t) {
                    return Err(Error::Invalid(format!("output {} -> {} is not a move", name(g, s), name(g, t))));
                }
                if p <= Prob::zero() {
                    return Err(Error::Invalid(format!("non-positive probability at {}", name(g, s))));
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(Error::Invalid(format!(
                    "output at memory {} state {} sums to {sum}",
                    self.memory.mem_name(g, m),
                    name(g, s)
                )));
            }
        }
        Ok(())
    }

    pub fn support(&self, g: &StochasticGame, m: Mem, s: StateId) -> Vec<StateId> {
        match self.output.get(&(m, s)) {
            Some(d) => d.iter().map(|&(t, _)| t).collect(),
            None => vec![g.successors(s)[0]],
        }
    }

    /// Human-readable listing, one decision per line, sorted.
    pub fn describe(&self, g: &StochasticGame) -> Vec<String> {
        self.output
            .iter()
            .map(|(&(m, s), d)| {
                let moves: Vec<String> = d.iter().map(|&(t, p)| format!("{}:{}", g.state_name(t), p)).collect();
                format!("{} @ {} -> {}", g.state_name(s), self.memory.mem_name(g, m), moves.join(" "))
            })
            .collect()
    }
}

fn name(g: &StochasticGame, s: StateId) -> String {
    if s < g.num_states() {
        g.state_name(s).to_string()
    } else {
        format!("#{s}")
    }
}

impl Policy for Strategy {
    fn player(&self) -> Owner {
        self.player
    }

    fn init_mem(&self) -> Mem {
        self.memory.init()
    }

    fn update(&self, _g: &StochasticGame, m: Mem, s: StateId) -> Step<Mem> {
        Step::Known(self.memory.update(m, s))
    }

    fn play(&self, g: &StochasticGame, m: Mem, s: StateId) -> Step<Vec<(StateId, Prob)>> {
        Step::Known(match self.output.get(&(m, s)) {
            Some(d) => d.clone(),
            None => vec![(g.successors(s)[0], Prob::one())],
        })
    }
}

// ---------------------------------------------------------------------------
// Strategy file format
// ---------------------------------------------------------------------------

/// Parse a strategy file:
///
/// ```text
/// strategy p1
/// memory m0 saw1 saw2
/// initmem m0
/// update m0 s1 saw1
/// out saw1 s3 C 1/1
/// ```
///
/// The first listed memory state is initial unless `initmem` says
/// otherwise. Without a `memory` line the strategy is memoryless and
/// `out` lines use `-` as memory name.
pub fn parse_strategy(text: &str, g: &StochasticGame) -> Result<Strategy> {
    let mut player = None;
    let mut names: Vec<String> = Vec::new();
    let mut init_name: Option<(usize, String)> = None;
    let mut updates: Vec<(usize, String, String, String)> = Vec::new();
    let mut outs: Vec<(usize, String, String, String, String)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        for part in body.split(';') {
            let w: Vec<&str> = part.split_whitespace().collect();
            if w.is_empty() {
                continue;
            }
            let arity = |n: usize, usage: &str| {
                if w.len() == n {
                    Ok(())
                } else {
                    Err(Error::parse(line, format!("expected `{usage}`")))
                }
            };
            match w[0] {
                "strategy" => {
                    arity(2, "strategy (p1|p2)")?;
                    if player.is_some() {
                        return Err(Error::parse(line, "duplicate `strategy` line"));
                    }
                    player = Some(match w[1] {
                        "p1" => Owner::P1,
                        "p2" => Owner::P2,
                        other => return Err(Error::parse(line, format!("unknown player `{other}`"))),
                    });
                }
                "memory" => {
                    if w.len() < 2 {
                        return Err(Error::parse(line, "expected `memory <id>...`"));
                    }
                    for &m in &w[1..] {
                        if names.iter().any(|n| n == m) {
                            return Err(Error::parse(line, format!("duplicate memory state `{m}`")));
                        }
                        names.push(m.to_string());
                    }
                }
                "initmem" => {
                    arity(2, "initmem <id>")?;
                    init_name = Some((line, w[1].to_string()));
                }
                "update" => {
                    arity(4, "update <mem> <state> <mem'>")?;
                    updates.push((line, w[1].into(), w[2].into(), w[3].into()));
                }
                "out" => {
                    arity(5, "out <mem> <state> <succ> <num>/<den>")?;
                    outs.push((line, w[1].into(), w[2].into(), w[3].into(), w[4].into()));
                }
                other => return Err(Error::parse(line, format!("unknown keyword `{other}`"))),
            }
        }
    }

    let player = player.ok_or_else(|| Error::Invalid("missing `strategy` line".into()))?;
    let memoryless = names.is_empty();
    if memoryless {
        names.push("-".into());
    }
    let mem_id = |line: usize, m: &str| -> Result<usize> {
        names.iter().position(|n| n == m).ok_or_else(|| Error::parse(line, format!("unknown memory state `{m}`")))
    };
    let state_id = |line: usize, s: &str| -> Result<StateId> {
        g.state_id(s).ok_or_else(|| Error::parse(line, format!("unknown state `{s}`")))
    };
    let init = match &init_name {
        Some((line, m)) => mem_id(*line, m)?,
        None => 0,
    };
    let mut table = HashMap::new();
    for (line, m, s, m2) in &updates {
        let key = (mem_id(*line, m)?, state_id(*line, s)?);
        if table.insert(key, mem_id(*line, m2)?).is_some() {
            return Err(Error::parse(*line, "duplicate update entry"));
        }
    }
    let mut output: BTreeMap<(Mem, StateId), Vec<(StateId, Prob)>> = BTreeMap::new();
    for (line, m, s, t, p) in &outs {
        let m = mem_id(*line, m)? as Mem;
        let s = state_id(*line, s)?;
        let t = state_id(*line, t)?;
        let p = crate::game::text_prob(p).ok_or_else(|| Error::parse(*line, format!("bad probability `{p}`")))?;
        let dist = output.entry((m, s)).or_default();
        if dist.iter().any(|&(x, _)| x == t) {
            return Err(Error::parse(*line, "duplicate output entry"));
        }
        dist.push((t, p));
    }
    for d in output.values_mut() {
        d.sort_by_key(|&(t, _)| t);
    }
    let memory =
        if memoryless && table.is_empty() { Memory::Memoryless } else { Memory::Table { names, init, update: table } };
    let strategy = Strategy { player, memory, output };
    strategy.validate(g)?;
    Ok(strategy)
}

/// Serialize a strategy with table memory (see [`Strategy::to_table`]).
pub fn write_strategy(sigma: &Strategy, g: &StochasticGame) -> Result<String> {
    let table;
    let sigma = match sigma.memory {
        Memory::Table { .. } | Memory::Memoryless => sigma,
        _ => {
            table = sigma.to_table(g, 1 << 16)?;
            &table
        }
    };
    let mut out = String::new();
    let _ = writeln!(out, "strategy {}", sigma.player);
    if let Memory::Table { names, init, update } = &sigma.memory {
        let _ = writeln!(out, "memory {}", names.join(" "));
        let _ = writeln!(out, "initmem {}", names[*init]);
        let mut ups: Vec<_> = update.iter().collect();
        ups.sort();
        for (&(m, s), &m2) in ups {
            let _ = writeln!(out, "update {} {} {}", names[m], g.state_name(s), names[m2]);
        }
    }
    for (&(m, s), dist) in &sigma.output {
        for &(t, p) in dist {
            let _ = writeln!(
                out,
                "out {} {} {} {}/{}",
                sigma.memory.mem_name(g, m),
                g.state_name(s),
                g.state_name(t),
                p.numer(),
                p.denom()
            );
        }
    }
    Ok(out)
}

impl Strategy {
    /// Equivalent strategy with explicit table memory over the memory values
    /// reachable in `g` (under any moves), failing beyond `cap` values.
    pub fn to_table(&self, g: &StochasticGame, cap: usize) -> Result<Strategy> {
        if let Memory::Table { .. } = self.memory {
            return Ok(self.clone());
        }
        // Reachable (state, memory) pairs.
        let start = (g.init(), self.memory.init());
        let mut seen = HashMap::from([(start, ())]);
        let mut stack = vec![start];
        let mut mems: Vec<Mem> = vec![start.1];
        while let Some((s, m)) = stack.pop() {
            let m2 = self.memory.update(m, s);
            for &t in g.successors(s) {
                if seen.insert((t, m2), ()).is_none() {
                    if !mems.contains(&m2) {
                        mems.push(m2);
                        if mems.len() > cap {
                            return Err(Error::resource("strategy memory values", cap));
                        }
                    }
                    stack.push((t, m2));
                }
            }
        }
        mems.sort();
        let idx: HashMap<Mem, usize> = mems.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mut names: Vec<String> = mems.iter().map(|&m| self.memory.mem_name(g, m)).collect();
        if matches!(self.memory, Memory::Memoryless) {
            names = vec!["m0".into()];
        }
        let mut update = HashMap::new();
        for &(s, m) in seen.keys() {
            let m2 = self.memory.update(m, s);
            if m2 != m {
                update.insert((idx[&m], s), idx[&m2]);
            }
        }
        let output = self
            .output
            .iter()
            .filter(|(k, _)| idx.contains_key(&k.0))
            .map(|(&(m, s), d)| ((idx[&m] as Mem, s), d.clone()))
            .collect();
        Ok(Strategy { player: self.player, memory: Memory::Table { names, init: idx[&start.1], update }, output })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;

    fn fig2() -> StochasticGame {
        parse_game(
            "state s0 p2; state s1 chance; state s2 chance; state s3 p1
             state A chance; state B chance; state C chance; state D chance; init s0
             edge s0 s1; edge s0 s2; prob s1 A 1/2; prob s1 s3 1/2; prob s2 B 1/2; prob s2 s3 1/2
             edge s3 C; edge s3 D",
        )
        .unwrap()
    }

    const PAPER: &str = "strategy p1
memory m0 saw1 saw2
update m0 s1 saw1
update m0 s2 saw2
out saw1 s3 C 1/1
out saw2 s3 D 1/1
";

    #[test]
    fn parses_table_strategy() {
        let g = fig2();
        let s = parse_strategy(PAPER, &g).unwrap();
        let saw1 = s.memory.update(0, 1);
        assert_eq!(saw1, 1);
        assert_eq!(s.memory.update(saw1, 3), saw1);
        assert_eq!(s.support(&g, saw1, 3), vec![g.state_id("C").unwrap()]);
        let text = write_strategy(&s, &g).unwrap();
        assert_eq!(parse_strategy(&text, &g).unwrap(), s);
    }

    #[test]
    fn rejects_bad_outputs() {
        let g = fig2();
        assert!(parse_strategy("strategy p1\nout - s3 A 1/1", &g).is_err());
        assert!(parse_strategy("strategy p1\nout - s0 s1 1/1", &g).is_err());
        assert!(parse_strategy("strategy p1\nout - s3 C 1/2", &g).is_err());
        assert!(parse_strategy("strategy p1\nmemory a\nout b s3 C 1/1", &g).is_err());
        assert!(parse_strategy("out - s3 C 1/1", &g).is_err());
    }

    #[test]
    fn visited_set_memory_records_left_states() {
        let m = Memory::VisitedSet;
        assert_eq!(m.update(m.update(0, 0), 3), 0b1001);
        let g = fig2();
        let mut s = Strategy::new(Owner::P1, Memory::VisitedSet);
        s.set_dirac(0b11, 3, 6);
        let t = s.to_table(&g, 100).unwrap();
        let text = write_strategy(&t, &g).unwrap();
        assert!(text.contains("out {s0,s1} s3 C 1/1"), "{text}");
    }
}
