//! Turn-based stochastic games: data model, validation and the derived
//! constructions (restriction, player swap).
//!
//! States are identified by dense indices in declaration order; every
//! iteration over states, successors or sets follows that order.

mod restrict;
mod text;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::set::StateSet;

pub use restrict::{restrict, swap_players, Restriction};
pub(crate) use text::parse_prob as text_prob;
pub use text::{parse_game, parse_game_with_notes, write_game};

pub type StateId = usize;

/// Exact transition probability.
pub type Prob = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Owner {
    P1,
    P2,
    Chance,
}

impl Owner {
    pub fn keyword(self) -> &'static str {
        match self {
            Owner::P1 => "p1",
            Owner::P2 => "p2",
            Owner::Chance => "chance",
        }
    }

    pub fn swapped(self) -> Owner {
        match self {
            Owner::P1 => Owner::P2,
            Owner::P2 => Owner::P1,
            Owner::Chance => Owner::Chance,
        }
    }
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// An immutable, validated stochastic game.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticGame {
    name: String,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    owner: Vec<Owner>,
    init: StateId,
    /// Successors sorted by state id. For chance states this is the support.
    succ: Vec<Vec<StateId>>,
    /// Parallel to `succ` for chance states, empty for player states.
    prob: Vec<Vec<Prob>>,
}

impl StochasticGame {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.names.len()
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    pub fn owner(&self, s: StateId) -> Owner {
        self.owner[s]
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    /// Successors of `s`: the move set for player states, the support for
    /// chance states.
    pub fn successors(&self, s: StateId) -> &[StateId] {
        &self.succ[s]
    }

    /// Chance distribution of `s` as `(successor, probability)` pairs.
    pub fn distribution(&self, s: StateId) -> impl Iterator<Item = (StateId, Prob)> + '_ {
        self.succ[s].iter().copied().zip(self.prob[s].iter().copied())
    }

    pub fn probability(&self, s: StateId, t: StateId) -> Prob {
        match self.succ[s].binary_search(&t) {
            Ok(i) if self.owner[s] == Owner::Chance => self.prob[s][i],
            _ => Prob::zero(),
        }
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.num_states())
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.num_states())
    }

    pub fn owned_by(&self, owner: Owner) -> impl Iterator<Item = StateId> + '_ {
        self.states().filter(move |&s| self.owner[s] == owner)
    }

    /// A copy of this game starting in `s` instead of the declared initial state.
    pub fn with_init(&self, s: StateId) -> StochasticGame {
        assert!(s < self.num_states());
        StochasticGame { init: s, ..self.clone() }
    }

    pub fn set_names(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|s| self.names[s].clone()).collect()
    }

    /// `{a, b}` rendering of a state set, as accepted by the query syntax.
    pub fn format_set(&self, set: &StateSet) -> String {
        let names: Vec<&str> = set.iter().map(|s| self.names[s].as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }

    pub fn set_of(&self, names: &[&str]) -> Result<StateSet> {
        let mut set = self.empty_set();
        for n in names {
            let id = self.state_id(n).ok_or_else(|| Error::Invalid(format!("unknown state `{n}`")))?;
            set.insert(id);
        }
        Ok(set)
    }

    /// True if `s` only moves to itself.
    pub fn is_terminal(&self, s: StateId) -> bool {
        self.succ[s] == [s]
    }

    /// Predecessor lists, indexed by target state.
    pub fn predecessors(&self) -> Vec<Vec<StateId>> {
        let mut pred = vec![Vec::new(); self.num_states()];
        for s in self.states() {
            for &t in &self.succ[s] {
                pred[t].push(s);
            }
        }
        pred
    }
}

/// Incremental construction of a [`StochasticGame`]; `build` validates.
#[derive(Debug, Default, Clone)]
pub struct GameBuilder {
    name: String,
    names: Vec<String>,
    index: HashMap<String, StateId>,
    owner: Vec<Owner>,
    init: Option<StateId>,
    succ: Vec<Vec<(StateId, Prob)>>,
    notes: Vec<String>,
}

impl GameBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GameBuilder { name: name.into(), ..Default::default() }
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn state(&mut self, name: impl Into<String>, owner: Owner) -> Result<StateId> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::Invalid(format!("duplicate state declaration `{name}`")));
        }
        let id = self.names.len();
        self.index.insert(name.clone(), id);
        self.names.push(name);
        self.owner.push(owner);
        self.succ.push(Vec::new());
        Ok(id)
    }

    pub fn id(&self, name: &str) -> Result<StateId> {
        self.index.get(name).copied().ok_or_else(|| Error::Invalid(format!("unknown state `{name}`")))
    }

    pub fn init(&mut self, s: StateId) {
        self.init = Some(s);
    }

    pub fn edge(&mut self, from: StateId, to: StateId) -> Result<()> {
        if self.owner[from] == Owner::Chance {
            return Err(Error::Invalid(format!("`edge` from chance state `{}`; use `prob`", self.names[from])));
        }
        if self.succ[from].iter().any(|&(t, _)| t == to) {
            return Err(Error::Invalid(format!("duplicate edge {} -> {}", self.names[from], self.names[to])));
        }
        self.succ[from].push((to, Prob::one()));
        Ok(())
    }

    pub fn prob(&mut self, from: StateId, to: StateId, p: Prob) -> Result<()> {
        if self.owner[from] != Owner::Chance {
            return Err(Error::Invalid(format!(
                "`prob` from {} state `{}`; use `edge`",
                self.owner[from], self.names[from]
            )));
        }
        if p <= Prob::zero() || p > Prob::one() {
            return Err(Error::Invalid(format!(
                "probability {p} of {} -> {} outside (0, 1]",
                self.names[from], self.names[to]
            )));
        }
        if self.succ[from].iter().any(|&(t, _)| t == to) {
            return Err(Error::Invalid(format!("duplicate transition {} -> {}", self.names[from], self.names[to])));
        }
        self.succ[from].push((to, p));
        Ok(())
    }

    /// Notes recorded while building (auto-completed terminal states).
    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn build(self) -> Result<StochasticGame> {
        self.build_with_notes().map(|(g, _)| g)
    }

    pub fn build_with_notes(mut self) -> Result<(StochasticGame, Vec<String>)> {
        let init = self.init.ok_or_else(|| Error::Invalid("missing `init` declaration".into()))?;
        let n = self.names.len();
        let mut succ = Vec::with_capacity(n);
        let mut prob = Vec::with_capacity(n);
        for s in 0..n {
            let mut moves = std::mem::take(&mut self.succ[s]);
            if moves.is_empty() {
                self.notes.push(format!("state `{}` has no outgoing transition; added a self-loop", self.names[s]));
                moves.push((s, Prob::one()));
            }
            moves.sort_by_key(|&(t, _)| t);
            if self.owner[s] == Owner::Chance {
                let total: BigRational = moves
                    .iter()
                    .map(|(_, p)| BigRational::new(BigInt::from(*p.numer()), BigInt::from(*p.denom())))
                    .sum();
                if !total.is_one() {
                    return Err(Error::Invalid(format!("chance mass {} ≠ 1 at state `{}`", total, self.names[s])));
                }
                prob.push(moves.iter().map(|&(_, p)| p).collect());
            } else {
                prob.push(Vec::new());
            }
            succ.push(moves.into_iter().map(|(t, _)| t).collect::<Vec<_>>());
        }
        if succ.iter().any(|v: &Vec<StateId>| v.is_empty()) {
            return Err(Error::Invariant("empty successor set after completion".into()));
        }
        let game = StochasticGame {
            name: if self.name.is_empty() { "game".into() } else { self.name },
            names: self.names,
            index: self.index,
            owner: self.owner,
            init,
            succ,
            prob,
        };
        Ok((game, self.notes))
    }
}

impl StochasticGame {
    /// Rebuild from raw parts; used by the derived constructions.
    pub(crate) fn from_parts(
        name: String,
        names: Vec<String>,
        owner: Vec<Owner>,
        init: StateId,
        moves: Vec<Vec<(StateId, Prob)>>,
    ) -> StochasticGame {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut succ = Vec::with_capacity(moves.len());
        let mut prob = Vec::with_capacity(moves.len());
        for (s, mut m) in moves.into_iter().enumerate() {
            m.sort_by_key(|&(t, _)| t);
            debug_assert!(!m.is_empty());
            if owner[s] == Owner::Chance {
                prob.push(m.iter().map(|&(_, p)| p).collect());
            } else {
                prob.push(Vec::new());
            }
            succ.push(m.into_iter().map(|(t, _)| t).collect());
        }
        StochasticGame { name, names, index, owner, init, succ, prob }
    }

    /// Moves of `s` with probabilities (one for player states).
    pub(crate) fn moves(&self, s: StateId) -> Vec<(StateId, Prob)> {
        if self.owner[s] == Owner::Chance {
            self.distribution(s).collect()
        } else {
            self.succ[s].iter().map(|&t| (t, Prob::one())).collect()
        }
    }

    pub(crate) fn with_owners(&self, owner: Vec<Owner>) -> StochasticGame {
        StochasticGame { owner, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_rejects_duplicate_state() {
        let mut b = GameBuilder::new("g");
        b.state("a", Owner::P1).unwrap();
        assert!(b.state("a", Owner::P2).is_err());
    }

    #[test]
    fn builder_requires_init() {
        let mut b = GameBuilder::new("g");
        b.state("a", Owner::P1).unwrap();
        assert!(matches!(b.build(), Err(Error::Invalid(m)) if m.contains("init")));
    }

    #[test]
    fn terminal_states_get_self_loops() {
        let mut b = GameBuilder::new("g");
        let a = b.state("a", Owner::Chance).unwrap();
        b.init(a);
        let (g, notes) = b.build_with_notes().unwrap();
        assert_eq!(g.successors(a), &[a]);
        assert_eq!(g.probability(a, a), Prob::one());
        assert_eq!(notes.len(), 1);
        assert!(g.is_terminal(a));
    }
}
