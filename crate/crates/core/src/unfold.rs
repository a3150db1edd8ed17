//! Goal unfolding: the product of a game with bit-vectors recording which
//! target sets the play has already visited, and the nonstochastic
//! reachability games derived from it.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::game::{restrict, Owner, Prob, StateId, StochasticGame};
use crate::region::attractor;
use crate::set::StateSet;

/// Maximum number of tracked target sets.
pub const MAX_TARGETS: usize = 32;

/// A node of the goal unfolding: a base state and the set of tracked targets
/// visited so far (bit `i` for target `i`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnfoldedState {
    pub base: StateId,
    pub bits: u32,
}

impl UnfoldedState {
    pub fn has(&self, i: usize) -> bool {
        self.bits & (1 << i) != 0
    }

    pub fn bit_string(&self, k: usize) -> String {
        (0..k).map(|i| if self.has(i) { '1' } else { '0' }).collect()
    }
}

/// The part of the goal unfolding reachable from `(init, 0...0)`, as a game
/// of its own. A bit is set when the play *leaves* a state of the
/// corresponding target, so `(s, b)` moves to `(s', b | I_s)`.
#[derive(Debug, Clone)]
pub struct Unfolding {
    pub game: StochasticGame,
    pub nodes: Vec<UnfoldedState>,
    pub k: usize,
    index: HashMap<UnfoldedState, StateId>,
}

impl Unfolding {
    pub fn node_id(&self, node: UnfoldedState) -> Option<StateId> {
        self.index.get(&node).copied()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes whose bits include all of `mask`.
    pub fn with_bits(&self, mask: u32) -> StateSet {
        StateSet::from_ids(self.nodes.len(), (0..self.nodes.len()).filter(|&i| self.nodes[i].bits & mask == mask))
    }

    /// The lifted target `{(s, b) | b_i = 1}`.
    pub fn lifted(&self, i: usize) -> StateSet {
        self.with_bits(1 << i)
    }

    /// Nodes whose base state lies in `set`.
    pub fn over(&self, set: &StateSet) -> StateSet {
        StateSet::from_ids(self.nodes.len(), (0..self.nodes.len()).filter(|&i| set.contains(self.nodes[i].base)))
    }
}

/// Build the reachable goal unfolding of `g` for `targets`, failing if it
/// would exceed `cap` nodes.
pub fn goal_unfold(g: &StochasticGame, targets: &[StateSet], cap: usize) -> Result<Unfolding> {
    let k = targets.len();
    if k > MAX_TARGETS {
        return Err(Error::resource("tracked target sets", MAX_TARGETS));
    }
    let mask: Vec<u32> =
        g.states().map(|s| (0..k).filter(|&i| targets[i].contains(s)).fold(0, |m, i| m | (1 << i))).collect();

    let mut nodes = vec![UnfoldedState { base: g.init(), bits: 0 }];
    let mut index = HashMap::from([(nodes[0], 0)]);
    let mut moves: Vec<Vec<(StateId, Prob)>> = Vec::new();
    let mut next = 0;
    while next < nodes.len() {
        let node = nodes[next];
        let bits = node.bits | mask[node.base];
        let mut out = Vec::new();
        for (t, p) in g.moves(node.base) {
            let succ = UnfoldedState { base: t, bits };
            let id = match index.get(&succ) {
                Some(&id) => id,
                None => {
                    if nodes.len() >= cap {
                        return Err(Error::resource("goal unfolding nodes", cap));
                    }
                    let id = nodes.len();
                    nodes.push(succ);
                    index.insert(succ, id);
                    id
                }
            };
            out.push((id, p));
        }
        moves.push(out);
        next += 1;
    }

    let names = nodes.iter().map(|u| format!("{}[{}]", g.state_name(u.base), u.bit_string(k))).collect();
    let owner = nodes.iter().map(|u| g.owner(u.base)).collect();
    let game = StochasticGame::from_parts(format!("{}-unfolded", g.name()), names, owner, 0, moves);
    Ok(Unfolding { game, nodes, k, index })
}

/// Two-player reachability game: player 1 (which also controls the former
/// chance states) tries to reach `goal`; player 2 tries to avoid it. The
/// sink is losing for player 1.
#[derive(Debug, Clone)]
pub struct ReachabilityGame {
    pub game: StochasticGame,
    pub goal: StateSet,
    pub sink: StateId,
    /// Original node of each state (`None` for the sink).
    pub origin: Vec<Option<StateId>>,
}

/// Restrict `g` to `m`, hand the chance states to player 1 and target
/// `goal ∩ m`.
pub fn to_reachability_game(g: &StochasticGame, m: &StateSet, goal: &StateSet) -> ReachabilityGame {
    let r = restrict(g, m);
    let owners = r
        .game
        .states()
        .map(|s| match r.game.owner(s) {
            Owner::Chance => Owner::P1,
            o => o,
        })
        .collect();
    let game = r.game.with_owners(owners);
    let goal = r.lift(&goal.intersection(m));
    ReachabilityGame { game, goal, sink: r.bottom, origin: r.to_old }
}

impl ReachabilityGame {
    /// Player 1's attractor to the goal.
    pub fn winning_region(&self) -> StateSet {
        attractor(&self.game, &self.goal, &self.game.all_states(), |o| o == Owner::P1)
    }

    pub fn wins_by_attractor(&self) -> bool {
        self.winning_region().contains(self.game.init())
    }

    /// Depth-first search `win(n, h)`: true at goal nodes, false on a
    /// revisit of the current path, existential at player-1 nodes and
    /// universal at player-2 nodes. Results are memoized: `true` always,
    /// `false` only when no revisit cut-off occurred below. `budget` bounds
    /// the number of expanded nodes.
    pub fn wins_by_search(&self, budget: usize) -> Result<bool> {
        let mut s = Search {
            g: &self.game,
            goal: &self.goal,
            memo: vec![None; self.game.num_states()],
            on_path: vec![false; self.game.num_states()],
            budget,
            spent: 0,
        };
        Ok(s.win(self.game.init())?.0)
    }
}

struct Search<'a> {
    g: &'a StochasticGame,
    goal: &'a StateSet,
    memo: Vec<Option<bool>>,
    on_path: Vec<bool>,
    budget: usize,
    spent: usize,
}

impl Search<'_> {
    /// Returns the verdict and whether a path cut-off influenced it.
    fn win(&mut self, n: StateId) -> Result<(bool, bool)> {
        if self.goal.contains(n) {
            return Ok((true, false));
        }
        if let Some(v) = self.memo[n] {
            return Ok((v, false));
        }
        if self.on_path[n] {
            return Ok((false, true));
        }
        self.spent += 1;
        if self.spent > self.budget {
            return Err(Error::resource("reachability search steps", self.budget));
        }
        self.on_path[n] = true;
        let existential = self.g.owner(n) != Owner::P2;
        let mut result = (!existential, false);
        for &t in self.g.successors(n) {
            let (v, cut) = self.win(t)?;
            if existential {
                if v {
                    result = (true, false);
                    break;
                }
                result.1 |= cut;
            } else if !v {
                result = (false, cut);
                break;
            }
        }
        self.on_path[n] = false;
        if result.0 || !result.1 {
            self.memo[n] = Some(result.0);
        }
        Ok(result)
    }
}
