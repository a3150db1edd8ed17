use num_traits::Zero;

use super::{Owner, Prob, StateId, StochasticGame};
use crate::set::StateSet;

/// A game restricted to a subset `U` of another game's states, with the
/// fresh terminal sink that absorbs every transition leaving `U`.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub game: StochasticGame,
    /// For each original state, its id in the restricted game.
    pub to_new: Vec<Option<StateId>>,
    /// For each restricted state, its original id (`None` for the sink).
    pub to_old: Vec<Option<StateId>>,
    pub bottom: StateId,
}

impl Restriction {
    /// Map a set of original states into the restricted game; states outside
    /// `U` are dropped.
    pub fn lift(&self, set: &StateSet) -> StateSet {
        StateSet::from_ids(self.game.num_states(), set.iter().filter_map(|s| self.to_new[s]))
    }

    /// Map a set of restricted states back; the sink is dropped.
    pub fn project(&self, set: &StateSet) -> StateSet {
        StateSet::from_ids(self.to_new.len(), set.iter().filter_map(|s| self.to_old[s]))
    }
}

fn sink_name(g: &StochasticGame) -> String {
    let mut name = String::from("⊥");
    while g.state_id(&name).is_some() {
        name.push('\'');
    }
    name
}

/// The game `g` restricted to `u`: transitions leaving `u` are redirected to
/// a fresh chance sink with a self-loop. The initial state becomes the sink
/// if it lies outside `u`.
pub fn restrict(g: &StochasticGame, u: &StateSet) -> Restriction {
    let mut to_new = vec![None; g.num_states()];
    let mut to_old = Vec::new();
    let mut names = Vec::new();
    let mut owner = Vec::new();
    for s in u.iter() {
        to_new[s] = Some(to_old.len());
        to_old.push(Some(s));
        names.push(g.state_name(s).to_string());
        owner.push(g.owner(s));
    }
    let bottom = to_old.len();
    to_old.push(None);
    names.push(sink_name(g));
    owner.push(Owner::Chance);

    let mut moves: Vec<Vec<(StateId, Prob)>> = Vec::with_capacity(names.len());
    for s in u.iter() {
        let mut kept = Vec::new();
        let mut lost = Prob::zero();
        let mut dropped = false;
        for (t, p) in g.moves(s) {
            match to_new[t] {
                Some(nt) => kept.push((nt, p)),
                None => {
                    dropped = true;
                    lost += p;
                }
            }
        }
        if dropped {
            let p = if g.owner(s) == Owner::Chance { lost } else { Prob::from_integer(1) };
            kept.push((bottom, p));
        }
        moves.push(kept);
    }
    moves.push(vec![(bottom, Prob::from_integer(1))]);

    let init = to_new[g.init()].unwrap_or(bottom);
    let game = StochasticGame::from_parts(g.name().to_string(), names, owner, init, moves);
    Restriction { game, to_new, to_old, bottom }
}

/// Exchange the roles of the two players; chance states are unchanged.
pub fn swap_players(g: &StochasticGame) -> StochasticGame {
    g.with_owners(g.states().map(|s| g.owner(s).swapped()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;

    fn fig1() -> StochasticGame {
        parse_game(
            "state s0 p1; state s1 p2; state s2 chance; state s3 chance; state s4 chance
             init s0; edge s0 s1; edge s0 s2; edge s1 s3; edge s1 s4",
        )
        .unwrap()
    }

    #[test]
    fn restricting_fig1_drops_s2() {
        let g = fig1();
        let r = restrict(&g, &g.set_of(&["s0", "s1", "s3", "s4"]).unwrap());
        let h = &r.game;
        assert_eq!(h.num_states(), 5);
        assert_eq!(r.bottom, 4);
        assert_eq!(h.state_name(4), "⊥");
        let s0 = h.state_id("s0").unwrap();
        let s1 = h.state_id("s1").unwrap();
        assert_eq!(h.successors(s0), &[s1, r.bottom]);
        assert!(h.state_id("s2").is_none());
        assert_eq!(h.owner(r.bottom), Owner::Chance);
        assert!(h.is_terminal(r.bottom));
        assert_eq!(h.init(), s0);
    }

    #[test]
    fn restricting_to_everything_adds_an_unused_sink() {
        let g = fig1();
        let r = restrict(&g, &g.all_states());
        assert_eq!(r.game.num_states(), g.num_states() + 1);
        for s in g.states() {
            assert_eq!(r.game.successors(s), g.successors(s));
        }
        assert!(r.game.predecessors()[r.bottom] == vec![r.bottom]);
    }

    #[test]
    fn restricting_to_nothing_leaves_the_sink() {
        let g = fig1();
        let r = restrict(&g, &g.empty_set());
        assert_eq!(r.game.num_states(), 1);
        assert_eq!(r.game.init(), r.bottom);
    }

    #[test]
    fn chance_mass_is_redirected() {
        let g = parse_game(
            "state c chance; state a chance; state b chance; init c
             prob c a 1/3; prob c b 2/3",
        )
        .unwrap();
        let r = restrict(&g, &g.set_of(&["c", "a"]).unwrap());
        assert_eq!(r.game.probability(0, r.bottom), Prob::new(2, 3));
        assert_eq!(r.game.probability(0, 1), Prob::new(1, 3));
    }

    #[test]
    fn swap_is_an_involution() {
        let g = fig1();
        let h = swap_players(&g);
        assert_eq!(h.owner(0), Owner::P2);
        assert_eq!(h.owner(1), Owner::P1);
        assert_eq!(h.owner(2), Owner::Chance);
        assert_eq!(swap_players(&h), g);
    }
}
