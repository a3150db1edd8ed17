//! Winning regions of single qualitative objectives, by graph fixpoints.

use crate::game::{swap_players, Owner, StateId, StochasticGame};
use crate::query::{Atom, Mode, Shape};
use crate::set::StateSet;

/// Winning region of one atom: the states from which player 1 wins it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub atom: Atom,
    pub states: StateSet,
}

/// Least set containing `target` and closed under: states owned by an
/// `existential` owner with some successor in the set, and other states with
/// all successors in the set. Only states of `within` may join, and
/// successors outside `within` never count as being in the set.
pub fn attractor(
    g: &StochasticGame,
    target: &StateSet,
    within: &StateSet,
    existential: impl Fn(Owner) -> bool,
) -> StateSet {
    let n = g.num_states();
    let pred = g.predecessors();
    let mut set = target.intersection(within);
    // Remaining successors a universal state must still see enter the set.
    let mut missing: Vec<usize> = g.states().map(|s| g.successors(s).len()).collect();
    let mut queue: Vec<StateId> = set.iter().collect();
    while let Some(t) = queue.pop() {
        for &s in &pred[t] {
            if set.contains(s) || !within.contains(s) {
                continue;
            }
            let joins = if existential(g.owner(s)) {
                true
            } else {
                missing[s] -= 1;
                missing[s] == 0
            };
            if joins {
                set.insert(s);
                queue.push(s);
            }
        }
    }
    debug_assert_eq!(set.universe(), n);
    set
}

fn p1_side(o: Owner) -> bool {
    matches!(o, Owner::P1 | Owner::Chance)
}

fn p2_side(o: Owner) -> bool {
    matches!(o, Owner::P2 | Owner::Chance)
}

/// States from which player 1 reaches `t` with positive probability.
pub fn nz_reach(g: &StochasticGame, t: &StateSet) -> StateSet {
    attractor(g, t, &g.all_states(), p1_side)
}

/// States from which player 1 stays in `t` with probability one.
pub fn as_safe(g: &StochasticGame, t: &StateSet) -> StateSet {
    attractor(g, &t.complement(), &g.all_states(), p2_side).complement()
}

/// States from which player 1 reaches `t` with probability one, together
/// with the number of removal rounds performed.
pub fn as_reach_rounds(g: &StochasticGame, t: &StateSet) -> (StateSet, usize) {
    let all = g.all_states();
    let mut w = all.clone();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let p = attractor(g, &t.intersection(&w), &w, p1_side);
        let bad = w.difference(&p);
        if bad.is_empty() {
            return (w, rounds);
        }
        // Target states are already won and never join the losing side.
        let lost = attractor(g, &bad.union(&w.complement()), &t.complement(), p2_side);
        w = w.difference(&lost);
    }
}

/// States from which player 1 reaches `t` with probability one.
pub fn as_reach(g: &StochasticGame, t: &StateSet) -> StateSet {
    as_reach_rounds(g, t).0
}

/// States from which player 1 stays in `t` with positive probability: the
/// complement of the opponent's almost-sure reachability region for `~t`.
pub fn nz_safe(g: &StochasticGame, t: &StateSet) -> StateSet {
    as_reach(&swap_players(g), &t.complement()).complement()
}

pub fn winning_states(g: &StochasticGame, mode: Mode, shape: Shape, t: &StateSet) -> StateSet {
    match (mode, shape) {
        (Mode::Nz, Shape::Reach) => nz_reach(g, t),
        (Mode::As, Shape::Safe) => as_safe(g, t),
        (Mode::As, Shape::Reach) => as_reach(g, t),
        (Mode::Nz, Shape::Safe) => nz_safe(g, t),
    }
}

pub fn single_region(g: &StochasticGame, atom: &Atom) -> Region {
    Region { atom: atom.clone(), states: winning_states(g, atom.mode, atom.shape, &atom.target) }
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
    fn fig1_regions() {
        let g = fig1();
        let s = |n: &[&str]| g.set_of(n).unwrap();
        assert_eq!(nz_reach(&g, &s(&["s2"])), s(&["s0", "s2"]));
        assert_eq!(as_reach(&g, &s(&["s3"])), s(&["s3"]));
        assert_eq!(as_reach(&g, &s(&["s3", "s4"])), s(&["s0", "s1", "s3", "s4"]));
        assert_eq!(as_safe(&g, &g.all_states()), g.all_states());
        assert!(nz_reach(&g, &g.empty_set()).is_empty());
        // From s1 player 2 moves to s3; player 1 avoids s1 by playing s2.
        assert_eq!(nz_safe(&g, &s(&["s0", "s1", "s2", "s4"])), s(&["s0", "s2", "s4"]));
    }

    #[test]
    fn chance_loops_are_not_almost_sure() {
        // c moves to t or back to itself: t is reached almost surely. d
        // moves to a dead end with positive probability: it is not.
        let g = parse_game(
            "state c chance; state t chance; state d chance; state x chance; init c
             prob c c 1/2; prob c t 1/2; prob d t 1/2; prob d x 1/2",
        )
        .unwrap();
        let t = g.set_of(&["t"]).unwrap();
        assert_eq!(as_reach(&g, &t), g.set_of(&["c", "t"]).unwrap());
        assert_eq!(nz_reach(&g, &t), g.set_of(&["c", "t", "d"]).unwrap());
    }

    #[test]
    fn player_two_escape_is_removed() {
        // p (P2) either goes to the target or to a P1 state that can only
        // loop back to p; player 2 avoids the target forever.
        let g = parse_game(
            "state p p2; state q p1; state t chance; init p
             edge p t; edge p q; edge q p",
        )
        .unwrap();
        let t = g.set_of(&["t"]).unwrap();
        assert_eq!(as_reach(&g, &t), t);
        assert_eq!(nz_reach(&g, &t), t);
    }
}
