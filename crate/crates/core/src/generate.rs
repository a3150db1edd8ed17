//! Seeded generation of small random games and queries.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{GameBuilder, Owner, Prob, StochasticGame};
use crate::query::{Atom, FragmentClass, Mode, Query, Shape};
use crate::set::StateSet;

#[derive(Debug, Clone)]
pub struct GameShape {
    pub min_states: usize,
    pub max_states: usize,
    /// Maximum successors of any state.
    pub max_succ: usize,
}

impl Default for GameShape {
    fn default() -> Self {
        GameShape { min_states: 2, max_states: 5, max_succ: 2 }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random game with states `s0..`, initial state `s0`. Chance states
/// split their mass as `1/2` or `1/3`/`2/3`.
pub fn random_game(rng: &mut ChaCha8Rng, shape: &GameShape) -> StochasticGame {
    let n = rng.gen_range(shape.min_states..=shape.max_states);
    let mut b = GameBuilder::new("random");
    let owners = [Owner::P1, Owner::P2, Owner::Chance];
    let own: Vec<Owner> = (0..n).map(|_| *owners.choose(rng).expect("nonempty")).collect();
    let ids: Vec<_> = (0..n).map(|i| b.state(format!("s{i}"), own[i]).expect("fresh name")).collect();
    b.init(ids[0]);
    for (i, &s) in ids.iter().enumerate() {
        let k = rng.gen_range(1..=shape.max_succ.min(n));
        let mut succ: Vec<usize> = (0..n).collect();
        succ.shuffle(rng);
        succ.truncate(k);
        succ.sort();
        if own[i] == Owner::Chance {
            let probs: Vec<Prob> = match k {
                1 => vec![Prob::new(1, 1)],
                2 if rng.gen_bool(0.5) => vec![Prob::new(1, 3), Prob::new(2, 3)],
                _ => vec![Prob::new(1, k as i64); k],
            };
            for (&t, p) in succ.iter().zip(probs) {
                b.prob(s, ids[t], p).expect("valid probability");
            }
        } else {
            for &t in &succ {
                b.edge(s, ids[t]).expect("valid edge");
            }
        }
    }
    b.build().expect("generated game is well formed")
}

/// A random target set, nonempty and not the whole state space when
/// possible.
pub fn random_target(rng: &mut ChaCha8Rng, n: usize) -> StateSet {
    loop {
        let bits: u64 = rng.gen_range(0..1u64 << n);
        let set = StateSet::from_ids(n, (0..n).filter(|i| bits & (1 << i) != 0));
        if n == 1 || (!set.is_empty() && !set.is_full()) {
            return set;
        }
    }
}

fn random_atom(rng: &mut ChaCha8Rng, pool: &[StateSet], mode: Option<Mode>) -> Atom {
    let mode = mode.unwrap_or(if rng.gen_bool(0.5) { Mode::As } else { Mode::Nz });
    let shape = if rng.gen_bool(0.5) { Shape::Reach } else { Shape::Safe };
    Atom::new(mode, shape, pool.choose(rng).expect("nonempty pool").clone())
}

/// Positive And/Or tree with 2 or 3 leaves.
fn positive_tree(rng: &mut ChaCha8Rng, n: usize, leaf: &mut impl FnMut(&mut ChaCha8Rng) -> Atom) -> Query {
    let mut leaves: Vec<Query> = (0..rng.gen_range(2..=3)).map(|_| Query::Atom(leaf(rng))).collect();
    if leaves.len() == 3 {
        let inner = vec![leaves.pop().unwrap(), leaves.pop().unwrap()];
        let inner = if rng.gen_bool(0.5) { Query::and_of(inner, n) } else { Query::or_of(inner, n) };
        leaves.push(inner);
    }
    if rng.gen_bool(0.5) {
        Query::and_of(leaves, n)
    } else {
        Query::or_of(leaves, n)
    }
}

/// A random query meant for `fragment` over `1..=max_targets` target sets.
/// Supported fragments: the single-objective, conjunction, disjunction and
/// positive ones. The result is classified by [`crate::query::classify`]
/// into that fragment or a more specific one.
pub fn random_query(rng: &mut ChaCha8Rng, n: usize, fragment: FragmentClass, max_targets: usize) -> Query {
    let pool: Vec<StateSet> = (0..rng.gen_range(1..=max_targets)).map(|_| random_target(rng, n)).collect();
    let atoms = |rng: &mut ChaCha8Rng, mode: Option<Mode>| -> Vec<Query> {
        let k = rng.gen_range(1..=3);
        (0..k).map(|_| Query::Atom(random_atom(rng, &pool, mode))).collect()
    };
    match fragment {
        FragmentClass::SingleObjective => Query::Atom(random_atom(rng, &pool, None)),
        FragmentClass::ConjunctionASNZ => Query::and_of(atoms(rng, None), n),
        FragmentClass::DisjunctionASNZ => Query::or_of(atoms(rng, None), n),
        FragmentClass::PositiveAS => positive_tree(rng, n, &mut |r| random_atom(r, &pool, Some(Mode::As))),
        FragmentClass::PositiveNZ => positive_tree(rng, n, &mut |r| random_atom(r, &pool, Some(Mode::Nz))),
        FragmentClass::GeneralNoNZSafe | FragmentClass::General => {
            let mut mixed = |r: &mut ChaCha8Rng| {
                let a = random_atom(r, &pool, None);
                if fragment == FragmentClass::GeneralNoNZSafe && a.is_nz_safe() {
                    Atom::nz_reach(a.target)
                } else {
                    a
                }
            };
            positive_tree(rng, n, &mut mixed)
        }
    }
}

/// The determined fragments exercised by the cross-checks.
pub const DETERMINED: [FragmentClass; 4] = [
    FragmentClass::ConjunctionASNZ,
    FragmentClass::DisjunctionASNZ,
    FragmentClass::PositiveAS,
    FragmentClass::PositiveNZ,
];

/// Every game with `n` states whose states have one or two successors,
/// for every assignment of owners. Chance states split uniformly.
pub fn all_games(n: usize) -> Vec<StochasticGame> {
    let mut succ_choices: Vec<Vec<usize>> = (0..n).map(|t| vec![t]).collect();
    for a in 0..n {
        for c in a + 1..n {
            succ_choices.push(vec![a, c]);
        }
    }
    let owners = [Owner::P1, Owner::P2, Owner::Chance];
    let mut out = Vec::new();
    let total_owner = 3usize.pow(n as u32);
    let total_succ = succ_choices.len().pow(n as u32);
    for oc in 0..total_owner {
        let own: Vec<Owner> = (0..n).map(|i| owners[(oc / 3usize.pow(i as u32)) % 3]).collect();
        for sc in 0..total_succ {
            let mut b = GameBuilder::new("exhaustive");
            let ids: Vec<_> = (0..n).map(|i| b.state(format!("s{i}"), own[i]).expect("fresh name")).collect();
            b.init(ids[0]);
            for i in 0..n {
                let succ = &succ_choices[(sc / succ_choices.len().pow(i as u32)) % succ_choices.len()];
                for &t in succ {
                    if own[i] == Owner::Chance {
                        b.prob(ids[i], ids[t], Prob::new(1, succ.len() as i64)).expect("valid probability");
                    } else {
                        b.edge(ids[i], ids[t]).expect("valid edge");
                    }
                }
            }
            out.push(b.build().expect("generated game is well formed"));
        }
    }
    out
}
