//! Built-in example games, queries and strategies.

use crate::error::Result;
use crate::game::{parse_game, StochasticGame};
use crate::query::{parse_query, Query};
use crate::strategy::{parse_strategy, Strategy};

/// Player 1 picks between a player-2 state and a terminal; player 2 picks
/// between two terminals.
pub const FIG1: &str = "\
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

/// Player 2 commits to `s1` or `s2`; a coin then either ends the play in
/// `A`/`B` or hands player 1 the choice between `C` and `D` at `s3`.
pub const FIG2: &str = "\
game fig2
state s0 p2
state s1 chance
state s2 chance
state s3 p1
state A chance
state B chance
state C chance
state D chance
init s0
edge s0 s1
edge s0 s2
prob s1 A 1/2
prob s1 s3 1/2
prob s2 B 1/2
prob s2 s3 1/2
edge s3 C
edge s3 D
";

/// Player 2 visits `A` or `B` on every round; player 1 then stops in `C` or
/// `D`, or gambles via `E` on ending in `F` or starting another round.
pub const FIG3: &str = "\
game fig3
state s0 p2
state A chance
state B chance
state s1 p1
state C chance
state D chance
state E chance
state F chance
init s0
edge s0 A
edge s0 B
prob A s1 1/1
prob B s1 1/1
edge s1 C
edge s1 D
edge s1 E
prob E F 1/2
prob E s0 1/2
";

/// Player 1 either stays at `s0` or exits to the terminal `s1`.
pub const STAY_OR_EXIT: &str = "\
game stay-or-exit
state s0 p1
state s1 chance
init s0
edge s0 s0
edge s0 s1
";

pub const FIG1_QUERY: &str = "AS F {s3} | (NZ F {s2} & NZ F {s4})";
pub const FIG1_QUERY_AS: &str = "AS F {s3} | (!AS F {s3, s4} & NZ F {s4})";
pub const FIG1_QUERY_NZ: &str = "!NZ F {s2, s4} | (NZ F {s2} & NZ F {s4})";

/// Player 1 must end in `C` after `s1` and in `D` after `s2`, unless
/// player 2 randomizes.
pub const FIG2_QUERY: &str = "(NZ F {A} & NZ F {B}) | (AS F {B, D} & NZ F {D}) | (AS F {A, C} & NZ F {C})";

/// A variant whose reachability targets contain both `A` and `B`. Here the
/// memoryless strategy that always plays `C` already wins.
pub const FIG2_QUERY_WIDE: &str = "(NZ F {A} & NZ F {B}) | (AS F {A, B, D} & NZ F {D}) | (AS F {A, B, C} & NZ F {C})";

pub const FIG3_PHI1: &str = "AS F {A} & NZ F {B} & NZ F {C} & AS G ~{D}";
pub const FIG3_PHI2: &str = "NZ F {A} & AS F {B} & AS G ~{C} & NZ F {D}";
pub const FIG3_PHI3: &str = "NZ G ~{A} & NZ G ~{B}";
pub const FIG3_PHI4: &str = "AS F {F} & (AS G ~{A} | AS G ~{B})";

/// The full fig3 query, the disjunction of the four parts.
pub fn fig3_query_text() -> String {
    [FIG3_PHI1, FIG3_PHI2, FIG3_PHI3, FIG3_PHI4].map(|p| format!("({p})")).join(" | ")
}

/// Plays `C` at `s3` after `s1` and `D` after `s2`.
pub const FIG2_STRATEGY: &str = "\
strategy p1
memory m0 saw1 saw2
update m0 s1 saw1
update m0 s2 saw2
out saw1 s3 C 1/1
out saw2 s3 D 1/1
";

/// Remembers the order in which `A` and `B` were first seen; stops in `C`
/// once `A` came before `B`, in `D` once `B` came before `A`, and gambles
/// via `E` until then.
pub const FIG3_STRATEGY: &str = "\
strategy p1
memory none a_only b_only ab ba
update none A a_only
update none B b_only
update a_only B ab
update b_only A ba
out none s1 E 1/1
out a_only s1 E 1/1
out b_only s1 E 1/1
out ab s1 C 1/1
out ba s1 D 1/1
";

/// Randomizes between staying and exiting for three steps, then stays.
pub const STAY_OR_EXIT_STRATEGY: &str = "\
strategy p1
memory c0 c1 c2 c3
update c0 s0 c1
update c1 s0 c2
update c2 s0 c3
out c0 s0 s0 1/2
out c0 s0 s1 1/2
out c1 s0 s0 1/2
out c1 s0 s1 1/2
out c2 s0 s0 1/2
out c2 s0 s1 1/2
out c3 s0 s0 1/1
";

/// Names accepted by [`example`].
pub const NAMES: [&str; 3] = ["fig1", "fig2", "fig3"];

/// Text of a built-in game by name.
pub fn example(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(FIG1),
        "fig2" => Some(FIG2),
        "fig3" => Some(FIG3),
        "stay-or-exit" => Some(STAY_OR_EXIT),
        _ => None,
    }
}

pub fn fig1() -> StochasticGame {
    parse_game(FIG1).expect("built-in game parses")
}

pub fn fig2() -> StochasticGame {
    parse_game(FIG2).expect("built-in game parses")
}

pub fn fig3() -> StochasticGame {
    parse_game(FIG3).expect("built-in game parses")
}

pub fn stay_or_exit() -> StochasticGame {
    parse_game(STAY_OR_EXIT).expect("built-in game parses")
}

pub fn query(g: &StochasticGame, text: &str) -> Result<Query> {
    parse_query(text, g)
}

pub fn fig2_strategy() -> Strategy {
    parse_strategy(FIG2_STRATEGY, &fig2()).expect("built-in strategy parses")
}

pub fn fig3_strategy() -> Strategy {
    parse_strategy(FIG3_STRATEGY, &fig3()).expect("built-in strategy parses")
}

pub fn stay_or_exit_strategy() -> Strategy {
    parse_strategy(STAY_OR_EXIT_STRATEGY, &stay_or_exit()).expect("built-in strategy parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse() {
        assert_eq!(fig1().num_states(), 5);
        assert_eq!(fig2().num_states(), 8);
        assert_eq!(fig3().num_states(), 8);
        for (g, q) in [
            (fig1(), FIG1_QUERY),
            (fig1(), FIG1_QUERY_AS),
            (fig1(), FIG1_QUERY_NZ),
            (fig2(), FIG2_QUERY),
            (fig2(), FIG2_QUERY_WIDE),
        ] {
            query(&g, q).unwrap();
        }
        query(&fig3(), &fig3_query_text()).unwrap();
        fig2_strategy().validate(&fig2()).unwrap();
        fig3_strategy().validate(&fig3()).unwrap();
    }
}
