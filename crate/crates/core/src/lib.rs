//! Solvers for two-player turn-based stochastic games with qualitative
//! multi-objective queries: Boolean combinations of almost-sure and nonzero
//! reachability and safety objectives.

pub mod chain;
pub mod dqbf;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod generate;
pub mod oracle;
pub mod query;
pub mod region;
pub mod set;
pub mod sigma_bar;
pub mod solver;
pub mod strategy;
pub mod unfold;

pub use chain::{induced_chain, InducedChain, SupportGraph};
pub use dqbf::{dqbf_brute_sat, parse_dqbf, reduce_to_game, DqbfFormula, Reduction};
pub use error::{Error, Result};
pub use game::{
    parse_game, parse_game_with_notes, restrict, swap_players, write_game, GameBuilder, Owner, Prob, Restriction,
    StateId, StochasticGame,
};
pub use oracle::{brute_force_winner, MemoryKind, OracleConfig, OracleVerdict, Outcome, StrategyClass};
pub use query::{
    classify, dual, negate_normalize, parse_query, parse_query_free, to_dnf, Atom, FragmentClass, Mode, Query, Shape,
};
pub use region::{single_region, Region};
pub use set::StateSet;
pub use sigma_bar::{derive_sigma_bar, verify_strategy, Adversary, SigmaBar, VerifyReport};
pub use solver::{solve, Evidence, SolveResult, SolverConfig, Winner};
pub use strategy::{parse_strategy, write_strategy, Memory, Policy, Strategy};
pub use unfold::{goal_unfold, to_reachability_game, ReachabilityGame, UnfoldedState, Unfolding};
