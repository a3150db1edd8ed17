//! Decision procedures for the determined query fragments, and dispatch.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{restrict, swap_players, StochasticGame};
use crate::query::{classify, dnf_terms, dual, negate_normalize, set_text, Atom, FragmentClass, Mode, Query, Shape};
use crate::region::{as_reach, as_safe, nz_safe, winning_states};
use crate::set::StateSet;
use crate::unfold::{goal_unfold, to_reachability_game, Unfolding};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum number of DNF terms for positive-AS queries.
    pub dnf_cap: usize,
    /// Maximum number of AS reachability targets in one conjunction (the
    /// target construction is memoized over all subsets).
    pub subset_cap: usize,
    /// Maximum number of goal-unfolding nodes.
    pub unfold_cap: usize,
    /// Maximum number of nodes expanded by the reachability search.
    pub search_budget: usize,
    /// Use "all tracked bits set" as the search goal instead of "NZ bit set".
    pub all_bits_goal: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dnf_cap: 1024,
            subset_cap: 16,
            unfold_cap: 1 << 20,
            search_budget: 1 << 24,
            all_bits_goal: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Winner {
    Player1,
    Player2,
    Unknown,
}

impl Winner {
    pub fn from_bool(p1: bool) -> Winner {
        if p1 {
            Winner::Player1
        } else {
            Winner::Player2
        }
    }

    pub fn opposite(self) -> Winner {
        match self {
            Winner::Player1 => Winner::Player2,
            Winner::Player2 => Winner::Player1,
            Winner::Unknown => Winner::Unknown,
        }
    }
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NzVerdict {
    pub atom: String,
    pub won: bool,
    /// Nodes of the goal unfolding built for this atom, if one was needed.
    pub unfolded_nodes: Option<usize>,
    /// Size of the converted reachability target for an NZ safety atom.
    pub converted_target_size: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachEvidence {
    pub targets: Vec<String>,
    /// The single combined target whose AS reachability decides the
    /// conjunction.
    pub combined_target: Vec<String>,
    pub won: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjunctionEvidence {
    /// Intersection of all AS safety targets, if there were any.
    pub safe_target: Option<Vec<String>>,
    pub safe_region: Option<Vec<String>>,
    pub init_in_safe_region: bool,
    pub as_reach: Option<ReachEvidence>,
    pub nz: Vec<NzVerdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermVerdict {
    pub term: String,
    pub won: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    Single { atom: String, region: Vec<String> },
    Conjunction(ConjunctionEvidence),
    PositiveAs { terms: Vec<TermVerdict>, satisfied_term: Option<String> },
    Dual { query: String, fragment: FragmentClass, winner: Winner, evidence: Box<Evidence> },
    Undecided { hint: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub winner: Winner,
    pub fragment: FragmentClass,
    pub evidence: Evidence,
}

fn names(g: &StochasticGame, set: &StateSet) -> Vec<String> {
    g.set_names(set)
}

fn atom_text(g: &StochasticGame, a: &Atom) -> String {
    a.to_text(g.state_names())
}

/// Conjunction of NZ atoms: won iff every atom is won on its own (player 1
/// can mix the individual winning strategies uniformly).
pub fn solve_conj_nz(g: &StochasticGame, atoms: &[Atom]) -> SolveResult {
    assert!(atoms.iter().all(|a| a.mode == Mode::Nz));
    let nz: Vec<NzVerdict> = atoms
        .iter()
        .map(|a| NzVerdict {
            atom: atom_text(g, a),
            won: winning_states(g, a.mode, a.shape, &a.target).contains(g.init()),
            unfolded_nodes: None,
            converted_target_size: None,
        })
        .collect();
    SolveResult {
        winner: Winner::from_bool(nz.iter().all(|v| v.won)),
        fragment: FragmentClass::ConjunctionASNZ,
        evidence: Evidence::Conjunction(ConjunctionEvidence {
            safe_target: None,
            safe_region: None,
            init_in_safe_region: true,
            as_reach: None,
            nz,
        }),
    }
}

/// The combined target `T'` for a conjunction of AS reachability
/// objectives: player 1 wins the conjunction from `s` iff `s` wins AS
/// reachability of `T'`. Computed as
/// `T'(I) = ⋃_{i∈I} T_i ∩ R(I∖{i})` with `R(∅) = S` and
/// `R(J) = AS-region of T'(J)`, memoized over subsets.
pub fn conj_as_reach_target(g: &StochasticGame, targets: &[StateSet], cap: usize) -> Result<StateSet> {
    let n = targets.len();
    if n == 0 {
        return Ok(g.all_states());
    }
    if n > cap || n > 31 {
        return Err(Error::resource("AS reachability targets in one conjunction", cap.min(31)));
    }
    let mut regions: HashMap<u32, StateSet> = HashMap::new();
    regions.insert(0, g.all_states());
    let full = (1u32 << n) - 1;
    // Subsets in increasing popcount order, so every proper subset is ready.
    let mut subsets: Vec<u32> = (1..=full).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    let mut last = g.empty_set();
    for j in subsets {
        let mut t = g.empty_set();
        for i in 0..n {
            if j & (1 << i) != 0 {
                t.union_with(&targets[i].intersection(&regions[&(j & !(1 << i))]));
            }
        }
        if j == full {
            last = t;
            break;
        }
        regions.insert(j, as_reach(g, &t));
    }
    Ok(last)
}

/// Conjunction of AS reachability objectives.
pub fn solve_conj_as_reach(
    g: &StochasticGame,
    targets: &[StateSet],
    config: &SolverConfig,
) -> Result<(bool, ReachEvidence)> {
    let t = conj_as_reach_target(g, targets, config.subset_cap)?;
    let won = as_reach(g, &t).contains(g.init());
    Ok((
        won,
        ReachEvidence {
            targets: targets.iter().map(|t| set_text(t, g.state_names())).collect(),
            combined_target: names(g, &t),
            won,
        },
    ))
}

/// Decide whether player 1 can reach `goal` with positive probability
/// while winning AS reachability of every tracked AS bit (`as_mask`) in
/// the unfolding.
fn decide_in_unfolding(u: &Unfolding, as_mask: u32, goal: &StateSet, config: &SolverConfig) -> Result<bool> {
    let all_as = u.with_bits(as_mask);
    let m = as_reach(&u.game, &all_as);
    let rg = to_reachability_game(&u.game, &m, goal);
    let by_search = rg.wins_by_search(config.search_budget)?;
    let by_attractor = rg.wins_by_attractor();
    if by_search != by_attractor {
        return Err(Error::Invariant(format!(
            "reachability search ({by_search}) disagrees with attractor ({by_attractor})"
        )));
    }
    Ok(by_search)
}

/// One NZ reachability objective together with AS reachability objectives.
pub fn solve_conj_as_one_nz_reach(
    g: &StochasticGame,
    nz_target: &StateSet,
    as_targets: &[StateSet],
    config: &SolverConfig,
) -> Result<(bool, usize)> {
    let mut tracked = vec![nz_target.clone()];
    tracked.extend(as_targets.iter().cloned());
    let u = goal_unfold(g, &tracked, config.unfold_cap)?;
    let as_mask = all_bits(tracked.len()) & !1;
    let goal = if config.all_bits_goal { u.with_bits(all_bits(tracked.len())) } else { u.lifted(0) };
    Ok((decide_in_unfolding(&u, as_mask, &goal, config)?, u.num_nodes()))
}

fn all_bits(k: usize) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

/// The converted target for an NZ safety objective in an unfolding whose
/// bit 0 tracks the complement of the safe set: nodes that win NZ safety of
/// `{b_0 = 0}` and have every AS bit set.
pub fn nz_safe_to_reach(u: &Unfolding, as_mask: u32) -> StateSet {
    let safe = u.with_bits(1).complement();
    nz_safe(&u.game, &safe).intersection(&u.with_bits(as_mask))
}

/// One NZ safety objective together with AS reachability objectives.
pub fn solve_conj_as_one_nz_safe(
    g: &StochasticGame,
    nz_safe_target: &StateSet,
    as_targets: &[StateSet],
    config: &SolverConfig,
) -> Result<(bool, usize, usize)> {
    let mut tracked = vec![nz_safe_target.complement()];
    tracked.extend(as_targets.iter().cloned());
    let u = goal_unfold(g, &tracked, config.unfold_cap)?;
    let as_mask = all_bits(tracked.len()) & !1;
    let goal = nz_safe_to_reach(&u, as_mask);
    Ok((decide_in_unfolding(&u, as_mask, &goal, config)?, u.num_nodes(), goal.len()))
}

/// A pure conjunction of atoms.
/// Maps target sets of the original game into the game actually solved.
type Lift<'a> = Box<dyn Fn(&StateSet) -> StateSet + 'a>;

pub fn solve_conjunction(g: &StochasticGame, conj: &[Atom], config: &SolverConfig) -> Result<SolveResult> {
    let n = g.num_states();
    let safe: Vec<&Atom> = conj.iter().filter(|a| a.mode == Mode::As && a.shape == Shape::Safe).collect();
    let mut evidence = ConjunctionEvidence {
        safe_target: None,
        safe_region: None,
        init_in_safe_region: true,
        as_reach: None,
        nz: Vec::new(),
    };
    let done = |won: bool, evidence: ConjunctionEvidence| SolveResult {
        winner: Winner::from_bool(won),
        fragment: FragmentClass::ConjunctionASNZ,
        evidence: Evidence::Conjunction(evidence),
    };

    // Merge the safety atoms and move into their winning region.
    let restricted;
    let (h, lift): (&StochasticGame, Lift) = if safe.is_empty() {
        (g, Box::new(|s: &StateSet| s.clone()))
    } else {
        let mut t = StateSet::full(n);
        for a in &safe {
            t.intersect_with(&a.target);
        }
        let region = as_safe(g, &t);
        evidence.safe_target = Some(names(g, &t));
        evidence.safe_region = Some(names(g, &region));
        if !region.contains(g.init()) {
            evidence.init_in_safe_region = false;
            return Ok(done(false, evidence));
        }
        restricted = restrict(g, &region);
        let r = &restricted;
        (&r.game, Box::new(move |s: &StateSet| r.lift(s)))
    };

    let reach: Vec<StateSet> =
        conj.iter().filter(|a| a.mode == Mode::As && a.shape == Shape::Reach).map(|a| lift(&a.target)).collect();
    let nz: Vec<&Atom> = conj.iter().filter(|a| a.mode == Mode::Nz).collect();

    if nz.is_empty() {
        if reach.is_empty() {
            return Ok(done(true, evidence));
        }
        let (won, ev) = solve_conj_as_reach(h, &reach, config)?;
        evidence.as_reach = Some(ev);
        return Ok(done(won, evidence));
    }

    let mut all_won = true;
    for a in nz {
        let target = lift(&a.target);
        let verdict = match a.shape {
            Shape::Reach => {
                let (won, nodes) = solve_conj_as_one_nz_reach(h, &target, &reach, config)?;
                NzVerdict { atom: atom_text(g, a), won, unfolded_nodes: Some(nodes), converted_target_size: None }
            }
            Shape::Safe => {
                let (won, nodes, size) = solve_conj_as_one_nz_safe(h, &target, &reach, config)?;
                NzVerdict { atom: atom_text(g, a), won, unfolded_nodes: Some(nodes), converted_target_size: Some(size) }
            }
        };
        all_won &= verdict.won;
        evidence.nz.push(verdict);
    }
    Ok(done(all_won, evidence))
}

/// A negation-free query whose atoms are all AS: won iff some DNF term is.
pub fn solve_positive_as(g: &StochasticGame, q: &Query, config: &SolverConfig) -> Result<SolveResult> {
    let terms = dnf_terms(q, config.dnf_cap)?;
    let mut verdicts = Vec::new();
    let mut satisfied = None;
    for term in &terms {
        let text =
            Query::and_of(term.iter().cloned().map(Query::Atom).collect(), g.num_states()).to_text(g.state_names());
        let won = solve_conjunction(g, term, config)?.winner == Winner::Player1;
        if won && satisfied.is_none() {
            satisfied = Some(text.clone());
        }
        verdicts.push(TermVerdict { term: text, won });
    }
    Ok(SolveResult {
        winner: Winner::from_bool(satisfied.is_some()),
        fragment: FragmentClass::PositiveAS,
        evidence: Evidence::PositiveAs { terms: verdicts, satisfied_term: satisfied },
    })
}

fn conjuncts(q: &Query) -> Vec<Atom> {
    q.atoms().into_iter().cloned().collect()
}

/// Decide `q` from the initial state of `g`, or report `Unknown` for the
/// fragments without a known decision procedure.
pub fn solve(g: &StochasticGame, q: &Query, config: &SolverConfig) -> Result<SolveResult> {
    let q = negate_normalize(q);
    let fragment = classify(&q);
    let mut result = match fragment {
        FragmentClass::SingleObjective => {
            let a = q.atoms()[0].clone();
            let region = winning_states(g, a.mode, a.shape, &a.target);
            SolveResult {
                winner: Winner::from_bool(region.contains(g.init())),
                fragment,
                evidence: Evidence::Single { atom: atom_text(g, &a), region: names(g, &region) },
            }
        }
        FragmentClass::ConjunctionASNZ => {
            let atoms = conjuncts(&q);
            if atoms.iter().all(|a| a.mode == Mode::Nz) {
                solve_conj_nz(g, &atoms)
            } else {
                solve_conjunction(g, &atoms, config)?
            }
        }
        FragmentClass::PositiveAS => solve_positive_as(g, &q, config)?,
        FragmentClass::DisjunctionASNZ | FragmentClass::PositiveNZ => {
            let d = dual(&q);
            let swapped = swap_players(g);
            let inner = solve(&swapped, &d, config)?;
            SolveResult {
                winner: inner.winner.opposite(),
                fragment,
                evidence: Evidence::Dual {
                    query: d.to_text(g.state_names()),
                    fragment: inner.fragment,
                    winner: inner.winner,
                    evidence: Box::new(inner.evidence),
                },
            }
        }
        FragmentClass::GeneralNoNZSafe | FragmentClass::General => SolveResult {
            winner: Winner::Unknown,
            fragment,
            evidence: Evidence::Undecided {
                hint: "no decision procedure for this fragment; run `oracle` for bounded-memory evidence".into(),
            },
        },
    };
    result.fragment = fragment;
    Ok(result)
}
