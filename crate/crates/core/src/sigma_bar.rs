//! Visited-set abstraction of a finite-memory strategy and strategy
//! verification.
//!
//! `resp_σ(s, V)` is the set of moves σ plays with positive probability at
//! `s` after some history, possible under σ and some opponent, whose set of
//! previously visited states is `V`. The derived strategy σ̄ remembers only
//! `V` and plays uniformly over `resp_σ(s, V)`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Owner, StateId, StochasticGame};
use crate::oracle::{find_spoiler, MemoryKind, OracleConfig, StrategyClass};
use crate::query::{negate_normalize, Query};
use crate::strategy::{Mem, Memory, Strategy};

/// Visited sets are bitmasks over states.
pub type Visited = u64;

fn check_game(g: &StochasticGame) -> Result<()> {
    if g.num_states() > 64 {
        return Err(Error::resource("states for visited-set memory", 64));
    }
    Ok(())
}

/// All `resp_σ(s, V)` with nonempty value, keyed by `(V, s)`, for states
/// owned by σ's player. Explores the product of the game, σ's memory and
/// visited sets, resolving opponent and chance moves existentially.
pub fn responses(
    g: &StochasticGame,
    sigma: &Strategy,
    cap: usize,
) -> Result<BTreeMap<(Visited, StateId), BTreeSet<StateId>>> {
    check_game(g)?;
    let mut resp: BTreeMap<(Visited, StateId), BTreeSet<StateId>> = BTreeMap::new();
    let start = (g.init(), sigma.memory.init(), 0 as Visited);
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some((s, m, v)) = stack.pop() {
        let moves = if g.owner(s) == sigma.player {
            let sup = sigma.support(g, m, s);
            resp.entry((v, s)).or_default().extend(sup.iter().copied());
            sup
        } else {
            g.successors(s).to_vec()
        };
        let m2 = sigma.memory.update(m, s);
        let v2 = v | (1 << s);
        for t in moves {
            if seen.insert((t, m2, v2)) {
                if seen.len() > cap {
                    return Err(Error::resource("strategy product nodes", cap));
                }
                stack.push((t, m2, v2));
            }
        }
    }
    Ok(resp)
}

/// `resp_σ(s, V)`; empty when `(s, V)` is unreachable under σ.
pub fn resp_set(g: &StochasticGame, sigma: &Strategy, s: StateId, visited: &[StateId]) -> Result<Vec<StateId>> {
    let v = visited.iter().fold(0 as Visited, |v, &x| v | (1 << x));
    let resp = responses(g, sigma, 1 << 20)?;
    Ok(resp.get(&(v, s)).map(|r| r.iter().copied().collect()).unwrap_or_default())
}

/// The derived strategy together with any points where it is undefined.
#[derive(Debug, Clone)]
pub struct SigmaBar {
    pub strategy: Strategy,
    /// `(V, s)` reachable under σ̄ where `resp_σ(s, V)` is empty.
    pub undefined: Vec<(Visited, StateId)>,
}

impl SigmaBar {
    pub fn well_defined(&self) -> bool {
        self.undefined.is_empty()
    }
}

/// Build σ̄ over the visited sets reachable under it.
pub fn derive_sigma_bar(g: &StochasticGame, sigma: &Strategy, cap: usize) -> Result<SigmaBar> {
    sigma.validate(g)?;
    let resp = responses(g, sigma, cap)?;
    let mut bar = Strategy::new(sigma.player, Memory::VisitedSet);
    let mut undefined = Vec::new();
    let start = (g.init(), 0 as Visited);
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some((s, v)) = stack.pop() {
        let moves: Vec<StateId> = if g.owner(s) == sigma.player {
            match resp.get(&(v, s)) {
                Some(r) => {
                    let r: Vec<StateId> = r.iter().copied().collect();
                    if g.successors(s).len() > 1 {
                        bar.set_uniform(v, s, &r);
                    }
                    r
                }
                None => {
                    undefined.push((v, s));
                    continue;
                }
            }
        } else {
            g.successors(s).to_vec()
        };
        let v2 = v | (1 << s);
        for t in moves {
            if seen.insert((t, v2)) {
                if seen.len() > cap {
                    return Err(Error::resource("visited sets reachable under derived strategy", cap));
                }
                stack.push((t, v2));
            }
        }
    }
    undefined.sort();
    Ok(SigmaBar { strategy: bar, undefined })
}

/// Check that σ̄ plays every move σ plays, on every history possible under
/// σ̄ and some opponent. Returns the first violating `(σ-memory, V, s)`.
pub fn support_inclusion_violation(
    g: &StochasticGame,
    sigma: &Strategy,
    bar: &Strategy,
    cap: usize,
) -> Result<Option<(Mem, Visited, StateId)>> {
    check_game(g)?;
    let start = (g.init(), sigma.memory.init(), 0 as Visited);
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some((s, m, v)) = stack.pop() {
        let moves = if g.owner(s) == sigma.player {
            let own = bar.support(g, v, s);
            if !sigma.support(g, m, s).iter().all(|t| own.contains(t)) {
                return Ok(Some((m, v, s)));
            }
            own
        } else {
            g.successors(s).to_vec()
        };
        let m2 = sigma.memory.update(m, s);
        let v2 = v | (1 << s);
        for t in moves {
            if seen.insert((t, m2, v2)) {
                if seen.len() > cap {
                    return Err(Error::resource("strategy product nodes", cap));
                }
                stack.push((t, m2, v2));
            }
        }
    }
    Ok(None)
}

/// Memory class of the adversaries a strategy is verified against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Adversary {
    Memoryless,
    VisitedSet,
    Explicit(usize),
}

impl Adversary {
    pub fn kind(self) -> MemoryKind {
        match self {
            Adversary::Memoryless => MemoryKind::Memoryless,
            Adversary::VisitedSet => MemoryKind::VisitedSet,
            Adversary::Explicit(k) => MemoryKind::Explicit(k),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub holds: bool,
    /// An adversary defeating the strategy.
    pub counterexample: Option<Strategy>,
    /// Set when a bounded adversary class is not known to be complete for
    /// this strategy and query: the result is then evidence, not proof.
    pub evidence_only: bool,
    pub evaluations: usize,
}

fn has_nz_safe(q: &Query) -> bool {
    q.atoms().iter().any(|a| a.is_nz_safe())
}

/// Check that `sigma` wins `q` against every (randomized) adversary with
/// the given memory.
pub fn verify_strategy(
    g: &StochasticGame,
    sigma: &Strategy,
    q: &Query,
    adversary: Adversary,
    config: &OracleConfig,
) -> Result<VerifyReport> {
    let opponent = match sigma.player {
        Owner::P1 => Owner::P2,
        _ => Owner::P1,
    };
    let class = StrategyClass::new(opponent, adversary.kind(), true);
    let (spoiler, evaluations) = find_spoiler(g, q, sigma, &class, config)?;
    let q = negate_normalize(q);
    let not_q = negate_normalize(&Query::Not(Box::new(q.clone())));
    let complete = adversary == Adversary::VisitedSet
        && matches!(sigma.memory, Memory::Memoryless | Memory::VisitedSet)
        && !has_nz_safe(&q)
        && !has_nz_safe(&not_q);
    Ok(VerifyReport { holds: spoiler.is_none(), counterexample: spoiler, evidence_only: !complete, evaluations })
}
