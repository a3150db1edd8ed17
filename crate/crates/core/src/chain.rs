//! Finite Markov chains induced by a pair of finite-memory strategies, and
//! their qualitative and exact evaluation.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{Owner, Prob, StateId, StochasticGame};
use crate::query::{Atom, Mode, Query, Shape};
use crate::set::StateSet;
use crate::strategy::{Mem, Point, Policy, Step};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainNode {
    pub state: StateId,
    pub mem1: Mem,
    pub mem2: Mem,
}

/// The reachable part of the product of a game with both strategies'
/// memories. Node 0 is initial.
#[derive(Debug, Clone)]
pub struct InducedChain {
    pub nodes: Vec<ChainNode>,
    pub edges: Vec<Vec<(usize, Prob)>>,
}

/// A strategy decision that was needed but not available while building.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenPoint {
    pub player: Owner,
    pub point: Point,
}

/// Build the induced chain, or report the first open decision met in
/// breadth-first order. Fails beyond `cap` nodes.
pub fn build_chain(
    g: &StochasticGame,
    sigma: &dyn Policy,
    tau: &dyn Policy,
    cap: usize,
) -> Result<std::result::Result<InducedChain, OpenPoint>> {
    debug_assert_eq!(sigma.player(), Owner::P1);
    debug_assert_eq!(tau.player(), Owner::P2);
    let start = ChainNode { state: g.init(), mem1: sigma.init_mem(), mem2: tau.init_mem() };
    let mut nodes = vec![start];
    let mut index = HashMap::from([(start, 0usize)]);
    let mut edges = Vec::new();
    let mut next = 0;
    while next < nodes.len() {
        let ChainNode { state: s, mem1, mem2 } = nodes[next];
        let dist = match g.owner(s) {
            Owner::P1 => match sigma.play(g, mem1, s) {
                Step::Known(d) => d,
                Step::Open(point) => return Ok(Err(OpenPoint { player: Owner::P1, point })),
            },
            Owner::P2 => match tau.play(g, mem2, s) {
                Step::Known(d) => d,
                Step::Open(point) => return Ok(Err(OpenPoint { player: Owner::P2, point })),
            },
            Owner::Chance => g.distribution(s).collect(),
        };
        let m1 = match sigma.update(g, mem1, s) {
            Step::Known(m) => m,
            Step::Open(point) => return Ok(Err(OpenPoint { player: Owner::P1, point })),
        };
        let m2 = match tau.update(g, mem2, s) {
            Step::Known(m) => m,
            Step::Open(point) => return Ok(Err(OpenPoint { player: Owner::P2, point })),
        };
        let mut out = Vec::with_capacity(dist.len());
        for (t, p) in dist {
            let node = ChainNode { state: t, mem1: m1, mem2: m2 };
            let id = match index.get(&node) {
                Some(&id) => id,
                None => {
                    if nodes.len() >= cap {
                        return Err(Error::resource("induced chain nodes", cap));
                    }
                    nodes.push(node);
                    index.insert(node, nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            out.push((id, p));
        }
        edges.push(out);
        next += 1;
    }
    Ok(Ok(InducedChain { nodes, edges }))
}

/// Reachable part of the product for partially specified strategies.
/// Nodes whose decision is open are left unexpanded.
#[derive(Debug, Clone)]
pub struct PartialChain {
    pub nodes: Vec<ChainNode>,
    /// Successors of expanded nodes; `None` marks an open node.
    pub edges: Vec<Option<Vec<usize>>>,
    pub open: Vec<Option<OpenPoint>>,
}

/// Explore every node reachable through known decisions. Fails beyond
/// `cap` nodes.
pub fn explore_chain(g: &StochasticGame, sigma: &dyn Policy, tau: &dyn Policy, cap: usize) -> Result<PartialChain> {
    let start = ChainNode { state: g.init(), mem1: sigma.init_mem(), mem2: tau.init_mem() };
    let mut c = PartialChain { nodes: vec![start], edges: Vec::new(), open: Vec::new() };
    let mut index = HashMap::from([(start, 0usize)]);
    let mut next = 0;
    while next < c.nodes.len() {
        let ChainNode { state: s, mem1, mem2 } = c.nodes[next];
        next += 1;
        let dist = match g.owner(s) {
            Owner::P1 => sigma.play(g, mem1, s),
            Owner::P2 => tau.play(g, mem2, s),
            Owner::Chance => Step::Known(g.distribution(s).collect()),
        };
        let step = match (dist, sigma.update(g, mem1, s), tau.update(g, mem2, s)) {
            (Step::Known(d), Step::Known(m1), Step::Known(m2)) => Ok((d, m1, m2)),
            (Step::Open(point), _, _) => Err(OpenPoint { player: g.owner(s), point }),
            (_, Step::Open(point), _) => Err(OpenPoint { player: Owner::P1, point }),
            (_, _, Step::Open(point)) => Err(OpenPoint { player: Owner::P2, point }),
        };
        let (dist, m1, m2) = match step {
            Ok(x) => x,
            Err(open) => {
                c.edges.push(None);
                c.open.push(Some(open));
                continue;
            }
        };
        let mut out = Vec::with_capacity(dist.len());
        for (t, _) in dist {
            let node = ChainNode { state: t, mem1: m1, mem2: m2 };
            let id = match index.get(&node) {
                Some(&id) => id,
                None => {
                    if c.nodes.len() >= cap {
                        return Err(Error::resource("induced chain nodes", cap));
                    }
                    c.nodes.push(node);
                    index.insert(node, c.nodes.len() - 1);
                    c.nodes.len() - 1
                }
            };
            out.push(id);
        }
        c.edges.push(Some(out));
        c.open.push(None);
    }
    Ok(c)
}

/// The partial chain with every node of `stop` made absorbing.
struct Truncated<'a> {
    chain: &'a PartialChain,
    stop: &'a StateSet,
}

impl SupportGraph for Truncated<'_> {
    fn len(&self) -> usize {
        self.chain.nodes.len()
    }

    fn base(&self, v: usize) -> StateId {
        self.chain.nodes[v].state
    }

    fn succ(&self, v: usize) -> Box<dyn Iterator<Item = usize> + '_> {
        match &self.chain.edges[v] {
            Some(out) if !self.stop.contains(self.base(v)) => Box::new(out.iter().copied()),
            _ => Box::new(std::iter::once(v)),
        }
    }
}

impl PartialChain {
    /// Value of reaching `t` (almost surely or with positive probability)
    /// in every completion, or the open nodes met before `t`.
    fn reach(&self, t: &StateSet, almost_sure: bool) -> std::result::Result<bool, Vec<usize>> {
        if !almost_sure && self.nodes.iter().any(|n| t.contains(n.state)) {
            return Ok(true);
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut open = Vec::new();
        while let Some(v) = stack.pop() {
            if t.contains(self.nodes[v].state) {
                continue;
            }
            match &self.edges[v] {
                None => open.push(v),
                Some(out) => {
                    for &w in out {
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        if !open.is_empty() {
            return Err(open);
        }
        let view = Truncated { chain: self, stop: t };
        Ok(if almost_sure { view.as_reach(t) } else { view.nz_reach(t) })
    }

    fn atom(&self, a: &Atom) -> std::result::Result<bool, Vec<usize>> {
        match (a.mode, a.shape) {
            (Mode::Nz, Shape::Reach) => self.reach(&a.target, false),
            (Mode::As, Shape::Reach) => self.reach(&a.target, true),
            (Mode::As, Shape::Safe) => self.reach(&a.target.complement(), false).map(|b| !b),
            (Mode::Nz, Shape::Safe) => self.reach(&a.target.complement(), true).map(|b| !b),
        }
    }

    /// Value of `q` common to every completion of the strategies, or an
    /// open decision that matters to it. Open decisions of `prefer` are
    /// reported first.
    pub fn decide(&self, q: &Query, prefer: Owner) -> std::result::Result<bool, OpenPoint> {
        let mut relevant = Vec::new();
        let value = q.eval_partial(&mut |a| match self.atom(a) {
            Ok(b) => Some(b),
            Err(open) => {
                relevant.extend(open);
                None
            }
        });
        if let Some(b) = value {
            return Ok(b);
        }
        relevant.sort_unstable();
        let points: Vec<OpenPoint> = relevant.iter().filter_map(|&v| self.open[v]).collect();
        let first = points.iter().find(|p| p.player == prefer).or(points.first());
        Err(*first.expect("undecided query has an open node"))
    }
}

/// The induced chain of two fully specified strategies.
pub fn induced_chain(g: &StochasticGame, sigma: &dyn Policy, tau: &dyn Policy, cap: usize) -> Result<InducedChain> {
    match build_chain(g, sigma, tau, cap)? {
        Ok(c) => Ok(c),
        Err(open) => Err(Error::Invalid(format!("strategy of {} undefined at {:?}", open.player, open.point))),
    }
}

/// Support graph operations shared by the exact and the support-only chains.
pub trait SupportGraph {
    fn len(&self) -> usize;
    fn base(&self, v: usize) -> StateId;
    fn succ(&self, v: usize) -> Box<dyn Iterator<Item = usize> + '_>;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn in_target(&self, t: &StateSet) -> Vec<bool> {
        (0..self.len()).map(|v| t.contains(self.base(v))).collect()
    }

    /// Some node over `t` is reachable from node 0.
    fn nz_reach(&self, t: &StateSet) -> bool {
        let hit = self.in_target(t);
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            if hit[v] {
                return true;
            }
            for w in self.succ(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        false
    }

    /// `t` is reached with probability one: every node reachable from node 0
    /// without passing through `t` can still reach `t`.
    fn as_reach(&self, t: &StateSet) -> bool {
        let n = self.len();
        let hit = self.in_target(t);
        let mut pred = vec![Vec::new(); n];
        for v in 0..n {
            for w in self.succ(v) {
                pred[w].push(v);
            }
        }
        let mut can = hit.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&v| hit[v]).collect();
        while let Some(w) = stack.pop() {
            for &v in &pred[w] {
                if !can[v] {
                    can[v] = true;
                    stack.push(v);
                }
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            if !can[v] {
                return false;
            }
            if hit[v] {
                continue;
            }
            for w in self.succ(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        true
    }

    fn eval_atom(&self, a: &Atom) -> bool {
        match (a.mode, a.shape) {
            (Mode::Nz, Shape::Reach) => self.nz_reach(&a.target),
            (Mode::As, Shape::Reach) => self.as_reach(&a.target),
            (Mode::As, Shape::Safe) => !self.nz_reach(&a.target.complement()),
            (Mode::Nz, Shape::Safe) => !self.as_reach(&a.target.complement()),
        }
    }

    fn eval(&self, q: &Query) -> bool {
        q.eval(&mut |a| self.eval_atom(a))
    }
}

impl SupportGraph for InducedChain {
    fn len(&self) -> usize {
        self.nodes.len()
    }

    fn base(&self, v: usize) -> StateId {
        self.nodes[v].state
    }

    fn succ(&self, v: usize) -> Box<dyn Iterator<Item = usize> + '_> {
        Box::new(self.edges[v].iter().map(|&(w, _)| w))
    }
}

fn big(p: Prob) -> BigRational {
    BigRational::new(BigInt::from(*p.numer()), BigInt::from(*p.denom()))
}

impl InducedChain {
    /// Exact probability of eventually visiting `t` from the initial node,
    /// by solving the absorption equations with Gaussian elimination.
    pub fn reach_probability(&self, t: &StateSet) -> BigRational {
        let n = self.nodes.len();
        let hit = self.in_target(t);
        // Nodes that can reach the target; all others have probability 0.
        let mut can = hit.clone();
        loop {
            let mut changed = false;
            for v in 0..n {
                if !can[v] && self.edges[v].iter().any(|&(w, _)| can[w]) {
                    can[v] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let unknown: Vec<usize> = (0..n).filter(|&v| can[v] && !hit[v]).collect();
        if hit[0] {
            return BigRational::one();
        }
        if !can[0] {
            return BigRational::zero();
        }
        let col: HashMap<usize, usize> = unknown.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let k = unknown.len();
        // x_v - sum_{w unknown} p x_w = sum_{w hit} p
        let mut a = vec![vec![BigRational::zero(); k + 1]; k];
        for (i, &v) in unknown.iter().enumerate() {
            a[i][i] += BigRational::one();
            for &(w, p) in &self.edges[v] {
                if hit[w] {
                    a[i][k] += big(p);
                } else if let Some(&j) = col.get(&w) {
                    a[i][j] -= big(p);
                }
            }
        }
        let x = solve_linear(a);
        x[col[&0]].clone()
    }

    /// Exact probability of staying in `t` forever.
    pub fn safe_probability(&self, t: &StateSet) -> BigRational {
        BigRational::one() - self.reach_probability(&t.complement())
    }

    /// Exact probability of the path objective of `atom`.
    pub fn atom_probability(&self, a: &Atom) -> BigRational {
        match a.shape {
            Shape::Reach => self.reach_probability(&a.target),
            Shape::Safe => self.safe_probability(&a.target),
        }
    }
}

/// Solve a nonsingular augmented system `[A | b]` exactly.
fn solve_linear(mut a: Vec<Vec<BigRational>>) -> Vec<BigRational> {
    let k = a.len();
    for c in 0..k {
        let pivot = (c..k).find(|&r| !a[r][c].is_zero()).expect("absorption system is nonsingular");
        a.swap(c, pivot);
        let inv = BigRational::one() / a[c][c].clone();
        for x in &mut a[c][c..=k] {
            *x = &*x * &inv;
        }
        let pivot_row = a[c].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row[c..=k].iter_mut().zip(&pivot_row[c..=k]) {
                    *x -= &f * p;
                }
            }
        }
    }
    a.into_iter().map(|row| row[k].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::parse_game;
    use crate::strategy::{Memory, Strategy};

    fn fig1() -> StochasticGame {
        parse_game(
            "state s0 p1; state s1 p2; state s2 chance; state s3 chance; state s4 chance
             init s0; edge s0 s1; edge s0 s2; edge s1 s3; edge s1 s4",
        )
        .unwrap()
    }

    fn memoryless(g: &StochasticGame, player: Owner, s: &str, support: &[&str]) -> Strategy {
        let mut st = Strategy::new(player, Memory::Memoryless);
        let sup: Vec<StateId> = support.iter().map(|n| g.state_id(n).unwrap()).collect();
        st.set_uniform(0, g.state_id(s).unwrap(), &sup);
        st
    }

    #[test]
    fn deterministic_pair_gives_a_path() {
        let g = fig1();
        let sigma = memoryless(&g, Owner::P1, "s0", &["s1"]);
        let tau = memoryless(&g, Owner::P2, "s1", &["s3"]);
        let c = induced_chain(&g, &sigma, &tau, 100).unwrap();
        assert_eq!(c.nodes.len(), 3);
        assert!(c.as_reach(&g.set_of(&["s3"]).unwrap()));
        assert!(!c.nz_reach(&g.set_of(&["s2"]).unwrap()));
    }

    #[test]
    fn uniform_choice_is_positive_but_not_sure() {
        let g = fig1();
        let sigma = memoryless(&g, Owner::P1, "s0", &["s1", "s2"]);
        let tau = memoryless(&g, Owner::P2, "s1", &["s4"]);
        let c = induced_chain(&g, &sigma, &tau, 100).unwrap();
        let s2 = g.set_of(&["s2"]).unwrap();
        assert!(!c.as_reach(&s2));
        assert!(c.nz_reach(&s2));
        assert_eq!(c.reach_probability(&s2), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn single_state_chain() {
        let g = parse_game("state a p1; init a").unwrap();
        let sigma = Strategy::new(Owner::P1, Memory::Memoryless);
        let tau = Strategy::new(Owner::P2, Memory::Memoryless);
        let c = induced_chain(&g, &sigma, &tau, 10).unwrap();
        assert_eq!(c.nodes.len(), 1);
        assert_eq!(c.safe_probability(&g.all_states()), BigRational::one());
    }

    #[test]
    fn geometric_loop_reaches_surely() {
        let g = parse_game("state c chance; state t chance; init c; prob c c 2/3; prob c t 1/3").unwrap();
        let sigma = Strategy::new(Owner::P1, Memory::Memoryless);
        let tau = Strategy::new(Owner::P2, Memory::Memoryless);
        let c = induced_chain(&g, &sigma, &tau, 10).unwrap();
        let t = g.set_of(&["t"]).unwrap();
        assert!(c.as_reach(&t));
        assert_eq!(c.reach_probability(&t), BigRational::one());
    }
}
