//! Verdicts on the built-in examples, each checked against the expected
//! value and against the brute-force oracle.

use num_rational::BigRational;
use qualgame_core::chain::{induced_chain, SupportGraph};
use qualgame_core::oracle::{
    brute_force_winner, enumerate_strategies, MemoryKind, OracleConfig, Outcome, StrategyClass,
};
use qualgame_core::strategy::{Memory, Strategy};
use qualgame_core::{
    classify, fixtures, negate_normalize, parse_game, parse_query, solve, FragmentClass, Owner, Query, SolverConfig,
    StochasticGame, Winner,
};

fn oracle(g: &StochasticGame, q: &Query) -> Winner {
    let c1 = StrategyClass::new(Owner::P1, MemoryKind::VisitedSet, true);
    let c2 = StrategyClass::new(Owner::P2, MemoryKind::VisitedSet, true);
    match brute_force_winner(g, q, &c1, &c2, &OracleConfig::default()).unwrap().outcome {
        Outcome::Player1WinsInClass => Winner::Player1,
        Outcome::Player2WinsInClass => Winner::Player2,
        Outcome::NoWinnerInClass => Winner::Unknown,
    }
}

fn check(g: &StochasticGame, text: &str, expected: Winner) {
    let q = parse_query(text, g).unwrap();
    let solved = solve(g, &q, &SolverConfig::default()).unwrap();
    assert_eq!(solved.winner, expected, "solve on {text}");
    assert_eq!(oracle(g, &q), expected, "oracle on {text}");
}

#[test]
fn fig1_conjunction_and_disjunction_verdicts() {
    let g = fixtures::fig1();
    check(&g, "NZ F {s2} & NZ F {s4}", Winner::Player2);
    check(&g, "NZ F {s2}", Winner::Player1);
    check(&g, "NZ F {s2} | NZ F {s4}", Winner::Player1);
    check(&g, "NZ F {s4} & AS F {s3}", Winner::Player2);
    check(&g, "AS G {s0, s1, s3, s4} & NZ F {s3}", Winner::Player2);
    check(&g, "AS F {s3} & AS F {s2}", Winner::Player2);
    check(&g, "AS G ~{}", Winner::Player1);
}

#[test]
fn fig1_nondetermined_query_is_unknown() {
    let g = fixtures::fig1();
    let q = parse_query(fixtures::FIG1_QUERY, &g).unwrap();
    assert_eq!(classify(&q), FragmentClass::GeneralNoNZSafe);
    assert_eq!(solve(&g, &q, &SolverConfig::default()).unwrap().winner, Winner::Unknown);
    assert_eq!(oracle(&g, &q), Winner::Unknown);
}

#[test]
fn fig3_last_disjunct_alone() {
    let g = fixtures::fig3();
    let q = parse_query(fixtures::FIG3_PHI4, &g).unwrap();
    let expected = oracle(&g, &q);
    assert_ne!(expected, Winner::Unknown);
    assert_eq!(solve(&g, &q, &SolverConfig::default()).unwrap().winner, expected);
    assert_eq!(classify(&parse_query(&fixtures::fig3_query_text(), &g).unwrap()), FragmentClass::General);
}

#[test]
fn negated_conjunction_is_equivalent_on_every_strategy_pair() {
    let g = parse_game(
        "game tri\nstate a p1\nstate b p2\nstate c chance\ninit a\n\
         edge a b\nedge a c\nedge b a\nedge b c\nprob c a 1/2\nprob c c 1/2\n",
    )
    .unwrap();
    let q = parse_query("!(AS F {b} & NZ F {c})", &g).unwrap();
    let normal = negate_normalize(&q);
    assert_eq!(normal, parse_query("NZ G ~{b} | AS G ~{c}", &g).unwrap());
    let sigmas = enumerate_strategies(&g, &StrategyClass::new(Owner::P1, MemoryKind::VisitedSet, true), 4096).unwrap();
    let taus = enumerate_strategies(&g, &StrategyClass::new(Owner::P2, MemoryKind::VisitedSet, true), 4096).unwrap();
    let mut both = [0, 0];
    for sigma in &sigmas {
        for tau in &taus {
            let chain = induced_chain(&g, sigma, tau, 1 << 10).unwrap();
            let holds = chain.eval(&q);
            assert_eq!(holds, chain.eval(&normal));
            both[holds as usize] += 1;
        }
    }
    assert!(both[0] > 0 && both[1] > 0, "both outcomes occur: {both:?}");
}

#[test]
fn uniform_choice_reaches_s2_with_probability_one_half() {
    let g = fixtures::fig1();
    let id = |s| g.state_id(s).unwrap();
    let mut sigma = Strategy::new(Owner::P1, Memory::Memoryless);
    sigma.set_uniform(0, id("s0"), &[id("s1"), id("s2")]);
    let mut tau = Strategy::new(Owner::P2, Memory::Memoryless);
    tau.set_dirac(0, id("s1"), id("s4"));
    let chain = induced_chain(&g, &sigma, &tau, 64).unwrap();
    let s2 = g.set_of(&["s2"]).unwrap();
    assert_eq!(chain.reach_probability(&s2), BigRational::new(1.into(), 2.into()));
}
