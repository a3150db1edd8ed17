mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qualgame_core::dqbf::{dqbf_skolem, parse_dqbf, reduce_to_game, DEFAULT_VAR_CAP};
use qualgame_core::oracle::{
    brute_force_winner, query_targets, MemoryKind, OracleConfig, OracleVerdict, StrategyClass,
};
use qualgame_core::query::fragment_labels;
use qualgame_core::sigma_bar::{verify_strategy, Adversary};
use qualgame_core::strategy::{parse_strategy, Strategy};
use qualgame_core::{
    classify, fixtures, goal_unfold, parse_game_with_notes, parse_query, parse_query_free, single_region, solve,
    write_game, Error, Owner, Query, SolverConfig, StateSet, StochasticGame,
};

use report::Report;

#[derive(Parser)]
#[command(name = "qualgame", version, about = "Qualitative multi-objective stochastic game solver")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a game file.
    Validate { game: PathBuf },
    /// Winning region of a single objective.
    Region {
        game: PathBuf,
        /// Atom such as `AS F {s3}`, quoted or as separate words.
        #[arg(long, num_args = 1.., required = true, allow_hyphen_values = true)]
        atom: Vec<String>,
    },
    /// Decide the winner of a query.
    Solve {
        game: PathBuf,
        #[arg(long)]
        query: String,
        #[command(flatten)]
        caps: SolverCaps,
    },
    /// Fragment of a query.
    Classify {
        #[arg(long)]
        query: String,
    },
    /// Size of the goal unfolding for some target sets.
    Unfold {
        game: PathBuf,
        /// Target sets such as `{s3}` or `~{s0}`.
        #[arg(long, num_args = 1.., required = true)]
        targets: Vec<String>,
        #[arg(long, default_value_t = SolverConfig::default().unfold_cap)]
        unfold_cap: usize,
    },
    /// Brute-force winner within bounded strategy classes.
    Oracle {
        game: PathBuf,
        #[arg(long)]
        query: String,
        /// memoryless | target-set | visited-set | explicit:K
        #[arg(long, default_value = "memoryless")]
        mem1: String,
        #[arg(long, default_value = "memoryless")]
        mem2: String,
        /// Only deterministic strategies.
        #[arg(long)]
        deterministic: bool,
        #[command(flatten)]
        caps: OracleCaps,
    },
    /// Check a strategy against every adversary of a memory class.
    Verify {
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long)]
        query: String,
        /// memoryless | visited-set | explicit:K
        #[arg(long, default_value = "visited-set")]
        adversary: String,
        #[command(flatten)]
        caps: OracleCaps,
    },
    /// Satisfiability of a DQBF by Skolem-function enumeration.
    DqbfSat {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_VAR_CAP)]
        var_cap: usize,
    },
    /// Reduce a DQBF to a game and query.
    DqbfReduce {
        file: PathBuf,
        /// Where to write the game.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Write a built-in example game (fig1, fig2, fig3).
    Examples {
        name: String,
        /// Write to a file instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the example's strategy instead of the game.
        #[arg(long)]
        strategy: bool,
    },
}

#[derive(Args)]
struct SolverCaps {
    #[arg(long, default_value_t = SolverConfig::default().dnf_cap)]
    dnf_cap: usize,
    #[arg(long, default_value_t = SolverConfig::default().subset_cap)]
    subset_cap: usize,
    #[arg(long, default_value_t = SolverConfig::default().unfold_cap)]
    unfold_cap: usize,
    #[arg(long, default_value_t = SolverConfig::default().search_budget)]
    search_budget: usize,
    /// Use the all-bits goal in the unfolding search.
    #[arg(long)]
    all_bits_goal: bool,
}

impl SolverCaps {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            dnf_cap: self.dnf_cap,
            subset_cap: self.subset_cap,
            unfold_cap: self.unfold_cap,
            search_budget: self.search_budget,
            all_bits_goal: self.all_bits_goal,
        }
    }
}

#[derive(Args)]
struct OracleCaps {
    #[arg(long, default_value_t = OracleConfig::default().max_states)]
    max_states: usize,
    #[arg(long, default_value_t = OracleConfig::default().max_targets)]
    max_targets: usize,
    #[arg(long, default_value_t = OracleConfig::default().eval_budget)]
    eval_budget: usize,
    #[arg(long, default_value_t = OracleConfig::default().class_cap)]
    class_cap: usize,
    #[arg(long, default_value_t = OracleConfig::default().chain_cap)]
    chain_cap: usize,
}

impl OracleCaps {
    fn config(&self) -> OracleConfig {
        OracleConfig {
            eval_budget: self.eval_budget,
            chain_cap: self.chain_cap,
            class_cap: self.class_cap,
            max_states: self.max_states,
            max_targets: self.max_targets,
        }
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn load_game(path: &Path, report: &mut Report) -> Result<StochasticGame, Error> {
    let text = read(path)?;
    report.input("game", &path.display().to_string(), text.as_bytes());
    let (g, notes) = parse_game_with_notes(&text)?;
    for n in notes {
        report.note(n);
    }
    Ok(g)
}

fn load_query(text: &str, g: &StochasticGame, report: &mut Report) -> Result<Query, Error> {
    report.input("query", &format!("{text:?}"), text.as_bytes());
    parse_query(text, g)
}

fn parse_target(text: &str, g: &StochasticGame) -> Result<StateSet, Error> {
    match parse_query(&format!("NZ F {text}"), g)? {
        Query::Atom(a) => Ok(a.target),
        _ => Err(Error::Invalid(format!("`{text}` is not a state set"))),
    }
}

fn memory_kind(text: &str, q: &Query) -> Result<MemoryKind, Error> {
    match text {
        "memoryless" => Ok(MemoryKind::Memoryless),
        "target-set" => Ok(MemoryKind::TargetSets(query_targets(q))),
        "visited-set" => Ok(MemoryKind::VisitedSet),
        _ => match text.strip_prefix("explicit:").and_then(|k| k.parse::<usize>().ok()) {
            Some(k) if k >= 1 => Ok(MemoryKind::Explicit(k)),
            _ => Err(Error::Invalid(format!(
                "unknown memory kind `{text}` (memoryless, target-set, visited-set, explicit:K)"
            ))),
        },
    }
}

fn adversary(text: &str) -> Result<Adversary, Error> {
    match memory_kind(text, &Query::And(Vec::new()))? {
        MemoryKind::Memoryless => Ok(Adversary::Memoryless),
        MemoryKind::VisitedSet => Ok(Adversary::VisitedSet),
        MemoryKind::Explicit(k) => Ok(Adversary::Explicit(k)),
        MemoryKind::TargetSets(_) => {
            Err(Error::Invalid("adversaries use memoryless, visited-set or explicit:K".into()))
        }
    }
}

fn strategy_lines(g: &StochasticGame, s: &Strategy) -> Value {
    let lines = s.describe(g);
    if lines.is_empty() {
        json!(["(first successor everywhere)"])
    } else {
        json!(lines)
    }
}

fn oracle_report(report: &mut Report, g: &StochasticGame, v: &OracleVerdict) {
    report.put("outcome", format!("{:?}", v.outcome));
    report.put("scope", "evidence within enumerated classes");
    report.put("evaluations", v.evaluations);
    if let Some(w) = &v.witness {
        report.put("witness.player", w.player.keyword());
        report.put("witness.moves", strategy_lines(g, w));
    }
    if let Some(m) = &v.matrix {
        let rows: Vec<Value> = m.rows.iter().map(|s| strategy_lines(g, s)).collect();
        let cols: Vec<Value> = m.cols.iter().map(|s| strategy_lines(g, s)).collect();
        let table: Vec<String> =
            m.holds.iter().map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect()).collect();
        report.put("matrix.sigma", Value::Array(rows));
        report.put("matrix.tau", Value::Array(cols));
        report.put("matrix.holds", json!(table));
    }
}

fn run(cli: &Cli, report: &mut Report) -> Result<(), Error> {
    match &cli.command {
        Command::Validate { game } => {
            let g = load_game(game, report)?;
            report.put("name", g.name());
            report.put("states", g.num_states());
            for o in [Owner::P1, Owner::P2, Owner::Chance] {
                report.put(&format!("owned.{}", o.keyword()), g.owned_by(o).count());
            }
            report.put("transitions", g.states().map(|s| g.successors(s).len()).sum::<usize>());
            report.put("init", g.state_name(g.init()));
            report.put("valid", true);
        }
        Command::Region { game, atom } => {
            let g = load_game(game, report)?;
            let atom = atom.join(" ");
            let q = load_query(&atom, &g, report)?;
            let Query::Atom(a) = q else {
                return Err(Error::Invalid(format!("`{atom}` is not a single atom")));
            };
            let r = single_region(&g, &a);
            report.put("atom", a.to_text(g.state_names()));
            report.put("region", json!(g.set_names(&r.states)));
            report.put("init_wins", r.states.contains(g.init()));
        }
        Command::Solve { game, query, caps } => {
            let g = load_game(game, report)?;
            let q = load_query(query, &g, report)?;
            let r = solve(&g, &q, &caps.config())?;
            report.put("winner", r.winner.to_string());
            report.put("fragment", r.fragment.to_string());
            report.put("evidence", serde_json::to_value(&r.evidence).expect("evidence serializes"));
        }
        Command::Classify { query } => {
            report.input("query", &format!("{query:?}"), query.as_bytes());
            let (q, _) = parse_query_free(query)?;
            report.put("fragment", classify(&q).to_string());
            let labels: Vec<String> = fragment_labels(&q).iter().map(|f| f.to_string()).collect();
            report.put("labels", json!(labels));
            report.put("determined", classify(&q).is_determined());
            report.put("atoms", q.atoms().len());
        }
        Command::Unfold { game, targets, unfold_cap } => {
            let g = load_game(game, report)?;
            let sets = targets.iter().map(|t| parse_target(t, &g)).collect::<Result<Vec<_>, _>>()?;
            let u = goal_unfold(&g, &sets, *unfold_cap)?;
            report.put("targets", json!(sets.iter().map(|t| g.format_set(t)).collect::<Vec<_>>()));
            report.put("nodes", u.num_nodes());
            report.put("transitions", u.game.states().map(|s| u.game.successors(s).len()).sum::<usize>());
            let full = (1u32 << sets.len()) - 1;
            report.put("nodes_all_bits", u.with_bits(full).len());
        }
        Command::Oracle { game, query, mem1, mem2, deterministic, caps } => {
            let g = load_game(game, report)?;
            let q = load_query(query, &g, report)?;
            let k1 = memory_kind(mem1, &q)?;
            let k2 = memory_kind(mem2, &q)?;
            report.put("class.p1", k1.label());
            report.put("class.p2", k2.label());
            report.put("randomized", !deterministic);
            let c1 = StrategyClass::new(Owner::P1, k1, !deterministic);
            let c2 = StrategyClass::new(Owner::P2, k2, !deterministic);
            let v = brute_force_winner(&g, &q, &c1, &c2, &caps.config())?;
            oracle_report(report, &g, &v);
        }
        Command::Verify { game, strategy, query, adversary: adv, caps } => {
            let g = load_game(game, report)?;
            let text = read(strategy)?;
            report.input("strategy", &strategy.display().to_string(), text.as_bytes());
            let sigma = parse_strategy(&text, &g)?;
            let q = load_query(query, &g, report)?;
            let adv = adversary(adv)?;
            let r = verify_strategy(&g, &sigma, &q, adv, &caps.config())?;
            report.put("adversary", memory_kind_label(adv));
            report.put("holds", r.holds);
            report.put("status", if r.evidence_only { "bounded-adversary evidence" } else { "proof" });
            report.put("evaluations", r.evaluations);
            if let Some(c) = &r.counterexample {
                report.put("counterexample.player", c.player.keyword());
                report.put("counterexample.moves", strategy_lines(&g, c));
            }
        }
        Command::DqbfSat { file, var_cap } => {
            let text = read(file)?;
            report.input("dqbf", &file.display().to_string(), text.as_bytes());
            let f = parse_dqbf(&text)?;
            let skolem = dqbf_skolem(&f, *var_cap)?;
            report.put("universals", f.n());
            report.put("existentials", f.m());
            report.put("result", if skolem.is_some() { "SAT" } else { "UNSAT" });
            if let Some(tables) = skolem {
                for (j, t) in tables.iter().enumerate() {
                    let width = 1usize << f.deps[j].len();
                    let bits: String = (0..width).map(|i| if (t >> i) & 1 == 1 { '1' } else { '0' }).collect();
                    report.put(&format!("skolem.{}", f.existentials[j]), bits);
                }
            }
        }
        Command::DqbfReduce { file, output } => {
            let text = read(file)?;
            report.input("dqbf", &file.display().to_string(), text.as_bytes());
            let f = parse_dqbf(&text)?;
            let r = reduce_to_game(&f)?;
            let game_text = write_game(&r.game);
            write(output, &game_text)?;
            report.put("output", output.display().to_string());
            report.put("output_digest", report::digest(game_text.as_bytes()));
            report.put("states", r.game.num_states());
            report.put("branches", r.branches.len());
            report.put("fragment", classify(&r.query).to_string());
            report.put("query", r.query.to_text(r.game.state_names()));
        }
        Command::Examples { name, output, strategy } => {
            let text = example_text(name, *strategy)?;
            match output {
                Some(path) => {
                    write(path, &text)?;
                    report.put("example", name.as_str());
                    report.put("output", path.display().to_string());
                    report.put("output_digest", report::digest(text.as_bytes()));
                }
                None => {
                    print!("{text}");
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

fn memory_kind_label(a: Adversary) -> String {
    a.kind().label()
}

fn example_text(name: &str, strategy: bool) -> Result<String, Error> {
    let unknown = || Error::Invalid(format!("unknown example `{name}` (choose from {})", fixtures::NAMES.join(", ")));
    if strategy {
        return match name {
            "fig2" => Ok(fixtures::FIG2_STRATEGY.to_string()),
            "fig3" => Ok(fixtures::FIG3_STRATEGY.to_string()),
            "fig1" => Err(Error::Invalid("fig1 has no built-in strategy".into())),
            _ => Err(unknown()),
        };
    }
    let game = fixtures::example(name).filter(|_| fixtures::NAMES.contains(&name)).ok_or_else(unknown)?;
    let queries: Vec<String> = match name {
        "fig1" => [fixtures::FIG1_QUERY, fixtures::FIG1_QUERY_AS, fixtures::FIG1_QUERY_NZ].map(String::from).to_vec(),
        "fig2" => vec![fixtures::FIG2_QUERY.to_string()],
        _ => vec![fixtures::fig3_query_text()],
    };
    let mut text: String = queries.iter().map(|q| format!("# query: {q}\n")).collect();
    text.push_str(game);
    Ok(text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let name = match &cli.command {
        Command::Validate { .. } => "validate",
        Command::Region { .. } => "region",
        Command::Solve { .. } => "solve",
        Command::Classify { .. } => "classify",
        Command::Unfold { .. } => "unfold",
        Command::Oracle { .. } => "oracle",
        Command::Verify { .. } => "verify",
        Command::DqbfSat { .. } => "dqbf-sat",
        Command::DqbfReduce { .. } => "dqbf-reduce",
        Command::Examples { .. } => "examples",
    };
    let mut report = Report::new(name);
    let outcome = run(&cli, &mut report);
    for d in report.diagnostics() {
        eprintln!("note: {d}");
    }
    match outcome {
        Ok(()) => {
            if !matches!(&cli.command, Command::Examples { output: None, .. }) {
                print!("{}", if cli.json { report.to_json() } else { report.to_text() });
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
