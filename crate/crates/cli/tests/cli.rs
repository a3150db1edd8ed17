use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qualgame_core::{parse_game, parse_query};

fn qualgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qualgame")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(&format!("{key}: "))).unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

fn write_example(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.game"));
    let p = path.to_str().unwrap().to_string();
    let o = qualgame(&["examples", name, "-o", &p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn examples_validate_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (name, states) in [("fig1", 5), ("fig2", 8), ("fig3", 8)] {
        let p = write_example(dir.path(), name);
        let o = qualgame(&["validate", &p]);
        assert_eq!(o.status.code(), Some(0));
        let out = stdout(&o);
        assert_eq!(field(&out, "states"), states.to_string());
        assert_eq!(field(&out, "valid"), "true");
        let g = parse_game(&fs::read_to_string(&p).unwrap()).unwrap();
        let printed = qualgame(&["examples", name]);
        assert_eq!(parse_game(&stdout(&printed)).unwrap(), g);
    }
}

#[test]
fn solve_reports_on_fig1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), "fig1");
    let out = stdout(&qualgame(&["solve", &p, "--query", "NZ F {s2} & NZ F {s4}"]));
    assert_eq!(field(&out, "winner"), "Player2");
    assert_eq!(field(&out, "fragment"), "ConjunctionASNZ");

    let o = qualgame(&["solve", &p, "--query", "AS F {s3} | (NZ F {s2} & NZ F {s4})"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "winner"), "Unknown");
    assert_eq!(field(&out, "fragment"), "GeneralNoNZSafe");
    assert!(field(&out, "evidence.hint").contains("oracle"));
}

#[test]
fn oracle_and_verify_on_fig2() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), "fig2");
    let strat = dir.path().join("fig2.strategy");
    let o = qualgame(&["examples", "fig2", "--strategy", "-o", strat.to_str().unwrap()]);
    assert!(o.status.success());
    let q = "(NZ F {A} & NZ F {B}) | (AS F {B, D} & NZ F {D}) | (AS F {A, C} & NZ F {C})";

    let out = stdout(&qualgame(&["oracle", &p, "--query", q, "--mem1", "memoryless", "--mem2", "visited-set"]));
    assert_eq!(field(&out, "outcome"), "NoWinnerInClass");
    let out = stdout(&qualgame(&["oracle", &p, "--query", q, "--mem1", "visited-set", "--mem2", "visited-set"]));
    assert_eq!(field(&out, "outcome"), "Player1WinsInClass");

    let out = stdout(&qualgame(&["verify", &p, "--strategy", strat.to_str().unwrap(), "--query", q]));
    assert_eq!(field(&out, "holds"), "true");
}

#[test]
fn dqbf_commands() {
    let dir = tempfile::tempdir().unwrap();
    let tiny = dir.path().join("tiny.dqbf");
    fs::write(&tiny, "forall x1\nexists y1 deps {x1}\nmatrix (x1 & y1) | (!x1 & !y1)\n").unwrap();
    let out = stdout(&qualgame(&["dqbf-sat", tiny.to_str().unwrap()]));
    assert_eq!(field(&out, "result"), "SAT");

    let constant = dir.path().join("constant.dqbf");
    fs::write(&constant, "forall x1\nexists y1 deps {}\nmatrix (x1 & y1) | (!x1 & !y1)\n").unwrap();
    assert_eq!(field(&stdout(&qualgame(&["dqbf-sat", constant.to_str().unwrap()])), "result"), "UNSAT");

    let game = dir.path().join("tiny.game");
    let o = qualgame(&["dqbf-reduce", tiny.to_str().unwrap(), "-o", game.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let g = parse_game(&fs::read_to_string(&game).unwrap()).unwrap();
    assert_eq!(g.num_states(), 1 + 3 * 2);
    assert_eq!(field(&out, "states"), "7");
    parse_query(field(&out, "query"), &g).unwrap();
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), "fig1");
    for json in [false, true] {
        let mut args = vec!["oracle", &p, "--query", "AS F {s3} | (NZ F {s2} & NZ F {s4})"];
        if json {
            args.push("--json");
        }
        let a = qualgame(&args);
        let b = qualgame(&args);
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn json_report_has_inputs_and_result() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), "fig1");
    let o = qualgame(&["--json", "region", &p, "--atom", "NZ", "F", "{s2}"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "region");
    assert!(v["inputs"]["game"].as_str().unwrap().contains("sha256:"));
    assert_eq!(v["result"]["region"], serde_json::json!(["s0", "s2"]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_example(dir.path(), "fig3");
    assert_eq!(qualgame(&["--help"]).status.code(), Some(0));
    assert_eq!(qualgame(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(qualgame(&["solve", &p, "--query", "AS F {nowhere}"]).status.code(), Some(1));
    let bad = dir.path().join("bad.game");
    fs::write(&bad, "state c chance\ninit c\nprob c c 1/3\n").unwrap();
    let o = qualgame(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    let q = fixtures_query(&p);
    let o = qualgame(&["oracle", &p, "--query", &q, "--mem1", "explicit:3", "--eval-budget", "100"]);
    assert_eq!(o.status.code(), Some(2));
}

/// The first query listed in the header comments of an example file.
fn fixtures_query(path: &str) -> String {
    let text = fs::read_to_string(path).unwrap();
    text.lines().find_map(|l| l.strip_prefix("# query: ")).unwrap().to_string()
}
