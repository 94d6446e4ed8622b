use std::path::PathBuf;
use std::process::{Command, Output};

fn poipg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_poipg"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("poipg-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &std::path::Path, name: &str, contents: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_string_lossy().into_owned()
}

const SELECTION_COLLIDER: &str = r#"{"variables":[{"name":"A","role":"observed"},{"name":"B","role":"observed"},{"name":"S","role":"selection"}],"edges":[["A","S"],["B","S"]]}"#;

#[test]
fn discover_to_stdout_and_query_exit_codes() {
    let dir = scratch("query");
    let ci = write(&dir, "c1.txt", "vars A,B\n");
    let out = poipg(&["discover", "--ci", &ci]);
    assert_eq!(out.status.code(), Some(0));
    let json = String::from_utf8(out.stdout).unwrap();
    assert!(json.contains("\"mark_a\": \"circle\""));
    let p = write(&dir, "p1.json", &json);

    let none = poipg(&["query", "cause", "--poipg", &p, "--from", "A", "--to", "B"]);
    assert_eq!(none.status.code(), Some(3));
    assert!(none.stdout.is_empty());

    let blocked = poipg(&["query", "blocked", "--poipg", &p, "--from", "A", "--to", "B"]);
    assert_eq!(blocked.status.code(), Some(3));

    let bad = poipg(&["query", "cause", "--poipg", &p, "--from", "A", "--to", "Q"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`Q`"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(poipg(&[]).status.code(), Some(1));
    assert_eq!(poipg(&["discover"]).status.code(), Some(1));
    assert_eq!(
        poipg(&["discover", "--ci", "x", "--graph", "y"]).status.code(),
        Some(1)
    );
    assert_eq!(
        poipg(&["discover", "--ci", "/nonexistent/file.txt"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(poipg(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = scratch("parse");
    let ci = write(&dir, "bad.txt", "indep A ; B ; -\nindep A B\n");
    let out = poipg(&["discover", "--ci", &ci]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn data_errors_exit_four() {
    let dir = scratch("data");
    let empty = write(&dir, "d.csv", "#arity A=2 B=2\nA,B\n");
    let out = poipg(&["discover", "--data", &empty]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let outside = write(&dir, "e.csv", "#arity A=2 B=2\nA,B\n0,1\n1,2\n");
    let out = poipg(&["discover", "--data", &outside]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn data_arity_from_flag() {
    let dir = scratch("arity");
    let mut text = String::from("A,B\n");
    for i in 0..400 {
        text.push_str(&format!("{},{}\n", i % 2, (i / 2) % 3));
    }
    let csv = write(&dir, "d.csv", &text);
    let missing = poipg(&["discover", "--data", &csv, "--arity", "A=2"]);
    assert_eq!(missing.status.code(), Some(1));
    let ok = poipg(&["discover", "--data", &csv, "--arity", "A=2", "--arity", "B=3"]);
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let p = poipg::io::parse_poipg(&ok.stdout).unwrap();
    assert!(p.edges().is_empty());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn dsep_and_inducing_on_selection_collider() {
    let dir = scratch("graph");
    let g = write(&dir, "g.json", SELECTION_COLLIDER);
    let plain = poipg(&["dsep", "--graph", &g, "--x", "A", "--z", "B"]);
    assert_eq!(String::from_utf8(plain.stdout).unwrap(), "true\n");
    let observable = poipg(&["dsep", "--graph", &g, "--x", "A", "--z", "B", "--observable"]);
    assert_eq!(String::from_utf8(observable.stdout).unwrap(), "false\n");

    let ind = poipg(&["inducing", "--graph", &g, "--a", "A", "--b", "B"]);
    assert_eq!(ind.status.code(), Some(0));
    assert_eq!(String::from_utf8(ind.stdout).unwrap(), "true\nA=out B=out\n");

    let latent = poipg(&["inducing", "--graph", &g, "--a", "A", "--b", "S"]);
    assert_eq!(latent.status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn verify_reports_and_exit_codes() {
    let dir = scratch("verify");
    let c1 = write(&dir, "c1.txt", "vars A,B\n");
    let ok = poipg(&[
        "verify",
        "--ci",
        &c1,
        "--obs",
        "2",
        "--max-latent",
        "1",
        "--max-sel",
        "1",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.starts_with("CLASS size="));
    assert!(text.contains("bounds=(2,1,1)"));
    assert!(text.ends_with("RESULT pass\n"));
    assert!(String::from_utf8_lossy(&ok.stderr).starts_with("elapsed "));

    let c3 = write(&dir, "c3.txt", "indep D ; A,B ; -\nindep A ; C,D ; -\n");
    let empty = poipg(&["verify", "--ci", &c3, "--obs", "4"]);
    assert_eq!(empty.status.code(), Some(2));
    assert_eq!(
        String::from_utf8(empty.stdout).unwrap(),
        "CLASS size=0 bounds=(4,0,0)\nRESULT fail\n"
    );

    let guard = poipg(&[
        "verify",
        "--ci",
        &c3,
        "--obs",
        "4",
        "--max-latent",
        "4",
        "--max-sel",
        "1",
    ]);
    assert_eq!(guard.status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn discover_from_graph_writes_dot_and_trace() {
    let dir = scratch("dot");
    let g = write(&dir, "g.json", SELECTION_COLLIDER);
    let out = dir.join("p.json").to_string_lossy().into_owned();
    let dot = dir.join("p.dot").to_string_lossy().into_owned();
    let trace = dir.join("t.log").to_string_lossy().into_owned();
    let r = poipg(&[
        "discover", "--graph", &g, "--out", &out, "--dot", &dot, "--trace", &trace,
    ]);
    assert_eq!(r.status.code(), Some(0));
    assert!(r.stdout.is_empty());
    let dot = std::fs::read_to_string(&dot).unwrap();
    assert!(dot.contains("\"A\" -> \"B\" [dir=both, arrowtail=odot, arrowhead=odot];"));
    assert_eq!(std::fs::read_to_string(&trace).unwrap(), "RESET\n");
    std::fs::remove_dir_all(dir).unwrap();
}
