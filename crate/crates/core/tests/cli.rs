use std::path::Path;
use std::process::{Command, Output};

fn tunnelwg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tunnelwg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("t.txt");
    let index = dir.path().join("t.twgi");
    std::fs::write(&text, "abcabc").unwrap();

    let o = tunnelwg(&["build", path(&text), "-o", path(&index)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("n: 7\nn_t: 5\n"));

    let o = tunnelwg(&["count", path(&index), "abc"]);
    assert_eq!(stdout(&o), "2\n");
    let o = tunnelwg(&["count", path(&index), "abd"]);
    assert_eq!(stdout(&o), "0\n");
    let o = tunnelwg(&["locate", path(&index), "c"]);
    assert_eq!(stdout(&o), "3\n6\n");
    let o = tunnelwg(&["locate", path(&index), "c", "--limit", "1"]);
    assert_eq!(stdout(&o), "3\n");
    let o = tunnelwg(&["extract", path(&index), "2", "3"]);
    assert_eq!(stdout(&o), "bca");
    let o = tunnelwg(&["stats", path(&index)]);
    assert!(stdout(&o).contains("tunnels: 1\n"));
}

#[test]
fn errors_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("t.txt");
    let index = dir.path().join("t.twgi");
    std::fs::write(&text, "abcabc").unwrap();
    assert!(tunnelwg(&["build", path(&text), "-o", path(&index), "--no-tunnel"]).status.success());

    assert_eq!(tunnelwg(&["locate", path(&index), ""]).status.code(), Some(2));
    assert_eq!(tunnelwg(&["build", path(&text), "-o", path(&index), "--sample-rate", "0"]).status.code(), Some(2));
    assert_eq!(tunnelwg(&["extract", path(&index), "6", "2"]).status.code(), Some(1));
    assert_eq!(tunnelwg(&["count", path(&text), "a"]).status.code(), Some(1));

    let mut bytes = std::fs::read(&index).unwrap();
    bytes[10] ^= 1;
    std::fs::write(&index, bytes).unwrap();
    let o = tunnelwg(&["count", path(&index), "a"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));
}

#[test]
fn graph_commands() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.wg");
    let blocks = dir.path().join("b.txt");
    let out = dir.path().join("gt.wg");
    // The string graph of "abcabc".
    std::fs::write(&graph, "WG 7 6 3\n1 2 a\n2 4 b\n4 6 c\n6 3 a\n3 5 b\n5 7 c\n").unwrap();
    std::fs::write(&blocks, "BLOCK 2 2\n2 3\n4 5\n").unwrap();

    assert_eq!(stdout(&tunnelwg(&["graph", "validate", path(&graph)])), "OK\n");

    let o = tunnelwg(&["graph", "tunnel", path(&graph), "--blocks", path(&blocks), "-o", path(&out)]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o), "n: 7 -> 5\nm: 6 -> 5\n");
    assert_eq!(stdout(&tunnelwg(&["graph", "validate", path(&out)])), "OK\n");

    let o = tunnelwg(&["graph", "search", path(&graph), "bca", "--blocks", path(&blocks)]);
    assert!(o.status.success() && stdout(&o).starts_with("FOUND"));
    let o = tunnelwg(&["graph", "search", path(&graph), "cc"]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(1), "NOT FOUND\n".to_string()));

    let bad = dir.path().join("bad.wg");
    std::fs::write(&bad, "WG 3 2 2\n1 3 a\n2 2 b\n").unwrap();
    let o = tunnelwg(&["graph", "validate", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("VIOLATION"));

    std::fs::write(&blocks, "BLOCK 1 1\n9\n").unwrap();
    assert_eq!(tunnelwg(&["graph", "tunnel", path(&graph), "--blocks", path(&blocks), "-o", path(&out)]).status.code(), Some(1));
}
