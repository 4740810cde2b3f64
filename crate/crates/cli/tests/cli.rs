use std::io::{BufRead, BufReader};
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use preplay_core::NormalFormGame;

fn game(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../games").join(name)
}

fn preplay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preplay")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn open_interval_rejects_unit_discount() {
    let o = preplay(&["bargain", path(&game("pd2.game")), "--deltaA", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));
}

#[test]
fn malformed_games_exit_with_line_diagnostics() {
    let o = preplay(&["solve", path(&game("malformed.game"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 6"));
    let o = preplay(&["solve", "/nonexistent/file.game"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn incompatible_flags_are_refused() {
    let o = preplay(&["negotiate", path(&game("pd1.game")), "--mode", "ira", "--time-valuable"]);
    assert_eq!(o.status.code(), Some(2));
    let o = preplay(&["negotiate", path(&game("pd1.game")), "--mode", "png", "--delta", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = preplay(&["negotiate", path(&game("pd1.game")), "--mode", "png", "--strategies", "spe"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_reports_the_prisoners_dilemma() {
    let o = preplay(&["solve", path(&game("pd1.game"))]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("pure nash: (D,D) (1, 1) strict"), "{out}");
    assert!(out.contains("maximal: (C,C) (4, 4)"), "{out}");
    let o = preplay(&["solve", path(&game("worked53.game"))]);
    let out = stdout(&o);
    assert!(out.contains("pure nash: none") && out.contains("maxmin: (R2,C2)"), "{out}");
    assert!(out.contains("expected values: (4, 4)"), "{out}");
}

#[test]
fn disadvantage_game_with_column_first() {
    let o = preplay(&["negotiate", path(&game("disadvantage.game")), "--mode", "ira", "--first", "Col"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("solution: (R1,C2) (9, 5)"), "{out}");
}

#[test]
fn bargaining_reports_the_split() {
    let o = preplay(&["bargain", path(&game("pd2.game")), "--deltaA", "1/2", "--deltaB", "1/2"]);
    assert!(stdout(&o).contains("x*: (16/3, 8/3) (5.333, 2.667)"));
    let o = preplay(&["bargain", path(&game("pd2.game")), "--deltaA", "99/100", "--deltaB", "99/100", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["x_star"][0], "800/199");
}

#[test]
fn reports_are_reproducible() {
    let pd2 = game("pd2.game");
    let args = ["negotiate", path(&pd2), "--mode", "png", "--delta", "1/2", "--time-valuable", "--strategies", "spe,spe", "--json"];
    let (a, b) = (preplay(&args), preplay(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn negotiated_transcripts_replay_to_the_printed_game() {
    let o = preplay(&["negotiate", path(&game("pd1.game")), "--mode", "png", "--strategies", "greedy,passive", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("log.json");
    std::fs::write(&file, v["transcript"].to_string()).unwrap();
    let r = preplay(&["replay", file.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let out = stdout(&r);
    assert!(out.contains("matches recorded: yes"), "{out}");
    let final_game: NormalFormGame = serde_json::from_value(v["final_game"].clone()).unwrap();
    assert!(out.ends_with(&final_game.to_text()), "{out}");
}

#[test]
fn commands_reach_a_separately_started_service() {
    let mut server = Command::new(env!("CARGO_BIN_EXE_preplay"))
        .args(["serve", "--port", "0", "--game", path(&game("pd1.game"))])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(server.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let url = line.trim().strip_prefix("listening on ").unwrap().to_string();
    let o = preplay(&["--server", &url, "solve", path(&game("pd1.game"))]);
    server.kill().unwrap();
    server.wait().unwrap();
    assert!(o.status.success());
    assert!(stdout(&o).contains("(D,D)"));
}
