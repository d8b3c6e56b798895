use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_disco-jp"));
    c.env_remove("DISCO_JP_LEXICON");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn sentences_file(lines: &[&str]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for l in lines {
        writeln!(f, "{l}").unwrap();
    }
    f
}

#[test]
fn check_grammatical_prints_residue_and_links() {
    let o = run(&["check", "彼", "が", "走った"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "s_2\nlinks: (0,1) (2,3)\n");
}

#[test]
fn check_accepts_one_quoted_string_and_romaji() {
    let a = run(&["check", "彼 が 走った"]);
    let b = run(&["check", "kare", "ga", "hashitta"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn check_ungrammatical_exits_one_and_echoes() {
    let o = run(&["check", "走った", "彼", "が"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("走った 彼 が"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_token_exits_one_naming_it() {
    let o = run(&["check", "彼", "が", "xyzzy"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("xyzzy"));
}

#[test]
fn missing_lexicon_exits_two() {
    let o = run(&["check", "--lexicon", "missing.json", "彼", "が", "走った"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing.json"));
}

#[test]
fn invalid_lexicon_exits_two() {
    let f = sentences_file(&["{ not json"]);
    let o = run(&["check", "--lexicon", f.path().to_str().unwrap(), "彼"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn lexicon_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("en.json");
    std::fs::write(&path, disco_jp::lexicon::EN_DEMO_JSON).unwrap();
    let o = bin()
        .env("DISCO_JP_LEXICON", &path)
        .args(["check", "Alice", "loves", "Bob"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "s\nlinks: (0,1) (3,4)\n");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec![],
        vec!["check"],
        vec!["frobnicate"],
        vec!["check", "--format", "png", "彼", "が", "走った"],
        vec!["check", "--format", "dot", "彼", "が", "走った"],
        vec!["check", "--target", "zz", "彼", "が", "走った"],
        vec!["check", "--max-parses", "0", "彼", "が", "走った"],
        vec!["eval", "--dim", "0", "彼", "が", "走った"],
        vec!["eval", "--dim", "9", "彼", "が", "走った"],
        vec!["eval", "--compare", "彼 が 走った"],
        vec!["circuit", "/nonexistent/sentences.txt"],
        vec!["diagram"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn check_json_has_schema_version() {
    let o = run(&["check", "--format", "json", "私", "が", "猫", "を", "渡す"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["results"][0]["residue"], "s_1");
}

#[test]
fn check_target_flag() {
    assert_eq!(
        code(&run(&["check", "--target", "s_2", "彼", "が", "走った"])),
        0
    );
    assert_eq!(
        code(&run(&["check", "--target", "s_1", "彼", "が", "走った"])),
        1
    );
}

#[test]
fn check_file_reports_each_line() {
    let f = sentences_file(&["彼 が 走った", "", "走った 彼 が"]);
    let o = run(&["check", "--file", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let out = stdout(&o);
    assert!(out.contains("彼 が 走った\ts_2"));
    assert!(out.contains("走った 彼 が\tnot grammatical"));
}

#[test]
fn insert_copula_flag() {
    let plain = run(&["check", "私", "は", "オレンジ", "色", "が", "好き"]);
    assert_eq!(code(&plain), 1);
    let fixed = run(&[
        "check",
        "--insert-copula",
        "私",
        "は",
        "オレンジ",
        "色",
        "が",
        "好き",
    ]);
    assert_eq!(code(&fixed), 0, "{}", stderr(&fixed));
    assert!(stdout(&fixed).starts_with("s\u{304}\n"));
}

#[test]
fn parse_lists_roles() {
    let o = run(&[
        "parse",
        "かれ",
        "は",
        "薬",
        "を",
        "付ける",
        "こと",
        "を",
        "決めた",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("engine: 決めた"));
    assert!(out.contains("topic: かれ"));
    assert!(out.contains("objects: 薬,こと"));
    let j = run(&["parse", "--format", "json", "彼", "が", "走った"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["sentences"][0]["parses"].as_array().unwrap().len(), 1);
}

#[test]
fn diagram_formats() {
    for (format, marker) in [
        ("json", "\"schema_version\""),
        ("dot", "graph diagram {"),
        ("ascii", "走った"),
        ("svg", "<svg"),
    ] {
        let o = run(&["diagram", "--format", format, "彼", "が", "走った"]);
        assert_eq!(code(&o), 0, "{format}");
        assert!(stdout(&o).contains(marker), "{format}");
    }
    assert_eq!(code(&run(&["diagram", "走った", "彼", "が"])), 1);
}

#[test]
fn diagram_json_parses_back() {
    let o = run(&["diagram", "--format", "json", "彼", "が", "走った"]);
    let d = disco_jp::diagram::Diagram::from_json(&stdout(&o)).unwrap();
    assert_eq!(d.to_json(), stdout(&o));
    assert_eq!(d.boxes().len(), 3);
}

#[test]
fn circuit_from_file() {
    let f = sentences_file(&["かれ は 薬 を 付ける こと を 決めた"]);
    let o = run(&[
        "circuit",
        "--primary",
        "かれ,薬,こと",
        "--format",
        "json",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = disco_jp::circuit::DiscourseSession::from_json(&stdout(&o)).unwrap();
    assert_eq!(s.schema_version, 1);
    assert_eq!(s.wires.len(), 3);
    assert_eq!(s.live_wires(), vec![0, 1]);
    let ascii = run(&[
        "circuit",
        "--primary",
        "かれ,薬,こと",
        f.path().to_str().unwrap(),
    ]);
    assert!(stdout(&ascii).contains("決めた"));
    let svg = run(&["circuit", "--format", "svg", f.path().to_str().unwrap()]);
    assert_eq!(code(&svg), 2);
}

#[test]
fn circuit_from_stdin() {
    let mut child = bin()
        .args(["circuit", "--format", "json", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all("彼 が 走った\n".as_bytes())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("走った"));
}

#[test]
fn circuit_errors() {
    let bad = sentences_file(&["彼 が 走った", "走った 彼 が"]);
    let o = run(&["circuit", bad.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("走った 彼 が"));
    let good = sentences_file(&["彼 が 走った"]);
    let o = run(&["circuit", "--primary", "猫", good.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn insert_topic_in_circuits() {
    let f = sentences_file(&["それ は もう 決まった", "走った"]);
    let plain = run(&["circuit", "--format", "json", f.path().to_str().unwrap()]);
    assert_eq!(code(&plain), 1);
    let o = run(&[
        "circuit",
        "--insert-topic",
        "--format",
        "json",
        f.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = disco_jp::circuit::DiscourseSession::from_json(&stdout(&o)).unwrap();
    assert_eq!(s.layers[1].topic.as_deref(), Some("それ"));
    assert_eq!(s.layers[1].gates[0].label, "走った");
}

#[test]
fn eval_compare_self_is_one() {
    let o = run(&[
        "eval",
        "--dim",
        "2",
        "--seed",
        "7",
        "--compare",
        "彼 が 走った",
        "彼 が 走った",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(stdout(&o), "1.0\n");
}

#[test]
fn eval_vector() {
    let o = run(&["eval", "--dim", "3", "彼", "が", "走った"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).split_whitespace().count(), 3);
    let j = run(&["eval", "--format", "json", "--seed", "5", "彼 が 走った"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["shape"], serde_json::json!([4]));
    let other_seed = run(&["eval", "--format", "json", "--seed", "6", "彼 が 走った"]);
    assert_ne!(j.stdout, other_seed.stdout);
    assert_eq!(code(&run(&["eval", "走った", "彼", "が"])), 1);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let f = sentences_file(&["私 は オレンジ 色 が 好き だ", "それ が もう 決まった"]);
    let path = f.path().to_str().unwrap().to_string();
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "check",
            "--format",
            "json",
            "かれ",
            "は",
            "薬",
            "を",
            "付ける",
            "こと",
            "を",
            "決めた",
        ],
        vec!["parse", "私", "は", "オレンジ", "色", "が", "好き", "だ"],
        vec![
            "diagram", "--format", "json", "私", "が", "猫", "を", "渡す",
        ],
        vec!["diagram", "--format", "dot", "私", "が", "猫", "を", "渡す"],
        vec!["diagram", "--format", "svg", "私", "が", "猫", "を", "渡す"],
        vec!["diagram", "私", "が", "猫", "を", "渡す"],
        vec!["circuit", "--format", "json", &path],
        vec!["circuit", "--format", "dot", &path],
        vec!["eval", "--seed", "3", "それ", "が", "もう", "決まった"],
    ];
    for args in invocations {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0, "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}
