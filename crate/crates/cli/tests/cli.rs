use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lcatsp"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn figure1_pipeline_two_classes_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "pipeline",
        s(&data("figure1.txt")),
        "--partition",
        s(&data("figure1_partition.txt")),
        "--out-dir",
        s(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["branch"], "weighted");
    assert_eq!(report["terminals"], serde_json::json!([2, 5]));
    assert_eq!(report["certificate"]["passed"], true);
    for f in [
        "graph.txt",
        "lp.txt",
        "terminals.txt",
        "split.txt",
        "partition.txt",
        "solution.txt",
        "report.json",
        "timings.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
}

#[test]
fn reports_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let graph = a.path().join("g.txt");
    let gen = run(&[
        "gen",
        "--family",
        "expensive-heavy",
        "--n",
        "25",
        "--seed",
        "11",
        "-o",
        s(&graph),
    ]);
    assert!(gen.status.success());
    for dir in [a.path(), b.path()] {
        let out = run(&[
            "pipeline",
            s(&graph),
            "--singletons",
            "--out-dir",
            s(dir),
            "--seed",
            "11",
        ]);
        assert!(out.status.success());
    }
    let ra = fs::read(a.path().join("report.json")).unwrap();
    let rb = fs::read(b.path().join("report.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn all_cheap_instance_reports_six_light() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "3 3 1 5\n0 1 0\n1 2 0\n2 0 0\n").unwrap();
    let out = run(&[
        "pipeline",
        s(&graph),
        "--singletons",
        "--out-dir",
        s(&dir.path().join("run")),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["branch"], "six-light");
    assert!(dir.path().join("run/lb.txt").exists());
}

#[test]
fn gen_is_deterministic() {
    let args = [
        "gen",
        "--family",
        "random-strong",
        "--n",
        "5",
        "--density",
        "0.3",
        "--seed",
        "7",
    ];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
    let one = stdout(&run(&[
        "gen",
        "--family",
        "figure1-gadgets",
        "--n",
        "6",
        "--w0",
        "1",
        "--w1",
        "2",
    ]));
    assert_eq!(
        one,
        fs::read_to_string(data("figure1.txt"))
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(|l| format!("{l}\n"))
            .collect::<String>()
    );
}

#[test]
fn stage_commands_chain_and_verify_catches_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let graph = data("figure1.txt");
    let part = data("figure1_partition.txt");
    assert!(run(&["solve-lp", s(&graph), "-o", s(&p("lp.txt"))])
        .status
        .success());
    let lp = fs::read_to_string(p("lp.txt")).unwrap();
    assert!(lp.lines().last().unwrap().starts_with("objective 8"));
    let t = run(&["find-terminals", s(&graph), s(&p("lp.txt"))]);
    assert!(stdout(&t).starts_with("T 2 5\n"));
    assert!(run(&[
        "split",
        s(&graph),
        s(&p("lp.txt")),
        "-o",
        s(&p("split.txt"))
    ])
    .status
    .success());
    let lc = run(&[
        "local-connectivity",
        s(&graph),
        s(&p("lp.txt")),
        s(&part),
        "-o",
        s(&p("sol.txt")),
    ]);
    assert!(lc.status.success());
    let sol = fs::read_to_string(p("sol.txt")).unwrap();
    assert!(sol.lines().last().unwrap().starts_with("certificate {"));

    let ok = run(&[
        "verify",
        s(&graph),
        s(&p("split.txt")),
        s(&part),
        s(&p("sol.txt")),
    ]);
    assert!(ok.status.success());
    let cert: serde_json::Value = serde_json::from_str(&stdout(&ok)).unwrap();
    assert_eq!(cert["passed"], true);

    // Bump the first multiplicity: the multiset is no longer Eulerian.
    let mut lines: Vec<String> = sol.lines().map(String::from).collect();
    let mut parts = lines[0].split_whitespace();
    let (e, m): (u64, u64) = (
        parts.next().unwrap().parse().unwrap(),
        parts.next().unwrap().parse().unwrap(),
    );
    lines[0] = format!("{e} {}", m + 1);
    fs::write(p("bad.txt"), lines.join("\n")).unwrap();
    let bad = run(&[
        "verify",
        s(&graph),
        s(&p("split.txt")),
        s(&part),
        s(&p("bad.txt")),
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let cert: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(cert["eulerian_ok"], false);
}

#[test]
fn bruteforce_and_tour() {
    let graph = data("figure1.txt");
    assert_eq!(stdout(&run(&["bruteforce", s(&graph)])), "opt 10\n");
    let tour = stdout(&run(&["tour", s(&graph)]));
    let ratio: f64 = tour
        .lines()
        .last()
        .unwrap()
        .strip_prefix("ratio ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio >= 10.0 / 8.0 - 1e-9);
}

#[test]
fn batch_prints_aggregate() {
    let out = run(&[
        "batch",
        "--family",
        "expensive-heavy",
        "--n",
        "12",
        "--count",
        "6",
        "--seed",
        "100",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    for (i, l) in lines[..6].iter().enumerate() {
        assert!(l.starts_with(&format!("seed {} pass", 100 + i)), "{l}");
    }
    assert!(lines[6].starts_with("aggregate max_ratio "));
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("g.txt");
    fs::write(&graph, "3 2 1 5\n0 1 0\n1 2 0\n").unwrap();
    let out = run(&["solve-lp", s(&graph)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strongly connected"));
    let out = run(&["gen", "--family", "figure1-gadgets", "--n", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_env_is_honoured() {
    let graph = data("figure1.txt");
    let out = bin()
        .args(["solve-lp", s(&graph)])
        .env("LCATSP_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(out.status.success());
}
