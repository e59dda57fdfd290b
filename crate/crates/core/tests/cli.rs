use std::path::Path;
use std::process::{Command, Output};

fn schelling(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schelling"))
        .args(args)
        .current_dir(dir)
        .env_remove("SCHELLING_OUT_DIR")
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_one_line_failure(out: &Output, needle: &str) {
    assert!(!out.status.success());
    let err = stderr(out);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.starts_with("error: ") && err.contains(needle), "{err}");
}

const SMALL: &str = r#"
name = "small"
[grid]
n = 6
[population]
reds = 12
blues = 12
[network]
k = 2
[utility]
x = 0.5
alpha = 0.5
[process]
H = 2
[sweep]
axis = "beta"
values = [0.25, 0.75, 1.0]
"#;

#[test]
fn run_with_trace_writes_a_trace_file() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("small.toml"), SMALL).unwrap();
    let out = schelling(
        tmp.path(),
        &["run", "small.toml", "--trace", "--out", "res"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let dir = tmp.path().join("res/small");
    let trace = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    let run = std::fs::read_to_string(dir.join("run.csv")).unwrap();
    assert!(trace.starts_with("t,agent,origin,destination,utility_before,utility_after\n"));
    let iterations: usize = run
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(2)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(trace.lines().count(), iterations + 1);
    for f in [
        "agents_initial.csv",
        "agents_final.csv",
        "edges.csv",
        "grid_initial.svg",
        "grid_final.svg",
    ] {
        assert!(dir.join(f).exists(), "{f}");
    }
}

#[test]
fn sweep_writes_csv_and_chart() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("small.toml"), SMALL).unwrap();
    let out = schelling(tmp.path(), &["sweep", "small.toml"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(tmp.path().join("out/small/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(tmp.path().join("out/small/sweep.svg").exists());
}

#[test]
fn output_directory_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let with_dir = format!("{SMALL}\n[output]\ndirectory = \"from-config\"\nformats = [\"csv\"]\n");
    std::fs::write(tmp.path().join("small.toml"), &with_dir).unwrap();
    std::fs::write(tmp.path().join("plain.toml"), SMALL).unwrap();
    let run = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_schelling"));
        cmd.args(args)
            .current_dir(tmp.path())
            .env_remove("SCHELLING_OUT_DIR");
        if let Some(v) = env {
            cmd.env("SCHELLING_OUT_DIR", v);
        }
        assert!(cmd.output().unwrap().status.success());
    };
    run(
        &["sweep", "small.toml", "--out", "from-flag"],
        Some("from-env"),
    );
    assert!(tmp.path().join("from-flag/small/sweep.csv").exists());
    run(&["sweep", "small.toml"], Some("from-env"));
    assert!(tmp.path().join("from-config/small/sweep.csv").exists());
    assert!(!tmp.path().join("from-config/small/sweep.svg").exists());
    run(&["sweep", "plain.toml"], Some("from-env"));
    assert!(tmp.path().join("from-env/small/sweep.csv").exists());
}

#[test]
fn replicate_runs_a_preset() {
    let tmp = tempfile::tempdir().unwrap();
    let out = schelling(tmp.path(), &["replicate", "baseline", "--replicates", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(tmp.path().join("out/baseline/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    let svg = std::fs::read_to_string(tmp.path().join("out/baseline/sweep.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="panel""#).count(), 6);
}

#[test]
fn render_hand_written_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let header = schelling::io::csv::sweep_header().join(",");
    let row = |x: &str| format!("{x}{}", ",1.5".repeat(18));
    let text = format!("{header}\n{}\n{}\n", row("0"), row("1"));
    std::fs::write(tmp.path().join("two.csv"), text).unwrap();
    let out = schelling(tmp.path(), &["render", "two.csv", "-o", "two.svg"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let svg = std::fs::read_to_string(tmp.path().join("two.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="point""#).count(), 12);
    assert_eq!(svg.matches(r#"class="mean""#).count(), 6);
}

#[test]
fn render_a_snapshot() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("agents.csv"),
        "agent_id,color,row,col\n1,red,1,1\n2,blue,2,3\n",
    )
    .unwrap();
    std::fs::write(tmp.path().join("edges.csv"), "a,b\n1,2\n").unwrap();
    let out = schelling(
        tmp.path(),
        &[
            "render",
            "--snapshot",
            "agents.csv",
            "--edges",
            "edges.csv",
            "--n",
            "4",
            "-o",
            "grid.svg",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let svg = std::fs::read_to_string(tmp.path().join("grid.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="friendship""#).count(), 1);
    assert_eq!(svg.matches("cell empty").count(), 14);
}

#[test]
fn failures_are_reported_on_one_line() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path();
    std::fs::write(p.join("typo.toml"), "[utility]\nalhpa = 0.5\n").unwrap();
    std::fs::write(
        p.join("nosweep.toml"),
        "[grid]\nn = 5\n[population]\nreds = 3\nblues = 3\n",
    )
    .unwrap();
    std::fs::write(
        p.join("empty.csv"),
        schelling::io::csv::sweep_header().join(",") + "\n",
    )
    .unwrap();
    std::fs::write(p.join("blocker"), "").unwrap();

    assert_one_line_failure(&schelling(p, &["run", "missing.toml"]), "missing.toml");
    assert_one_line_failure(&schelling(p, &["run", "typo.toml"]), "alhpa");
    assert_one_line_failure(&schelling(p, &["sweep", "nosweep.toml"]), "[sweep]");
    assert_one_line_failure(
        &schelling(p, &["replicate", "nope"]),
        "unknown preset `nope`",
    );
    assert_one_line_failure(&schelling(p, &["render", "empty.csv"]), "no data rows");
    assert_one_line_failure(
        &schelling(p, &["run", "nosweep.toml", "--out", "blocker/sub"]),
        "blocker",
    );
}
