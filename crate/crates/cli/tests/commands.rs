use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_logicgrid");

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Writes `config.toml` into `dir` with the given client table body.
fn config(dir: &Path, client: &str, extra: &str) -> PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, format!("output_dir = \"out\"\n{extra}\n[client]\n{client}\n")).unwrap();
    path
}

fn actions_in(transcript: &Path) -> usize {
    let text = fs::read_to_string(transcript).unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v["kind"] == "completion" {
            seen.insert((v["attempt"].as_u64(), v["action"].as_u64()));
        }
    }
    seen.len()
}

#[test]
fn solve_session_replay_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let replay = fixture("ostrich_session/replay.json");
    let cfg = config(dir.path(), &format!("backend = \"scripted\"\npath = {:?}", replay.display().to_string()), "");
    let out = run(&["solve", "--puzzle", "ostriches", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(actions_in(&dir.path().join("out/transcripts/ostriches.jsonl")), 2);
    let grade: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/grades/ostriches.json")).unwrap()).unwrap();
    assert_eq!(grade["report"]["partial_score"], 1.0);

    // the stored run grades the same way
    let run_file = dir.path().join("out/runs/ostriches.json");
    let regraded = run(&["grade", "--puzzle", "ostriches", "--run", run_file.to_str().unwrap()]);
    assert_eq!(code(&regraded), 0);
}

#[test]
fn solve_prose_only_exits_one_after_twelve_actions() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("prose.json"), r#"{"default": "Kermit probably won."}"#).unwrap();
    let cfg = config(dir.path(), "backend = \"scripted\"\npath = \"prose.json\"", "");
    let out = run(&["solve", "--puzzle", "ostriches", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(actions_in(&dir.path().join("out/transcripts/ostriches.jsonl")), 12);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "backend = \"reference\"", "");
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&run(&["solve", "--puzzle", "zebra", "--config", cfg])), 2);
    assert_eq!(code(&run(&["solve", "--puzzle", "houses", "--config", "/no/such/config.toml"])), 2);
    assert_eq!(code(&run(&["encode"])), 2);
    let bad = config(dir.path(), "backend = \"reference\"", "[run]\nmax_actions = 0");
    assert_eq!(code(&run(&["solve", "--puzzle", "houses", "--config", bad.to_str().unwrap()])), 2);
}

#[test]
fn missing_solver_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "backend = \"reference\"", "[solver]\nexecutable = \"/no/such/z3\"");
    let out = run(&["solve", "--puzzle", "houses", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
}

#[test]
fn batch_with_reference_backend_solves_everything() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "backend = \"reference\"", "concurrency = 2");
    let dataset = fixture("puzzles.json");
    let out = run(&["batch", "--dataset", dataset.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let mut summary = csv::Reader::from_path(dir.path().join("out/results.csv")).unwrap();
    assert_eq!(summary.headers().unwrap(), vec!["Model", "T", "D", "Avg. PS", "#Solved"]);
    let row = summary.records().next().unwrap().unwrap();
    assert_eq!(&row[3], "1.000");
    assert_eq!(&row[4], "3 (100.0%)");

    let mut detail = csv::Reader::from_path(dir.path().join("out/results_detail.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = detail.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let solved = rows.iter().filter(|r| &r[9] == "true").count();
    let mean: f64 = rows.iter().map(|r| r[8].parse::<f64>().unwrap()).sum::<f64>() / 3.0;
    assert_eq!(solved, 3);
    assert_eq!(format!("{mean:.3}"), row[3]);
}

#[test]
fn batch_on_empty_dataset_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "backend = \"reference\"", "");
    let empty = dir.path().join("empty.json");
    fs::write(&empty, "[]").unwrap();
    let out = run(&["batch", "--dataset", empty.to_str().unwrap(), "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn encode_prints_a_satisfiable_script() {
    let out = run(&["encode", "--puzzle", "ostriches"]);
    assert_eq!(code(&out), 0);
    let script = stdout(&out);
    assert!(script.contains("(assert (distinct"));

    let mut z3 =
        Command::new("z3").args(["-in", "-smt2"]).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    z3.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let answer = String::from_utf8(z3.wait_with_output().unwrap().stdout).unwrap();
    assert_eq!(answer.lines().next(), Some("sat"));
}

#[test]
fn encode_without_structured_clues_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("puzzles.json")).unwrap();
    let mut first: serde_json::Value = serde_json::Deserializer::from_str(&text).into_iter().next().unwrap().unwrap();
    first.as_object_mut().unwrap().remove("structured_clues");
    let id = first["id"].as_str().unwrap().to_string();
    let path = dir.path().join("bare.json");
    fs::write(&path, serde_json::to_string(&first).unwrap()).unwrap();
    let out = run(&["encode", "--puzzle", &id, "--dataset", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no structured clues"));
}

#[test]
fn grade_sample_output_reports_cells() {
    let sample = fixture("houses_sample_output.txt");
    let out = run(&["grade", "--puzzle", "houses", "--output", sample.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["total_matches"], 12);
    assert_eq!(report["correct_matches"], 7);
}

#[test]
fn stats_renders_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let pairs = dir.path().join("pairs.csv");
    fs::write(&pairs, "id,auto,human\na,1.0,1.0\nb,0.5,0.75\nc,0.25,0.0\n").unwrap();
    let out = run(&["stats", "--pairs", pairs.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("Metric"));
    assert_eq!(text.lines().count(), 8);
    assert!(text.contains("1.0000"), "{text}");

    fs::write(&pairs, "id,auto,human\n").unwrap();
    assert_eq!(code(&run(&["stats", "--pairs", pairs.to_str().unwrap()])), 2);
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["reference.toml", "replay.toml", "live.toml"] {
        logicgrid_core::AppConfig::load(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
