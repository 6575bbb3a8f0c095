use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_venuerisk");

const PARTICIPANTS: &str = "\
person_id,status_w1,status_w2,days_between,total_partners,partners_in_data,venue:bar,venue:app,venue:park
a,1,1,270,,,4,0,1
b,0,1,250,,,0,2.5,1
c,0,0,250,6,2,1,1,0
d,0,0,260,,,3,0,2
e,0,,,,,0,1,0
";

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(dir).output().expect("binary runs")
}

fn small_config(dir: &Path) {
    fs::write(
        dir.join("study.toml"),
        "replications = 6\nmaster_seed = 3\nn_sample = 120\nsynthetic_persons = 100\n",
    )
    .unwrap();
}

#[test]
fn simulate_writes_summary_and_raw_table() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let out = run(
        &["simulate", "--config", "study.toml", "--pi", "0.011", "--pi", "0.02", "--scenario", "coarse", "--out", "res"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("res/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["scenario"], "coarse");
    assert_eq!(summary["by_pi"].as_array().unwrap().len(), 2);
    let raw = fs::read_to_string(dir.path().join("res/replications.csv")).unwrap();
    assert_eq!(raw.lines().count(), 1 + 2 * 6);
    assert!(raw.lines().skip(1).all(|l| l.starts_with("coarse,")));
}

#[test]
fn flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let out = run(
        &["simulate", "--config", "study.toml", "--seed", "77", "--reps", "3", "--two-cluster", "--out", "res"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("res/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["master_seed"], 77);
    assert_eq!(summary["replications"], 3);
    assert_eq!(summary["two_cluster"], true);
    assert_eq!(summary["sample_size"], 862);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    for (threads, out_dir) in [("1", "one"), ("4", "four")] {
        let out = run(
            &["simulate", "--config", "study.toml", "--threads", threads, "--out", out_dir],
            dir.path(),
        );
        assert!(out.status.success());
    }
    for f in ["summary.json", "replications.csv"] {
        assert_eq!(
            fs::read(dir.path().join("one").join(f)).unwrap(),
            fs::read(dir.path().join("four").join(f)).unwrap()
        );
    }
}

#[test]
fn calibrate_writes_curve_in_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let out = run(
        &["calibrate", "--config", "study.toml", "--pi-grid", "0.001,0.01,0.02", "--reps", "5", "--out", "cal"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("cal/calibration.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "pi,mean_rate,std_error,mean_new_infections");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0.001,"));
    assert!(lines[3].starts_with("0.02,"));
}

#[test]
fn estimate_scores_participants() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), PARTICIPANTS).unwrap();
    let out = run(&["estimate", "--data", "p.csv", "--pi", "0.011", "--out", "est"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("est/estimate.json")).unwrap()).unwrap();
    assert_eq!(summary["persons"], 5);
    assert_eq!(summary["evaluated"], 3);
    assert_eq!(summary["seroconversions"], 1);
    let venues = fs::read_to_string(dir.path().join("est/venues.csv")).unwrap();
    // person c is scaled by 6/2, so bar holds 4 + 3 + 3 = 10 encounters, 4 of them positive
    assert!(venues.contains("bar,10,0.40000000000000002"), "{venues}");
    let risk = fs::read_to_string(dir.path().join("est/risk.csv")).unwrap();
    assert_eq!(risk.lines().count(), 6);
    assert!(risk.lines().nth(5).unwrap().starts_with("e,0,,"));
}

#[test]
fn project_writes_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), PARTICIPANTS).unwrap();
    let out = run(&["project", "--data", "p.csv", "--out", "proj"], dir.path());
    assert!(out.status.success());
    let edges = fs::read_to_string(dir.path().join("proj/venue_edges.csv")).unwrap();
    assert_eq!(edges, "venue_a,venue_b,shared_count\nbar,app,1\nbar,park,2\napp,park,1\n");
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let missing = run(&["estimate", "--data", "absent.csv", "--pi", "0.01", "--out", "x"], dir.path());
    assert_eq!(missing.status.code(), Some(2));

    fs::write(dir.path().join("bad.csv"), "person_id,status_w1,venue:a\np,1,x\n").unwrap();
    let bad = run(&["project", "--data", "bad.csv", "--out", "x"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&bad.stderr);
    assert!(msg.contains("line 2") && msg.contains("venue:a"), "{msg}");

    fs::write(dir.path().join("dup.csv"), "person_id,status_w1,venue:a\np,1,1\np,0,2\n").unwrap();
    assert_eq!(run(&["project", "--data", "dup.csv", "--out", "x"], dir.path()).status.code(), Some(2));

    fs::write(dir.path().join("typo.toml"), "replicates = 3\n").unwrap();
    assert_eq!(run(&["simulate", "--config", "typo.toml"], dir.path()).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--config", "study.toml", "--scenario", "sideways"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["simulate", "--config", "study.toml", "--pi", "1.5"], dir.path()).status.code(),
        Some(2)
    );
}

#[test]
fn degenerate_study_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    small_config(dir.path());
    let out = run(&["simulate", "--config", "study.toml", "--pi", "0", "--out", "res"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}
