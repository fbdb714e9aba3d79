use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use racgdiv_oracle::{grid, MatrixBall, Relations};

fn racgdiv(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_racgdiv"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path, prefix: &str, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            let name = p.file_name().unwrap().to_string_lossy();
            name.starts_with(prefix) && name.ends_with(ext)
        })
        .collect();
    v.sort();
    v
}

/// Data rows of a CSV file whose header lines are `#` comments.
fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

fn config_line(path: &Path) -> serde_json::Value {
    let text = fs::read_to_string(path).unwrap();
    let line = text.lines().find_map(|l| l.strip_prefix("# config: ")).expect("config line");
    serde_json::from_str(line).unwrap()
}

#[test]
fn ball_sphere_csv_matches_grid_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(&["ball", "--family", "gamma:1", "--radius", "6"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let path = &files(dir.path(), "ball-", ".csv")[0];
    let rows = csv_rows(path);
    let oracle = MatrixBall::build(&Relations::new(4, &[(0, 2), (1, 2), (0, 3), (1, 3)]), 6).sphere_sizes();
    let mut total = 0;
    for (r, row) in rows.iter().enumerate() {
        total += oracle[r];
        assert_eq!(row[0].parse::<usize>().unwrap(), r);
        assert_eq!(row[1].parse::<usize>().unwrap(), oracle[r]);
        assert_eq!(row[2].parse::<usize>().unwrap(), total);
    }
    assert_eq!(&rows[1..4].iter().map(|r| (r[0].to_string(), r[1].to_string())).collect::<Vec<_>>(), &[
        ("1".into(), "4".into()),
        ("2".into(), "8".into()),
        ("3".into(), "12".into())
    ]);
    let cfg = config_line(path);
    assert_eq!(cfg["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(cfg["params"]["radius"], 6);
    assert_eq!(cfg["seed"], 0);
}

#[test]
fn ball_radius_zero_is_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(&["ball", "--family", "omega:2", "--radius", "0"], dir.path());
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&files(dir.path(), "ball-", ".csv")[0]);
    assert_eq!(rows.len(), 1);
    assert_eq!((&rows[0][0], &rows[0][1], &rows[0][2]), ("0", "1", "1"));
}

#[test]
fn malformed_graph_exits_2_naming_the_edge() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("bad.json");
    fs::write(&g, r#"{"generators": ["s", "t", "u"], "edges": [["s", "t"], ["t", "t"]]}"#).unwrap();
    let o = racgdiv(&["ball", "--graph", g.to_str().unwrap(), "--radius", "2"], dir.path());
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("edges[1]") && err.contains("self-loop"), "{err}");
}

#[test]
fn budget_exceeded_exits_1_with_partial_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(&["ball", "--family", "gamma:2", "--radius", "9", "--max-vertices", "500"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("budget exceeded"));
    let rows = csv_rows(&files(dir.path(), "ball-", ".csv")[0]);
    assert!(!rows.is_empty() && rows.len() < 10);
    assert!(rows.last().unwrap()[2].parse::<usize>().unwrap() <= 500);
}

#[test]
fn ldiv_grid_samples_match_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(&["ldiv", "--family", "gamma:1", "--word", "a_0 b_0", "--r-max", "4"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&files(dir.path(), "ldiv-", ".csv")[0]);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let r: i64 = row[2].parse().unwrap();
        // The axis geodesic runs along x; the detour around the origin.
        let expected = grid::avoidant((-r, 0), (r, 0), (0, 0), r, (0, 0), 3 * r).unwrap();
        assert_eq!((&row[0], &row[1], &row[4]), ("gamma:1", "(a0 b0)^∞", "finite"));
        assert_eq!(row[5].parse::<i64>().unwrap(), expected);
        assert_eq!(row[6].parse::<i64>().unwrap(), 3 * r);
        row[7].parse::<u64>().unwrap();
    }
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&files(dir.path(), "ldiv-", ".fit.json")[0]).unwrap()).unwrap();
    assert_eq!(fit["fit"]["model"], "polynomial");
    assert!(fit["fit"]["polynomial"].is_object() && fit["fit"]["exponential"].is_object());
    assert_eq!(fit["morse"]["class"], "non_morse_consistent");
    assert_eq!(fit["config"]["command"], "ldiv");
}

#[test]
fn ldiv_edgeless_graph_has_no_detour() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("line.json");
    fs::write(&g, r#"{"generators": ["s", "t"], "edges": []}"#).unwrap();
    let o = racgdiv(&["ldiv", "--graph", g.to_str().unwrap(), "--word", "s t", "--r-max", "1"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&files(dir.path(), "ldiv-", ".csv")[0]);
    assert_eq!(&rows[0][0], "custom:line");
    assert_eq!(&rows[0][4], "no_path_within_truncation");
    assert_eq!(&rows[0][5], "");
}

#[test]
fn unreduced_period_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for word in ["a0 a0", "a0 a1"] {
        let o = racgdiv(&["ldiv", "--family", "gamma:1", "--word", word], dir.path());
        assert_eq!(code(&o), 2);
        assert!(stderr(&o).contains("period not reduced"), "{word}: {}", stderr(&o));
    }
}

#[test]
fn invalid_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["ball", "--family", "delta:1"][..],
        &["ball", "--family", "gamma:0"],
        &["ball"],
        &["ldiv", "--family", "gamma:1", "--word", "a0 zz"],
        &["ldiv", "--family", "gamma:1", "--word", "a0 b0", "--trunc-factor", "1"],
        &["ldiv", "--family", "gamma:1", "--word", "a0 b0", "--r-min", "3", "--r-max", "2"],
        &["gersten", "--family", "gamma:1", "--rho", "3/2"],
        &["cone", "--family", "gamma:1"],
        &["transitions", "--family", "omega:1", "--word", "c1 b0", "--R", "0"],
    ] {
        let o = racgdiv(args, dir.path());
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn gersten_writes_samples_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(
        &["gersten", "--family", "gamma:1", "--r-min", "2", "--r-max", "4", "--threads", "2"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&files(dir.path(), "gersten-", ".csv")[0]);
    for row in &rows {
        let r: i64 = row[1].parse().unwrap();
        assert_eq!(&row[7], "exhaustive");
        assert_eq!(row[10].parse::<i64>().unwrap(), grid::gersten_sup(r, 12));
    }
}

#[test]
fn cone_omega1_radius1() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(
        &["cone", "--family", "omega:1", "--radius", "1", "--distance", "ε:c1", "--distance", "a0:b0"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&files(dir.path(), "cone-", ".json")[0]).unwrap()).unwrap();
    let cones = v["coned_ball"]["cone_vertices"].as_array().unwrap();
    let reps: Vec<&str> = cones.iter().map(|c| c["min_rep"].as_str().unwrap()).collect();
    // c1 and c2 both lie outside Γ_1, so each starts its own coset.
    assert_eq!(reps, ["ε", "c1", "c2"]);
    assert_eq!(v["coned_ball"]["group_vertices"].as_array().unwrap().len(), 7);
    assert_eq!(v["distances"][0]["coned_distance"], "1");
    // a0 and b0 share the coset P: 1/2 + 1/2 through the cone.
    assert_eq!(v["distances"][1]["coned_distance"], "1");
    assert_eq!(v["distances"][1]["cayley_distance"], 2);
    assert_eq!(v["config"]["command"], "cone");
}

#[test]
fn short_transition_segment_is_all_transition() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(
        &["transitions", "--family", "omega:2", "--word", "a2 b2", "--length", "3", "--R", "2"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&files(dir.path(), "transitions-", ".csv")[0]);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| &r[1] == "transition" && r[2].is_empty() && &r[3] == "1" && &r[4] == "2"));
}

#[test]
fn long_peripheral_segment_has_deep_interior() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(&["transitions", "--family", "omega:1", "--word", "a1 b1"], dir.path());
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&files(dir.path(), "transitions-", ".csv")[0]);
    let deep: Vec<usize> = rows
        .iter()
        .filter(|r| &r[1] == "deep")
        .map(|r| r[0].parse().unwrap())
        .collect();
    assert_eq!(deep, (3..=8).collect::<Vec<_>>());
}

#[test]
fn experiment_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["experiment", "spectrum", "--d", "1,2", "--r-max", "3"];
    assert_eq!(code(&racgdiv(&args, dir.path())), 0);
    let first = files(dir.path(), "spectrum-", ".json");
    let bytes = fs::read(&first[0]).unwrap();
    assert_eq!(code(&racgdiv(&args, dir.path())), 0);
    assert_eq!(files(dir.path(), "spectrum-", ".json"), first);
    assert_eq!(fs::read(&first[0]).unwrap(), bytes);
    assert_eq!(files(dir.path(), "spectrum-", ".md").len(), 1);
    let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["config"]["params"]["d"], serde_json::json!([1, 2]));
    assert_eq!(v["report"]["entries"].as_array().unwrap().len(), 2);
}

#[test]
fn experiment_budget_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = racgdiv(&["experiment", "gap", "--d", "2", "--r-max", "3", "--max-vertices", "3000"], dir.path());
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&files(dir.path(), "gap-", ".json")[0]).unwrap()).unwrap();
    assert!(v["report"]["budget_exceeded"].is_object());
}
