use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn anycast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anycast"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_setcover_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let sol = dir.path().join("sol.json");
    let o = anycast(&["gen", "setcover-euclidean", "--sets", "[[0]]", "--out", p(&inst)]);
    assert!(o.status.success(), "{o:?}");
    let o = anycast(&["solve", p(&inst), "--solver", "cover_and_grow", "--out", p(&sol)]);
    assert!(o.status.success(), "{o:?}");
    assert_eq!(stdout(&o).trim(), "total 2");
    let o = anycast(&["validate", p(&inst), p(&sol)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("\"ok\": true"));
}

#[test]
fn validate_reports_missing_terminal() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let sol = dir.path().join("sol.json");
    anycast(&["gen", "setcover-euclidean", "--sets", "[[0]]", "--out", p(&inst)]);
    fs::write(
        &sol,
        r#"{"balls":[{"source":0,"cost":1.0}],"funnel_trees":[{"source":0,"edges":[]}],"witnesses":[{"demand":0,"source":0,"terminal":1}]}"#,
    )
    .unwrap();
    let o = anycast(&["validate", p(&inst), p(&sol)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("terminal_not_in_tree"), "{}", stdout(&o));
}

#[test]
fn unknown_solver_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    anycast(&["gen", "pathological", "--q", "4", "--out", p(&inst)]);
    let o = anycast(&["solve", p(&inst), "--solver", "magic"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("t_centric") && err.contains("cover_and_grow"), "{err}");
}

#[test]
fn bad_generator_parameter_is_usage_error() {
    let o = anycast(&["gen", "pathological", "--q", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_and_reduce() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let sc = dir.path().join("sc.json");
    anycast(&["gen", "setcover-euclidean", "--sets", "[[0,1],[1]]", "--out", p(&inst)]);
    let o = anycast(&["oracle", p(&inst)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).trim_end().ends_with("total 2"));
    let o = anycast(&["reduce", p(&inst), "--out", p(&sc)]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&sc).unwrap()).unwrap();
    assert_eq!(v[0]["set_connectivity"]["super_sources"].as_array().unwrap().len(), 2);
}

#[test]
fn solve_with_sc_dump() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let dump = dir.path().join("dump.json");
    anycast(&["gen", "setcover-euclidean", "--sets", "[[0]]", "--out", p(&inst)]);
    let o = anycast(&["solve", p(&inst), "--solver", "set_connectivity", "--sc-dump", p(&dump)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).trim_end().ends_with("total 2"));
    assert!(dump.exists());
}

#[test]
fn bench_cost_columns_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = anycast(&[
            "bench", "--trials", "2", "--seed", "7", "--sizes", "1,4", "--q", "4", "--group-size", "3", "--jobs", "2",
            "--out", p(&out),
        ]);
        assert!(o.status.success(), "{o:?}");
        let csv = fs::read_to_string(out.join("results.csv")).unwrap();
        csv.lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{},{},{},{}", f[0], f[1], f[2], f[3], f[4], f[5], f[7])
            })
            .collect::<Vec<_>>()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a.len(), 1 + 2 * 2 * 2 * 5);
    assert_eq!(a, b);
}

#[test]
fn gen_random_shape() {
    let o = anycast(&["gen", "random", "--sources", "4", "--seed", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nodes"].as_array().unwrap().len(), 104);
    assert_eq!(v["demands"].as_array().unwrap().len(), 10);
}
