use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn soglasso(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soglasso"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// 30 samples of 6 features with labels from `sign(x0 + x1)`.
fn write_problem(dir: &Path, bad_label: bool) {
    let mut design = String::new();
    let mut labels = String::new();
    for i in 0..30 {
        let row: Vec<f64> = (0..6).map(|j| (((i * 7 + j * 13) % 17) as f64 - 8.0) / 4.0).collect();
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        design.push_str(&line.join(","));
        design.push('\n');
        let y = if row[0] + row[1] >= 0.0 { 1 } else { -1 };
        labels.push_str(&format!("{}\n", if bad_label && i == 4 { 0 } else { y }));
    }
    fs::write(dir.join("design.csv"), design).unwrap();
    fs::write(dir.join("labels.csv"), labels).unwrap();
    fs::write(dir.join("groups.txt"), "# pairs\n0 1 2\n2 3\n4 5\n").unwrap();
    fs::write(dir.join("fit.cfg"), "loss = classification\nsolver.eta1 = 2\nsolver.eta2 = 1\npenalty.lambda1 = 0.5\n").unwrap();
}

fn fit_args<'a>(dir: &'a str, out: &'a str) -> Vec<String> {
    vec![
        "fit".into(),
        "--design".into(),
        format!("{dir}/design.csv"),
        "--labels".into(),
        format!("{dir}/labels.csv"),
        "--groups".into(),
        format!("{dir}/groups.txt"),
        "--config".into(),
        format!("{dir}/fit.cfg"),
        "--out".into(),
        out.to_string(),
    ]
}

#[test]
fn fit_writes_one_value_per_feature() {
    let tmp = tempfile::tempdir().unwrap();
    write_problem(tmp.path(), false);
    let dir = tmp.path().to_str().unwrap();
    let out = format!("{dir}/out");
    let args = fit_args(dir, &out);
    let o = soglasso(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let model = fs::read_to_string(format!("{out}/model.csv")).unwrap();
    assert_eq!(model.lines().count(), 6);
    for name in ["support.csv", "active_groups.csv", "trace.csv"] {
        let text = fs::read_to_string(format!("{out}/{name}")).unwrap();
        assert!(text.starts_with("# schema=v1\n"), "{name}");
    }
}

#[test]
fn fit_rejects_zero_labels() {
    let tmp = tempfile::tempdir().unwrap();
    write_problem(tmp.path(), true);
    let dir = tmp.path().to_str().unwrap();
    let out = format!("{dir}/out");
    let args = fit_args(dir, &out);
    let o = soglasso(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("labels must be ±1"), "{}", stderr(&o));
}

#[test]
fn fit_without_group_file_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    write_problem(tmp.path(), false);
    let dir = tmp.path().to_str().unwrap();
    let o = soglasso(&["fit", "--design", &format!("{dir}/design.csv"), "--labels", &format!("{dir}/labels.csv")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("--groups is required"));
}

#[test]
fn fit_reports_non_convergence() {
    let tmp = tempfile::tempdir().unwrap();
    write_problem(tmp.path(), false);
    let dir = tmp.path().to_str().unwrap();
    fs::write(
        tmp.path().join("fit.cfg"),
        "loss = squared\nsolver.eta1 = 0.01\nsolver.max_iters = 2\nsolver.rel_tol = 1e-15\n",
    )
    .unwrap();
    let out = format!("{dir}/out");
    let args = fit_args(dir, &out);
    let o = soglasso(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn parse_errors_name_file_and_line() {
    let tmp = tempfile::tempdir().unwrap();
    write_problem(tmp.path(), false);
    fs::write(tmp.path().join("groups.txt"), "0 1 2\n3 four\n").unwrap();
    let dir = tmp.path().to_str().unwrap();
    let out = format!("{dir}/out");
    let args = fit_args(dir, &out);
    let o = soglasso(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(3));
    let msg = stderr(&o);
    assert!(msg.contains("groups.txt:2:"), "{msg}");
}

#[test]
fn penalty_table_passes() {
    let o = soglasso(&["penalty-table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("26.602"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn gen_groups_chain_roundtrips() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("chain.txt");
    let o = soglasso(&["gen-groups", "chain", "--count", "3", "--size", "6", "--shift", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("p = 14"));
    let text = fs::read_to_string(path).unwrap();
    let groups: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(groups, ["0 1 2 3 4 5", "4 5 6 7 8 9", "8 9 10 11 12 13"]);
}

#[test]
fn width_reports_zero_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("width.csv");
    let o = soglasso(&["width", "--reproducible", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("0 violations"));
    let text = fs::read_to_string(path).unwrap();
    assert!(text.contains("\nwidth,2,3,2,3,"), "boundary row present");
    assert!(!text.contains(",fail"));
}

#[test]
fn bad_arguments_exit_with_input_error() {
    assert_eq!(soglasso(&["phase", "--n", "100,50"]).status.code(), Some(3));
    assert_eq!(soglasso(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(soglasso(&["--help"]).status.code(), Some(0));
}

#[test]
fn timestamp_only_without_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("p.csv");
    let args = ["phase", "--n", "30", "--trials", "2", "--out", path.to_str().unwrap()];
    assert_eq!(soglasso(&args).status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("# generated_unix="));
}
