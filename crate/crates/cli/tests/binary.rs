use std::process::{Command, Output};

fn nhspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

const QUICK_TABLE: [&str; 7] = [
    "table0",
    "--basis-size",
    "20",
    "--levels",
    "6",
    "--tol",
    "1e-8",
];

#[test]
fn table0_passes_and_is_byte_identical() {
    let a = nhspec(&QUICK_TABLE);
    let b = nhspec(&QUICK_TABLE);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("# status pass"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("nx,ny,energy,ci,d2h"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 7);
}

#[test]
fn failed_check_exits_one() {
    let mut args = QUICK_TABLE.to_vec();
    args[6] = "0";
    let out = nhspec(&args);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("# status FAIL"));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(nhspec(&["sweep", "--levels", "0"]).status.code(), Some(2));
    assert_eq!(
        nhspec(&["table0", "--alpha-x", "nan"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nhspec(&["c4v-demo", "--alpha-y", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn json_matches_csv() {
    let csv = String::from_utf8(nhspec(&["c4v-demo"]).stdout).unwrap();
    let out = nhspec(&["c4v-demo", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["passed"], true);
    assert_eq!(v["meta"]["config"]["perturbation"], "xy");
    let rows = v["data"]["c4v"].as_array().unwrap();
    let csv_rows = csv.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows.len(), csv_rows);
}

#[test]
fn sweep_writes_branch_files_and_config_file_applies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# short sweep\n[common]\nlevels = 4\n[sweep]\nbasis-size = 10\nlambda-steps = 11\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = nhspec(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut names: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "branch_00.csv",
            "branch_01.csv",
            "branch_02.csv",
            "branch_03.csv",
            "summary.csv"
        ]
    );
    let b0 = std::fs::read_to_string(out_dir.join("branch_00.csv")).unwrap();
    assert!(b0.contains("# config basis-size = 10"));
    assert_eq!(b0.lines().filter(|l| !l.starts_with('#')).count(), 12);

    std::fs::write(&cfg, "[sweep]\nbogus = 1\n").unwrap();
    assert_eq!(
        nhspec(&["sweep", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
