use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hyperstab::output::sha256_hex;

fn hyperstab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperstab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HYPERSTAB_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn stable_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperstab(
        dir.path(),
        &[
            "stable",
            "--max-deg",
            "18",
            "--regime",
            "n0",
            "--format",
            "md",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("| 8 | Q(-6) |"));
    assert!(text.contains("| 18 | Q(-14)^2 + Q(-15)^3 |"));
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("| ") && !l.starts_with("| i"))
            .count(),
        19
    );

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    let entry = &manifest["outputs"][0];
    let file = entry["file"].as_str().unwrap();
    let body = fs::read(dir.path().join(file)).unwrap();
    assert_eq!(entry["sha256"].as_str().unwrap(), sha256_hex(&body));
    assert_eq!(manifest["inputs"]["regime"], "n0");
}

#[test]
fn stable_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperstab(dir.path(), &["stable", "--max-deg", "0", "--format", "csv"]);
    assert_eq!(stdout(&o), "i,twist,multiplicity\n0,0,1\n");
    let o = hyperstab(
        dir.path(),
        &["stable", "--max-deg", "18", "--regime", "npos"],
    );
    assert!(stdout(&o).contains("| 2 | Q(-1) |"));
    let o = hyperstab(dir.path(), &["stable", "--regime", "n0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hyperstab(dir.path(), &["stable", "--max-deg", "4", "--format", "xml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = hyperstab(
            dir,
            &[
                "rankcheck",
                "--type",
                "1,1,1",
                "--d",
                "7",
                "--n",
                "1",
                "--trials",
                "10",
                "--seed",
                "5",
            ],
        );
        assert_eq!(o.status.code(), Some(0));
    }
    for name in ["manifest.json", "rankcheck_1-1-1_d7_n1.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperstab(dir.path(), &["verify", "example19"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("example19: 19 passed, 0 failed"));
    let o = hyperstab(dir.path(), &["verify", "diffscan"]);
    assert_eq!(o.status.code(), Some(0));
    let o = hyperstab(dir.path(), &["verify", "euler"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("verify_euler.json")).unwrap())
            .unwrap();
    assert!(json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["origin"].is_string()));

    let o = hyperstab(dir.path(), &["verify", "everything"]);
    assert_eq!(o.status.code(), Some(2));
    // the printed main-table columns for L = 5, 6 disagree with the computation
    let o = hyperstab(dir.path(), &["verify", "tables"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn count_wrapper() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperstab(
        dir.path(),
        &[
            "count", "--g", "2", "--l", "1", "--q", "3", "--method", "brute",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "g,l,q,method,raw,group,stack,formula,match\n2,1,3,brute,279936,2592,108,108,true\n"
    );
    let o = hyperstab(
        dir.path(),
        &[
            "count",
            "--g",
            "2",
            "--l",
            "0",
            "--q",
            "3",
            "--method",
            "stratified",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("strata_g2_l0_q3.csv").exists());
    let o = hyperstab(dir.path(), &["count", "--g", "2", "--l", "1", "--q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = hyperstab(
        dir.path(),
        &[
            "count", "--g", "5", "--l", "1", "--q", "13", "--budget", "small",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("feasible"));
}

#[test]
fn e1_and_m0n_wrappers() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperstab(dir.path(), &["e1", "--L", "3..6", "--d", "30", "--n", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("| row | L=3 | L=4 | L=5 | L=6 |"));
    assert!(text.contains("| -11 | Q(-6) |"));

    let o = hyperstab(dir.path(), &["m0n", "--n", "4"]);
    assert!(stdout(&o).contains("| 1 | 2 | chi[2,2] |"));
}

#[test]
fn m0n_cache_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hyperstab"))
            .args(["m0n", "--n", "6", "--format", "json", "--out"])
            .arg(dir.path().join("out"))
            .env("HYPERSTAB_CACHE", &cache)
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0));
    assert!(cache.join("m0n_6.json").exists());
    let second = run();
    assert_eq!(first.stdout, second.stdout);
}
