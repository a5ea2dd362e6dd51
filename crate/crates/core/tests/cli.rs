mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use common::D_PERFECT_CSV;

fn fsbench(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fsbench"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generated(dir: &Path, rows: &str, attributes: &str) -> std::path::PathBuf {
    let out = dir.join("s.csv");
    let (code, _, err) = fsbench(&[
        "generate", "--rows", rows, "--attributes", attributes, "--informative", "1:0.7,2:0.4",
        "--seed", "3", "--out", s(&out),
    ]);
    assert_eq!(code, 0, "{err}");
    out
}

#[test]
fn generate_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let (code, stdout, _) = fsbench(&[
        "generate", "--rows", "50", "--attributes", "4", "--informative", "2:0.5",
        "--missing-rate", "0.1", "--seed", "9", "--out", s(&out),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("planted 2 attr_2 strength=0.5"), "{stdout}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("g.csv.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["version"], fsbench::VERSION);
    assert_eq!(manifest["informative"][0]["number"], 2);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "attr_1,attr_2,attr_3,attr_4,gender");
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn generate_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    for bad in [
        &["--rows", "10", "--informative", "0:0.5"][..],
        &["--rows", "10", "--informative", "22:0.5"],
        &["--rows", "10", "--informative", "3:1.5"],
        &["--rows", "10", "--informative", "3"],
        &["--rows", "10", "--class-ratio", "1"],
        &["--rows", "10", "--missing-rate", "1"],
    ] {
        let args: Vec<&str> = ["generate", "--out", s(&out)].iter().chain(bad).copied().collect();
        assert_eq!(fsbench(&args).0, 2, "{bad:?}");
    }
    assert!(!out.exists());
}

#[test]
fn rank_output_is_self_describing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.csv");
    fs::write(&input, D_PERFECT_CSV).unwrap();
    let out = dir.path().join("scores.csv");
    let (code, stdout, _) = fsbench(&[
        "rank", "--input", s(&input), "--target", "gender", "--seed", "5", "--out", s(&out),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let comment = text.lines().next().unwrap();
    assert!(comment.starts_with(&format!("# fsbench {} rank", fsbench::VERSION)), "{comment}");
    assert!(comment.contains("seed=5") && comment.contains("relieff(m=50,k=10,seed=5)"), "{comment}");
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "attribute_name,infogain,gainratio,gini,chi2,relieff,fcbf"
    );
    assert_eq!(text.lines().nth(2).unwrap(), "A,1,1,0.5,4,1,1");
}

#[test]
fn rank_data_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let ragged = dir.path().join("r.csv");
    fs::write(&ragged, "a,b,gender\n1,2,M\n1,F\n").unwrap();
    let (code, _, err) = fsbench(&["rank", "--input", s(&ragged), "--target", "gender"]);
    assert_eq!(code, 1);
    assert!(err.contains("line 3"), "{err}");
    let (code, _, _) = fsbench(&["rank", "--input", s(&ragged), "--target", "sex"]);
    assert_eq!(code, 1);
}

#[test]
fn rank_rejects_bad_relieff_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("d.csv");
    fs::write(&input, D_PERFECT_CSV).unwrap();
    let base = ["rank", "--input", s(&input), "--target", "gender"];
    assert_eq!(fsbench(&[&base[..], &["--relieff-k", "0"]].concat()).0, 2);
    assert_eq!(fsbench(&[&base[..], &["--scorers", "chi2,chi2"]].concat()).0, 2);
    assert_eq!(fsbench(&[&base[..], &["--missing", "maybe"]].concat()).0, 2);
}

#[test]
fn evaluate_features_by_number_or_name() {
    let dir = tempfile::tempdir().unwrap();
    let input = generated(dir.path(), "200", "5");
    let run = |features: &str, json: &Path| {
        let (code, stdout, err) = fsbench(&[
            "evaluate", "--input", s(&input), "--target", "gender", "--features", features,
            "--classifiers", "nb", "--out-json", s(json),
        ]);
        assert_eq!(code, 0, "{err}");
        (stdout, fs::read_to_string(json).unwrap())
    };
    let (by_number, json_a) = run("2,1", &dir.path().join("a.json"));
    let (by_name, json_b) = run("attr_1,attr_2", &dir.path().join("b.json"));
    assert!(by_number.contains("features=attr_1|attr_2"), "{by_number}");
    assert_eq!(by_number, by_name);
    assert_eq!(json_a, json_b);
    let doc: serde_json::Value = serde_json::from_str(&json_a).unwrap();
    assert_eq!(doc["seed"], 42);
    assert_eq!(doc["folds"], 10);
    assert_eq!(doc["reports"][0]["classifier"], "nb");
    let ca = doc["reports"][0]["ca"].as_f64().unwrap();
    assert!(ca > 0.6, "{ca}");

    for bad in ["0", "6", "gender", "attr_1,attr_1", ""] {
        let (code, _, _) = fsbench(&[
            "evaluate", "--input", s(&input), "--target", "gender", "--features", bad,
        ]);
        assert_eq!(code, 2, "{bad:?}");
    }
}

#[test]
fn evaluate_csv_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = generated(dir.path(), "120", "3");
    let out = dir.path().join("m.csv");
    let (code, _, _) = fsbench(&[
        "evaluate", "--input", s(&input), "--target", "gender", "--folds", "5", "--seed", "8",
        "--out-csv", s(&out),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# fsbench") && lines[0].contains("seed=8"));
    assert_eq!(lines[1], "classifier,auc,ca,f1,precision,recall,seed,k,n_rows");
    assert!(lines[2].starts_with("nb,") && lines[2].ends_with(",8,5,120"), "{}", lines[2]);
    assert!(lines[3].starts_with("rf,"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn evaluate_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = generated(dir.path(), "60", "3");
    let base = ["evaluate", "--input", s(&input), "--target", "gender"];
    for extra in [
        &["--classifiers", "svm"][..],
        &["--folds", "0"],
        &["--trees", "0"],
        &["--alpha", "-1"],
    ] {
        assert_eq!(fsbench(&[&base[..], extra].concat()).0, 2, "{extra:?}");
    }
    let (code, _, err) = fsbench(&[&base[..], &["--folds", "61"]].concat());
    assert_eq!(code, 1, "{err}");
}

#[test]
fn sweep_summary_names_best_cell() {
    let dir = tempfile::tempdir().unwrap();
    let input = generated(dir.path(), "150", "5");
    let out = dir.path().join("r");
    let (code, stdout, err) = fsbench(&[
        "sweep", "--input", s(&input), "--target", "gender", "--scorers", "chi2,relieff",
        "--classifiers", "nb", "--max-k", "4", "--folds", "5", "--out-dir", s(&out),
    ]);
    assert_eq!(code, 0, "{err}");
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert_eq!(stdout, summary);
    assert!(summary.contains("best: method="), "{summary}");
    assert!(summary.contains("top-3 chi2:"), "{summary}");
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2 * 3);
    assert!(out.join("sweep_nb.svg").exists());
    assert!(!out.join("sweep_rf.svg").exists());

    let (code, _, _) = fsbench(&[
        "sweep", "--input", s(&input), "--target", "gender", "--min-k", "1", "--out-dir", s(&out),
    ]);
    assert_eq!(code, 2);
    let (code, _, _) = fsbench(&[
        "sweep", "--input", s(&input), "--target", "gender", "--max-k", "6", "--out-dir", s(&out),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn help_and_version() {
    let (code, stdout, _) = fsbench(&["--version"]);
    assert_eq!(code, 0);
    assert!(stdout.contains(fsbench::VERSION));
    let (code, stdout, _) = fsbench(&["sweep", "--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("--out-dir"));
}
