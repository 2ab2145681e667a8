use std::fs;
use std::path::Path;

use wigner_lab::record::{read_records, RECORDS_FILE};
use wigner_lab::report::{CSV_HEADER, MANIFEST_FILE, TRIALS_FILE};
use wigner_lab::runner::{execute, report_dir, run_to_dir};
use wigner_lab::{parse_config, Loaded, Manifest, Status};

fn tightness() -> Loaded {
    parse_config(
        r#"{"experiment": "tightness", "deformation": {"spikes": [{"theta": 2.0}]},
            "n_list": [30, 60], "trials": 6, "master_seed": 17}"#,
    )
    .unwrap()
}

fn manifest(dir: &Path) -> Manifest {
    serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap()
}

#[test]
fn identical_runs_give_identical_csv() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let l = tightness();
    run_to_dir(&l, a.path(), 1).unwrap();
    run_to_dir(&l, b.path(), 2).unwrap();
    let ca = fs::read(a.path().join(TRIALS_FILE)).unwrap();
    assert_eq!(ca, fs::read(b.path().join(TRIALS_FILE)).unwrap());
    assert!(String::from_utf8(ca).unwrap().starts_with(&format!("{CSV_HEADER}\n")));
    assert_eq!(
        fs::read(a.path().join(RECORDS_FILE)).unwrap(),
        fs::read(b.path().join(RECORDS_FILE)).unwrap()
    );
}

#[test]
fn parallel_matches_serial() {
    let cfg = parse_config(
        r#"{"experiment": "caseB_law", "ensemble": {"diag": {"kind": "gaussian", "variance": 2.0}},
            "deformation": {"spikes": [{"theta": 3.0}], "layout": {"mode": "random_delocalized"}},
            "n_list": [40], "trials": 8, "master_seed": 5}"#,
    )
    .unwrap()
    .config;
    assert_eq!(execute(&cfg, 1).unwrap(), execute(&cfg, 3).unwrap());
}

#[test]
fn interrupted_sweep_resumes_to_the_same_result() {
    let full = tempfile::tempdir().unwrap();
    let part = tempfile::tempdir().unwrap();
    let l = tightness();
    run_to_dir(&l, full.path(), 1).unwrap();

    // Keep three records and a torn fourth line.
    let text = fs::read_to_string(full.path().join(RECORDS_FILE)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut cut = lines[..3].join("\n");
    cut.push('\n');
    cut.push_str(&lines[3][..lines[3].len() / 2]);
    fs::write(part.path().join(RECORDS_FILE), cut).unwrap();

    run_to_dir(&l, part.path(), 2).unwrap();
    assert_eq!(
        fs::read(full.path().join(TRIALS_FILE)).unwrap(),
        fs::read(part.path().join(TRIALS_FILE)).unwrap()
    );
    assert_eq!(read_records(&part.path().join(RECORDS_FILE)).unwrap().len(), 12);

    // A second pass has nothing left to do and leaves the records alone.
    let before = fs::read(part.path().join(RECORDS_FILE)).unwrap();
    run_to_dir(&l, part.path(), 1).unwrap();
    assert_eq!(before, fs::read(part.path().join(RECORDS_FILE)).unwrap());
}

#[test]
fn directory_of_another_config_is_refused() {
    let d = tempfile::tempdir().unwrap();
    run_to_dir(&tightness(), d.path(), 1).unwrap();
    let mut other = tightness();
    other.config.master_seed += 1;
    let e = run_to_dir(&other, d.path(), 1).unwrap_err();
    assert!(e.to_string().contains("different config"), "{e}");
}

#[test]
fn csv_row_carries_the_predicted_location() {
    let d = tempfile::tempdir().unwrap();
    let l = parse_config(
        r#"{"experiment": "outlier_location", "deformation": {"spikes": [{"theta": 2.0}]},
            "n_list": [50], "trials": 2, "master_seed": 1}"#,
    )
    .unwrap();
    run_to_dir(&l, d.path(), 1).unwrap();
    let csv = fs::read_to_string(d.path().join(TRIALS_FILE)).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("trial"), "0");
    assert_eq!(col("N"), "50");
    assert_eq!(col("rho"), "2.5000000000000000e0");
    assert_eq!(col("rho").parse::<f64>().unwrap(), 2.5);
    assert_eq!(col("prop1_residual"), "");
    // 17 significant digits.
    let lambda = col("lambda");
    assert_eq!(lambda.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
}

#[test]
fn svg_artifacts_are_well_formed() {
    let d = tempfile::tempdir().unwrap();
    let l = parse_config(
        r#"{"experiment": "caseA_law", "ensemble": {"offdiag": {"kind": "rademacher"}, "diag": {"kind": "rademacher"}},
            "deformation": {"spikes": [{"theta": 2.0}]}, "params": {"limit_draws": 2000},
            "n_list": [40], "trials": 30, "master_seed": 2}"#,
    )
    .unwrap();
    run_to_dir(&l, d.path(), 1).unwrap();
    let m = manifest(d.path());
    let svgs: Vec<&String> = m.artifacts.iter().filter(|a| a.ends_with(".svg")).collect();
    assert!(svgs.len() >= 3, "{:?}", m.artifacts);
    for s in svgs {
        let text = fs::read_to_string(d.path().join(s)).unwrap();
        let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("{s}: {e}"));
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
}

#[test]
fn empty_report_writes_only_the_manifest() {
    let d = tempfile::tempdir().unwrap();
    let l = parse_config(r#"{"experiment": "semicircle", "n_list": [10], "trials": 0}"#).unwrap();
    run_to_dir(&l, d.path(), 1).unwrap();
    let m = manifest(d.path());
    assert!(m.artifacts.is_empty());
    assert_eq!(m.verdicts.len(), 1);
    assert_eq!(m.verdicts[0].status, Status::Skipped);
    assert!(m.all_passed());
    assert!(!d.path().join(TRIALS_FILE).exists());
}

#[test]
fn report_rebuilds_artifacts_and_keeps_wall_time() {
    let d = tempfile::tempdir().unwrap();
    run_to_dir(&tightness(), d.path(), 1).unwrap();
    let first = manifest(d.path());
    let csv = fs::read(d.path().join(TRIALS_FILE)).unwrap();
    fs::remove_file(d.path().join(TRIALS_FILE)).unwrap();
    report_dir(d.path(), &[wigner_lab::report::Format::Csv]).unwrap();
    assert_eq!(csv, fs::read(d.path().join(TRIALS_FILE)).unwrap());
    let second = manifest(d.path());
    assert_eq!(first.wall_time_seconds, second.wall_time_seconds);
    assert_eq!(first.verdicts, second.verdicts);
}

#[test]
fn manifest_keys_are_sorted() {
    let d = tempfile::tempdir().unwrap();
    run_to_dir(&tightness(), d.path(), 1).unwrap();
    let text = fs::read_to_string(d.path().join(MANIFEST_FILE)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    // Key order in the text matches the sorted order.
    let pos: Vec<usize> = keys.iter().map(|k| text.find(&format!("\n  \"{k}\"")).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}
