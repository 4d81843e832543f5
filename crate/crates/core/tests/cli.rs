use std::path::Path;
use std::process::{Command, Output};

use mimo_crb::experiments::{Method, Model, SweepVariable};
use mimo_crb::report::{read_csv_from, CSV_HEADER};
use mimo_crb::GeometryKind;

fn mimo_crb(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mimo-crb"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const SMALL: [&str; 14] = [
    "--trials", "3", "--seed", "7", "--n-paths", "2", "--k", "8", "--k-pilot", "2", "--k-data", "4", "--values", "0,10",
];

#[test]
fn dump_geometry_lists_every_element() {
    let dir = tempfile::tempdir().unwrap();
    let out = mimo_crb(&["dump-geometry", "--ucya", "24", "4"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("element_index,x,y,z"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 96);
    // layer-major: the second layer starts at index 24, one vertical spacing up
    assert_eq!(rows[24][3], 0.5);
    assert_eq!(rows[0][1..3], rows[24][1..3]);
}

#[test]
fn sweep_writes_csv_and_manifest_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep-snr", "--out", "a.csv"];
    args.extend(SMALL);
    assert!(mimo_crb(&args, dir.path()).status.success());
    args[2] = "b.csv";
    args.extend(["--threads", "1"]);
    assert!(mimo_crb(&args, dir.path()).status.success());

    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);

    let result = read_csv_from(a.as_slice(), SweepVariable::SnrDb).unwrap();
    assert_eq!(result.rows.len(), 2 * 2 * 4);
    assert!(result.rows.iter().all(|r| r.trials_used == 3 && r.seed == 7));
    let op = result.series(GeometryKind::Ula, Model::Unstructured, Method::Op);
    assert_eq!(op.len(), 2);
    assert!(op[1].1 < op[0].1);

    let manifest = std::fs::read_to_string(dir.path().join("a.csv.manifest")).unwrap();
    assert!(manifest.contains("subcommand = sweep-snr"));
    assert!(manifest.contains("trials = 3"));
    assert!(manifest.contains("started_at"));
}

#[test]
fn manifest_replays_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep-layers", "--out", "first.csv", "--n-uca", "4"];
    args.extend(SMALL);
    *args.last_mut().unwrap() = "1,2";
    assert!(mimo_crb(&args, dir.path()).status.success());
    let replay = mimo_crb(
        &["sweep-layers", "--config", "first.csv.manifest", "--out", "second.csv"],
        dir.path(),
    );
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));
    assert_eq!(
        std::fs::read(dir.path().join("first.csv")).unwrap(),
        std::fs::read(dir.path().join("second.csv")).unwrap()
    );
}

#[test]
fn stdout_output_has_header_first() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["single", "--out", "-"];
    args.extend(&SMALL[..12]);
    let out = mimo_crb(&args, dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(text.lines().count(), 1 + 8);
}

#[test]
fn invalid_configuration_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["sweep-snr", "--k-pilot", "0"][..],
        &["sweep-snr", "--n-tx", "5", "--k", "4"],
        &["sweep-snr", "--derivative-convention", "sideways"],
    ] {
        let out = mimo_crb(args, dir.path());
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
    assert!(!dir.path().join("sweep-snr.csv").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = mimo_crb(&["sweep-everything"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
