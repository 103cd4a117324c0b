//! File level behavior of the run pipeline: formats, directory
//! handling, manifest fidelity and batch semantics.

mod common;

use std::fs;
use std::path::Path;

use chainsim::dataset_io::{
    load_manifest, read_dataset, write_dataset, DatasetFormat, COLUMN_COUNT,
};
use chainsim::error::Error;
use chainsim::randomizer::Mode;
use chainsim::runner::{run_batch, run_once, simulate, RunConfig};

use common::{dense_reference_table, reference_base_table, reference_joint_table};

fn write_table(path: &Path, rows: &[Vec<f64>]) {
    let text: String = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("\n");
    fs::write(path, text).unwrap();
}

fn short_run(dir: &Path, name: &str) -> RunConfig {
    RunConfig {
        seed: 21,
        duration_s: 0.2,
        sample_rate_hz: 50.0,
        out: dir.join(name),
        ..RunConfig::default()
    }
}

#[test]
fn both_formats_hold_identical_values() {
    let dir = tempfile::tempdir().unwrap();
    let config = short_run(dir.path(), "run.csv");
    let artifacts = run_once(&config).unwrap();
    let records = simulate(&artifacts.manifest).unwrap();

    let bin_path = dir.path().join("run.bin");
    write_dataset(&bin_path, DatasetFormat::Binary, &records).unwrap();

    let csv = read_dataset(&artifacts.dataset_path).unwrap();
    let bin = read_dataset(&bin_path).unwrap();
    assert_eq!(csv.rows.len(), bin.rows.len());
    for (a, b) in csv.rows.iter().zip(&bin.rows) {
        for (x, y) in a.iter().zip(b) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

#[test]
fn nested_output_directories_are_created() {
    let dir = tempfile::tempdir().unwrap();
    let config = short_run(dir.path(), "deep/runs/out.csv");
    let artifacts = run_once(&config).unwrap();
    assert!(artifacts.dataset_path.exists());
    assert!(artifacts.manifest_path.starts_with(dir.path().join("deep/runs")));
}

#[test]
fn provided_tables_reach_the_manifest_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let dh = dense_reference_table();
    let joints = reference_joint_table();
    let base = reference_base_table();
    let dh_path = dir.path().join("dh.csv");
    let joints_path = dir.path().join("joints.csv");
    let base_path = dir.path().join("base.csv");
    write_table(&dh_path, &dh);
    write_table(&joints_path, &joints);
    write_table(&base_path, &base);

    let config = RunConfig {
        mode: Mode::FromInputs,
        dh_path: Some(dh_path),
        joints_path: Some(joints_path),
        base_path: Some(base_path),
        ..short_run(dir.path(), "run.csv")
    };
    let artifacts = run_once(&config).unwrap();
    let manifest = load_manifest(&artifacts.manifest_path).unwrap();
    for (written, kept) in dh.iter().zip(manifest.dh_table.iter()) {
        for (a, b) in written.iter().zip(kept) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
    for (written, kept) in joints.iter().zip(manifest.joint_table.iter()) {
        for (a, b) in written.iter().zip(kept) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
    for (written, kept) in base.iter().zip(manifest.base_table.iter()) {
        for (a, b) in written.iter().zip(kept) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
    // Mode 2 keeps user tables; no randomization ranges are implied.
    assert!(manifest.ranges.is_none());
}

#[test]
fn mode_one_manifest_documents_ranges() {
    let dir = tempfile::tempdir().unwrap();
    let artifacts = run_once(&short_run(dir.path(), "run.csv")).unwrap();
    let manifest = load_manifest(&artifacts.manifest_path).unwrap();
    assert!(manifest.ranges.is_some());
    assert_eq!(manifest.prng, "chacha8");
}

#[test]
fn batch_failure_names_item_and_keeps_finished_work() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = short_run(dir.path(), "set.csv");
    config.batch_count = 3;
    config.randomize_each_run = true;
    // Occupy the second item's output path with a directory so its
    // write fails while the first item succeeds.
    fs::create_dir_all(dir.path().join("set_001.csv")).unwrap();

    let err = run_batch(&config).unwrap_err();
    match &err {
        Error::BatchItem { index, .. } => assert_eq!(*index, 1),
        other => panic!("unexpected error {other:?}"),
    }
    assert_eq!(err.exit_code(), 3, "I/O failures map to the I/O exit class");
    assert!(dir.path().join("set_000.csv").exists());
    assert!(dir.path().join("set_000.manifest.json").exists());
    let kept = read_dataset(&dir.path().join("set_000.csv")).unwrap();
    assert_eq!(kept.rows.len(), 11);
}

#[test]
fn csv_starts_with_version_then_header() {
    let dir = tempfile::tempdir().unwrap();
    let artifacts = run_once(&short_run(dir.path(), "run.csv")).unwrap();
    let text = fs::read_to_string(&artifacts.dataset_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "# format_version=1");
    let header = lines.next().unwrap();
    assert!(header.starts_with("time,joint_1"));
    assert_eq!(header.split(',').count(), COLUMN_COUNT);
}

#[test]
fn binary_run_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let config = short_run(dir.path(), "run.bin");
    let artifacts = run_once(&config).unwrap();
    let contents = read_dataset(&artifacts.dataset_path).unwrap();
    assert_eq!(contents.rows.len(), 11);
    assert_eq!(contents.columns.len(), COLUMN_COUNT);
    let manifest = load_manifest(&artifacts.manifest_path).unwrap();
    assert_eq!(manifest.dataset_format, DatasetFormat::Binary);
}

#[test]
fn noise_free_runs_share_clean_values() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = short_run(dir.path(), "noisy.csv");
    let noisy = run_once(&config).unwrap();
    config.noise = false;
    config.out = dir.path().join("clean.csv");
    let clean = run_once(&config).unwrap();
    config.out = dir.path().join("clean2.csv");
    let clean2 = run_once(&config).unwrap();

    let noisy = read_dataset(&noisy.dataset_path).unwrap();
    let clean = read_dataset(&clean.dataset_path).unwrap();
    let clean2 = read_dataset(&clean2.dataset_path).unwrap();
    assert_eq!(clean.rows, clean2.rows, "clean runs are reproducible");
    // Same chain, same trajectory: time and joint columns agree, the
    // sensor columns differ by the injected noise.
    let mut sensor_diff = 0.0f64;
    for (a, b) in noisy.rows.iter().zip(&clean.rows) {
        for col in 0..7 {
            assert_eq!(a[col].to_bits(), b[col].to_bits());
        }
        for col in 7..COLUMN_COUNT {
            sensor_diff = sensor_diff.max((a[col] - b[col]).abs());
        }
    }
    assert!(sensor_diff > 0.0, "noise must actually perturb sensors");
}

#[test]
fn time_column_follows_the_sample_rate() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = short_run(dir.path(), "run.csv");
    config.duration_s = 0.5;
    config.sample_rate_hz = 40.0;
    let artifacts = run_once(&config).unwrap();
    let contents = read_dataset(&artifacts.dataset_path).unwrap();
    assert_eq!(contents.rows.len(), 21);
    for (k, row) in contents.rows.iter().enumerate() {
        assert_eq!(row[0], k as f64 / 40.0);
    }
}
