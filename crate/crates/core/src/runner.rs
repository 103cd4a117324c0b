//! Run orchestration: configuration, the pure simulation core, single and
//! batched runs, plus the inspection and self validation entry points.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain_model::{
    compile_chain, parse_dh_array, ChainConfig, GimbalOrder, ImuGeometry, LinkType, LINK_COUNT,
};
use crate::dataset_io::{
    assemble_record, load_manifest, manifest_path_for, read_dataset, row_count, write_dataset,
    write_manifest, DatasetFormat, DatasetRecord, RunManifest, FORMAT_VERSION,
};
use crate::error::{Error, Result};
use crate::kinematics::{
    evaluate_chain, finite_difference_oracle, fk_pose, orthonormality_defect, FrozenConfig, Pose,
};
use crate::randomizer::{
    post_run_hook, resolve_inputs, InputTables, Mode, ProvidedTables, RandomRanges, RunMode,
};
use crate::sensors::{
    add_noise, measure, noise_rng, place_sensors, ImuConfig, ImuSample, ResolveFrame,
};
use crate::trajectory::{joint_motion, BaseAxes, MotionSample};

/// IMU settings as given by the user. The noise seed may be left out,
/// in which case the run seed is reused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImuOptions {
    pub resolve_in: ResolveFrame,
    pub include_gravity: bool,
    pub gravity: [f64; 3],
    pub sigma_gyro: f64,
    pub sigma_accel: f64,
    pub seed: Option<u64>,
}

impl Default for ImuOptions {
    fn default() -> Self {
        let base = ImuConfig::default();
        ImuOptions {
            resolve_in: base.resolve_in,
            include_gravity: base.include_gravity,
            gravity: base.gravity,
            sigma_gyro: base.sigma_gyro,
            sigma_accel: base.sigma_accel,
            seed: None,
        }
    }
}

impl ImuOptions {
    pub fn resolve(&self, run_seed: u64) -> ImuConfig {
        ImuConfig {
            resolve_in: self.resolve_in,
            include_gravity: self.include_gravity,
            gravity: self.gravity,
            sigma_gyro: self.sigma_gyro,
            sigma_accel: self.sigma_accel,
            rng_seed: self.seed.unwrap_or(run_seed),
        }
    }
}

/// Full configuration of a run, loadable from JSON and overridable
/// field by field from the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub batch_count: usize,
    pub randomize_each_run: bool,
    pub noise: bool,
    pub out: PathBuf,
    /// Dataset encoding; inferred from the output extension when absent.
    pub format: Option<DatasetFormat>,
    pub gimbal_order: GimbalOrder,
    pub geometry: ImuGeometry,
    pub imu: ImuOptions,
    pub ranges: Option<RandomRanges>,
    pub dh_path: Option<PathBuf>,
    pub joints_path: Option<PathBuf>,
    pub base_path: Option<PathBuf>,
    /// Optional per axis base rows (x, y, z, then the gimbal axes),
    /// replacing the shared two row base table.
    pub base_override: Option<[[f64; 4]; 6]>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Randomize,
            seed: 0,
            duration_s: 10.0,
            sample_rate_hz: 200.0,
            batch_count: 1,
            randomize_each_run: false,
            noise: true,
            out: PathBuf::from("dataset.csv"),
            format: None,
            gimbal_order: GimbalOrder::default(),
            geometry: ImuGeometry::default(),
            imu: ImuOptions::default(),
            ranges: None,
            dh_path: None,
            joints_path: None,
            base_path: None,
            base_override: None,
        }
    }
}

impl RunConfig {
    pub fn effective_format(&self) -> DatasetFormat {
        self.format.unwrap_or_else(|| {
            match self.out.extension().and_then(|e| e.to_str()) {
                Some("bin") | Some("dat") => DatasetFormat::Binary,
                _ => DatasetFormat::Csv,
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::Config(format!(
                "duration_s must be positive and finite, got {}",
                self.duration_s
            )));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::Config(format!(
                "sample_rate_hz must be positive and finite, got {}",
                self.sample_rate_hz
            )));
        }
        if self.batch_count == 0 {
            return Err(Error::Config("batch_count must be at least 1".into()));
        }
        self.geometry.validate()?;
        self.imu.resolve(self.seed).validate()?;
        if let Some(ranges) = &self.ranges {
            ranges.validate()?;
        }
        if let Some(rows) = &self.base_override {
            for (i, row) in rows.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::NonFinite { row: i + 1, col: j });
                    }
                }
                if row[2] < 0.0 {
                    return Err(Error::NegativeFrequency {
                        row: i + 1,
                        value: row[2],
                    });
                }
            }
        }
        Ok(())
    }
}

fn split_cells(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Reads a numeric table from a plain text file: one row per line,
/// cells separated by commas or whitespace, # lines ignored.
fn read_numeric_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for cell in split_cells(line) {
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                detail: format!("line {}: bad number {cell:?}", lineno + 1),
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}

enum TableKind {
    Dh,
    Joints,
    Base,
}

/// Loads one table file. Accepts either a plain numeric table or a run
/// manifest, from which the matching table is lifted.
fn load_table(path: &Path, kind: TableKind) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('{') {
        let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            detail: format!("not a valid manifest: {e}"),
        })?;
        let rows: Vec<Vec<f64>> = match kind {
            TableKind::Dh => manifest.dh_table.iter().map(|r| r.to_vec()).collect(),
            TableKind::Joints => manifest.joint_table.iter().map(|r| r.to_vec()).collect(),
            TableKind::Base => manifest.base_table.iter().map(|r| r.to_vec()).collect(),
        };
        return Ok(rows);
    }
    read_numeric_table(path)
}

pub fn load_provided_tables(config: &RunConfig) -> Result<ProvidedTables> {
    let mut provided = ProvidedTables::default();
    if let Some(path) = &config.dh_path {
        provided.dh = Some(load_table(path, TableKind::Dh)?);
    }
    if let Some(path) = &config.joints_path {
        provided.joints = Some(load_table(path, TableKind::Joints)?);
    }
    if let Some(path) = &config.base_path {
        provided.base = Some(load_table(path, TableKind::Base)?);
    }
    Ok(provided)
}

pub fn build_manifest(config: &RunConfig, seed: u64, tables: &InputTables) -> RunManifest {
    let ranges = match config.mode {
        Mode::Randomize => Some(config.ranges.clone().unwrap_or_default()),
        Mode::FromInputs => config.ranges.clone(),
    };
    RunManifest {
        format_version: FORMAT_VERSION,
        generator: "chainsim".into(),
        prng: "chacha8".into(),
        mode: config.mode,
        seed,
        randomize_each_run: config.randomize_each_run,
        duration_s: config.duration_s,
        sample_rate_hz: config.sample_rate_hz,
        noise_enabled: config.noise,
        gimbal_order: config.gimbal_order,
        geometry: config.geometry,
        imu: config.imu.resolve(seed),
        dataset_format: config.effective_format(),
        dh_table: tables.dh.to_raw(),
        joint_table: tables.joints.to_raw(),
        base_table: tables.base.to_raw(),
        base_override: config.base_override,
        ranges,
    }
}

/// Regenerates the full record stream for a manifest. Pure: equal
/// manifests always produce bit identical records.
pub fn simulate(manifest: &RunManifest) -> Result<Vec<DatasetRecord>> {
    manifest.geometry.validate()?;
    let imu = manifest.imu;
    imu.validate()?;

    let dh = parse_dh_array(&manifest.dh_table)?;
    let joints = crate::trajectory::parse_joint_array(&manifest.joint_table)?;
    let base_table = crate::trajectory::parse_base_array(&manifest.base_table)?;
    let chain_config = ChainConfig {
        gimbal_order: manifest.gimbal_order,
        geometry: manifest.geometry,
    };
    let plan = compile_chain(&dh, &chain_config)?;
    let base_axes = match &manifest.base_override {
        Some(rows) => BaseAxes::from_rows(rows)?,
        None => BaseAxes::from_shared(&base_table),
    };
    let sites = place_sensors(&plan);

    let rows = row_count(manifest.duration_s, manifest.sample_rate_hz);
    let mut records = Vec::with_capacity(rows);
    for k in 0..rows {
        let t = k as f64 / manifest.sample_rate_hz;
        let states = evaluate_chain(&plan, &joints, &base_axes, t)?;
        let mut samples = Vec::with_capacity(sites.len());
        for site in &sites {
            let state = states.get(site.frame).ok_or_else(|| Error::InconsistentPlan {
                details: format!("no frame state for sensor {}", site.frame),
            })?;
            let mut sample = measure(state, &imu);
            if manifest.noise_enabled {
                let mut rng = noise_rng(imu.rng_seed, site.noise_stream, k as u64);
                sample = add_noise(&sample, &imu, &mut rng)?;
            }
            samples.push((site.frame, sample));
        }
        let mut joint_samples = [MotionSample::ZERO; LINK_COUNT];
        for (i, slot) in joint_samples.iter_mut().enumerate() {
            *slot = joint_motion(&joints, i + 1, plan.link_types[i], t)?;
        }
        records.push(assemble_record(t, &joint_samples, &samples, &plan)?);
    }
    Ok(records)
}

#[derive(Clone, Debug)]
pub struct RunArtifacts {
    pub dataset_path: PathBuf,
    pub manifest_path: PathBuf,
    pub rows: usize,
    pub seed: u64,
    pub manifest: RunManifest,
}

fn ensure_parent_dir(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    Ok(())
}

/// One full run: resolve inputs, simulate, write dataset and manifest.
pub fn run_once(config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let provided = load_provided_tables(config)?;
    let run_mode = RunMode {
        mode: config.mode,
        randomize_each_run: config.randomize_each_run,
    };
    let ranges = config.ranges.clone().unwrap_or_default();
    let tables = resolve_inputs(&run_mode, config.seed, &ranges, &provided)?;
    let manifest = build_manifest(config, config.seed, &tables);
    let records = simulate(&manifest)?;
    ensure_parent_dir(&config.out)?;
    write_dataset(&config.out, config.effective_format(), &records)?;
    let manifest_path = write_manifest(&config.out, &manifest)?;
    Ok(RunArtifacts {
        dataset_path: config.out.clone(),
        manifest_path,
        rows: records.len(),
        seed: config.seed,
        manifest,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchItem {
    pub index: usize,
    pub seed: u64,
    pub dataset: PathBuf,
    pub manifest: PathBuf,
    pub rows: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchSummary {
    pub format_version: u32,
    pub generator: String,
    pub count: usize,
    pub base_seed: u64,
    pub randomize_each_run: bool,
    pub items: Vec<BatchItem>,
}

pub fn batch_item_path(out: &Path, index: usize) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".to_string());
    out.with_file_name(format!("{stem}_{index:03}.{ext}"))
}

pub fn batch_summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    out.with_file_name(format!("{stem}_batch.json"))
}

/// Runs `batch_count` datasets. The seed advances between items only
/// when `randomize_each_run` is set. A failing item aborts the batch
/// with its index; items already written stay on disk.
pub fn run_batch(config: &RunConfig) -> Result<(BatchSummary, PathBuf)> {
    config.validate()?;
    let run_mode = RunMode {
        mode: config.mode,
        randomize_each_run: config.randomize_each_run,
    };
    let mut items = Vec::with_capacity(config.batch_count);
    let mut seed = config.seed;
    for index in 0..config.batch_count {
        let mut item_config = config.clone();
        item_config.seed = seed;
        item_config.out = batch_item_path(&config.out, index);
        item_config.batch_count = 1;
        let artifacts = run_once(&item_config).map_err(|e| Error::BatchItem {
            index,
            source: Box::new(e),
        })?;
        items.push(BatchItem {
            index,
            seed,
            dataset: artifacts.dataset_path,
            manifest: artifacts.manifest_path,
            rows: artifacts.rows,
        });
        seed = post_run_hook(&run_mode, seed);
    }
    let summary = BatchSummary {
        format_version: FORMAT_VERSION,
        generator: "chainsim".into(),
        count: items.len(),
        base_seed: config.seed,
        randomize_each_run: config.randomize_each_run,
        items,
    };
    let path = batch_summary_path(&config.out);
    ensure_parent_dir(&path)?;
    let mut text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Config(format!("summary serialization: {e}")))?;
    text.push('\n');
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text.as_bytes())?;
    fs::rename(&tmp, &path)?;
    Ok((summary, path))
}

fn manifest_lines(manifest: &RunManifest) -> Vec<String> {
    let types = manifest.dh_table[..LINK_COUNT]
        .iter()
        .enumerate()
        .map(|(i, row)| match LinkType::from_code(row[4], i + 1) {
            Ok(t) => t.short_name().to_string(),
            Err(_) => "?".to_string(),
        })
        .collect::<Vec<_>>()
        .join(", ");
    let driven = manifest.dh_table[..LINK_COUNT]
        .iter()
        .filter(|row| row[4] != 0.0)
        .count();
    vec![
        format!("mode: {}", manifest.mode),
        format!("seed: {}", manifest.seed),
        format!("duration_s: {}", manifest.duration_s),
        format!("sample_rate_hz: {}", manifest.sample_rate_hz),
        format!(
            "noise: {}",
            if manifest.noise_enabled { "on" } else { "off" }
        ),
        format!("gimbal order: {}", manifest.gimbal_order),
        format!("driven joints: {driven}"),
        format!("link types: [{types}]"),
        format!("sensors: {}", 2 + 2 * driven),
    ]
}

/// Human readable summary of a dataset or manifest file.
pub fn inspect_path(path: &Path) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let is_manifest = path
        .file_name()
        .and_then(|n| n.to_str())
        .map(|n| n.ends_with(".json"))
        .unwrap_or(false);
    if is_manifest {
        let manifest = load_manifest(path)?;
        lines.push(format!("manifest: {}", path.display()));
        lines.extend(manifest_lines(&manifest));
        return Ok(lines);
    }
    let contents = read_dataset(path)?;
    lines.push(format!("dataset: {}", path.display()));
    lines.push(format!("rows: {}", contents.rows.len()));
    lines.push(format!("columns: {}", contents.columns.len()));
    let sidecar = manifest_path_for(path);
    if sidecar.exists() {
        let manifest = load_manifest(&sidecar)?;
        lines.push(format!("manifest: {}", sidecar.display()));
        lines.extend(manifest_lines(&manifest));
    } else {
        lines.push("manifest: none found".to_string());
    }
    Ok(lines)
}

/// Scene description for a resolved configuration: link types, the
/// element sequence, and every tracked frame at the rest configuration.
pub fn dump_scene(config: &RunConfig) -> Result<serde_json::Value> {
    config.validate()?;
    let provided = load_provided_tables(config)?;
    let run_mode = RunMode {
        mode: config.mode,
        randomize_each_run: config.randomize_each_run,
    };
    let ranges = config.ranges.clone().unwrap_or_default();
    let tables = resolve_inputs(&run_mode, config.seed, &ranges, &provided)?;
    let chain_config = ChainConfig {
        gimbal_order: config.gimbal_order,
        geometry: config.geometry,
    };
    let plan = compile_chain(&tables.dh, &chain_config)?;
    let rest = fk_pose(&plan, &FrozenConfig::zeros(&plan))?;

    let elements: Vec<serde_json::Value> = plan
        .elements
        .iter()
        .enumerate()
        .map(|(i, e)| {
            serde_json::json!({
                "index": i,
                "kind": e.transform.kind_name(),
                "source": e.source.to_string(),
            })
        })
        .collect();
    let frames: Vec<serde_json::Value> = rest
        .iter()
        .map(|(name, pose)| {
            let r = &pose.rotation;
            serde_json::json!({
                "name": name.to_string(),
                "position": [pose.translation.x, pose.translation.y, pose.translation.z],
                "rotation": [
                    [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                    [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                    [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
                ],
            })
        })
        .collect();
    let types: Vec<String> = plan
        .link_types
        .iter()
        .map(|t| t.short_name().to_string())
        .collect();
    Ok(serde_json::json!({
        "format_version": FORMAT_VERSION,
        "link_types": types,
        "driven_joints": plan.joint_count(),
        "sensors": place_sensors(&plan).len(),
        "element_count": plan.elements.len(),
        "elements": elements,
        "frames": frames,
    }))
}

#[derive(Clone, Debug)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(ValidationCheck {
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for check in &self.checks {
            let tag = if check.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", check.name, check.detail)?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        if failed == 0 {
            write!(f, "all {} checks passed", self.checks.len())
        } else {
            write!(f, "{failed} of {} checks failed", self.checks.len())
        }
    }
}

/// Built in consistency checks, runnable from the command line to
/// verify an installation.
pub fn validate_kinematics(seed: u64) -> ValidationReport {
    let mut report = ValidationReport::default();

    // The two basis change transforms must cancel exactly.
    let round_trip = Pose::world_to_dh().compose(&Pose::dh_to_world());
    let identity = Pose::identity();
    let mut max_dev: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            max_dev = max_dev.max((round_trip.rotation[(i, j)] - identity.rotation[(i, j)]).abs());
        }
        max_dev = max_dev.max(round_trip.translation[i].abs());
    }
    report.push(
        "basis-round-trip",
        max_dev == 0.0,
        format!("max deviation from identity {max_dev:.2e}"),
    );

    // Rotations must stay orthonormal through long compositions.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pose = Pose::identity();
    for _ in 0..10_000 {
        let a = rng.gen_range(-1.0..=1.0);
        let b = rng.gen_range(-1.0..=1.0);
        let d = rng.gen_range(-0.5..=0.5);
        pose = pose
            .compose(&Pose::rot_x(a))
            .compose(&Pose::rot_z(b))
            .compose(&Pose::translation_xyz(d, 0.0, 0.0));
    }
    let defect = orthonormality_defect(&pose.rotation);
    report.push(
        "orthonormality-drift",
        defect <= 1e-10,
        format!("defect {defect:.2e} after 10000 random steps"),
    );

    // Analytic rates must match a finite difference probe.
    let drift_check = (|| -> Result<(f64, f64)> {
        let ranges = RandomRanges::default();
        let tables = crate::randomizer::randomize_config(seed.wrapping_add(7), &ranges)?;
        let plan = compile_chain(&tables.dh, &ChainConfig::default())?;
        let axes = BaseAxes::from_shared(&tables.base);
        let t = 0.37;
        let states = evaluate_chain(&plan, &tables.joints, &axes, t)?;
        let probes = finite_difference_oracle(&plan, &tables.joints, &axes, t, 1e-4)?;
        let mut worst_rate: f64 = 0.0;
        let mut worst_accel: f64 = 0.0;
        for (frame, state) in states.iter() {
            let probe = probes.get(*frame).expect("probe for every frame");
            worst_rate = worst_rate
                .max((state.angular_velocity - probe.angular_velocity).norm())
                .max((state.linear_velocity - probe.linear_velocity).norm());
            worst_accel = worst_accel
                .max((state.angular_acceleration - probe.angular_acceleration).norm())
                .max((state.linear_acceleration - probe.linear_acceleration).norm());
        }
        Ok((worst_rate, worst_accel))
    })();
    match drift_check {
        Ok((rate, accel)) => report.push(
            "differential-consistency",
            rate <= 1e-5 && accel <= 1e-3,
            format!("worst rate error {rate:.2e}, worst acceleration error {accel:.2e}"),
        ),
        Err(e) => report.push("differential-consistency", false, e.to_string()),
    }

    // A chain at rest must read exactly zero on every channel.
    let rest_check = (|| -> Result<f64> {
        let manifest = RunManifest {
            format_version: FORMAT_VERSION,
            generator: "chainsim".into(),
            prng: "chacha8".into(),
            mode: Mode::FromInputs,
            seed,
            randomize_each_run: false,
            duration_s: 0.05,
            sample_rate_hz: 100.0,
            noise_enabled: false,
            gimbal_order: GimbalOrder::default(),
            geometry: ImuGeometry::default(),
            imu: ImuConfig {
                sigma_gyro: 0.0,
                sigma_accel: 0.0,
                ..ImuConfig::default()
            },
            dataset_format: DatasetFormat::Csv,
            dh_table: [[0.0, 0.85, 0.0, 0.2, 1.0]; 8],
            joint_table: [[0.0; 5]; 8],
            base_table: [[0.0; 4]; 2],
            base_override: None,
            ranges: None,
        };
        let records = simulate(&manifest)?;
        let mut worst: f64 = 0.0;
        for record in &records {
            for value in &record.to_row()[1..] {
                worst = worst.max(value.abs());
            }
        }
        Ok(worst)
    })();
    match rest_check {
        Ok(worst) => report.push(
            "static-rest",
            worst <= 1e-12,
            format!("largest channel magnitude at rest {worst:.2e}"),
        ),
        Err(e) => report.push("static-rest", false, e.to_string()),
    }

    // Noise must replay bit for bit from the same seed and indices.
    let noise_check = (|| -> Result<bool> {
        let imu = ImuConfig {
            sigma_gyro: 0.01,
            sigma_accel: 0.02,
            rng_seed: seed,
            ..ImuConfig::default()
        };
        let clean = ImuSample::ZERO;
        let a = add_noise(&clean, &imu, &mut noise_rng(seed, 3, 17))?;
        let b = add_noise(&clean, &imu, &mut noise_rng(seed, 3, 17))?;
        let c = add_noise(&clean, &imu, &mut noise_rng(seed, 4, 17))?;
        Ok(a == b && a != c)
    })();
    match noise_check {
        Ok(ok) => report.push(
            "noise-replay",
            ok,
            "same stream and sample replay identically, streams differ".to_string(),
        ),
        Err(e) => report.push("noise-replay", false, e.to_string()),
    }

    report
}
