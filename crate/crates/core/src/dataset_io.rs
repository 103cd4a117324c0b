//! Dataset assembly and persistence.
//!
//! Every record is one fixed 91 column row: time, six joint values,
//! base IMU, tool IMU, then two IMUs per link from first to last.
//! Empty links keep their columns as zeros so the layout never shifts.
//! Datasets are written as CSV or packed binary, always together with
//! a JSON manifest holding the generating inputs for later replay.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain_model::{ChainPlan, FrameName, GimbalOrder, ImuGeometry, LinkType, LINK_COUNT};
use crate::error::{Error, Result};
use crate::randomizer::{Mode, RandomRanges};
use crate::sensors::{place_sensors, ImuConfig, ImuSample};
use crate::trajectory::MotionSample;

/// 1 time + 6 joints + 6 base + 6 tool + 6 links * 12.
pub const COLUMN_COUNT: usize = 91;
pub const FORMAT_VERSION: u32 = 1;
pub const BINARY_MAGIC: [u8; 8] = *b"CHSIMDAT";

const CHANNELS: [&str; 6] = ["wx", "wy", "wz", "ax", "ay", "az"];

pub fn column_names() -> Vec<String> {
    let mut names = Vec::with_capacity(COLUMN_COUNT);
    names.push("time".to_string());
    for i in 1..=LINK_COUNT {
        names.push(format!("joint_{i}"));
    }
    for ch in CHANNELS {
        names.push(format!("base_imu_{ch}"));
    }
    for ch in CHANNELS {
        names.push(format!("tool_imu_{ch}"));
    }
    for i in 1..=LINK_COUNT {
        for part in ["mid", "end"] {
            for ch in CHANNELS {
                names.push(format!("link{i}_{part}_{ch}"));
            }
        }
    }
    names
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    #[default]
    Csv,
    Binary,
}

impl DatasetFormat {
    pub fn extension(self) -> &'static str {
        match self {
            DatasetFormat::Csv => "csv",
            DatasetFormat::Binary => "bin",
        }
    }
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetFormat::Csv => f.write_str("csv"),
            DatasetFormat::Binary => f.write_str("binary"),
        }
    }
}

impl std::str::FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DatasetFormat::Csv),
            "binary" | "bin" => Ok(DatasetFormat::Binary),
            other => Err(Error::Config(format!("unknown dataset format {other:?}"))),
        }
    }
}

/// One timestep of the dataset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetRecord {
    pub time: f64,
    pub joint_values: [f64; LINK_COUNT],
    pub base_imu: ImuSample,
    pub tool_imu: ImuSample,
    /// Per link: mid sensor then end sensor.
    pub link_imus: [[ImuSample; 2]; LINK_COUNT],
}

impl DatasetRecord {
    pub fn to_row(&self) -> [f64; COLUMN_COUNT] {
        let mut row = [0.0; COLUMN_COUNT];
        row[0] = self.time;
        row[1..7].copy_from_slice(&self.joint_values);
        row[7..13].copy_from_slice(&self.base_imu.channels());
        row[13..19].copy_from_slice(&self.tool_imu.channels());
        for link in 0..LINK_COUNT {
            let start = 19 + link * 12;
            row[start..start + 6].copy_from_slice(&self.link_imus[link][0].channels());
            row[start + 6..start + 12].copy_from_slice(&self.link_imus[link][1].channels());
        }
        row
    }
}

/// Builds one record from per-link joint motion and the sensor samples
/// in canonical order. Empty link columns are forced to zero.
pub fn assemble_record(
    t: f64,
    joints: &[MotionSample; LINK_COUNT],
    samples: &[(FrameName, ImuSample)],
    plan: &ChainPlan,
) -> Result<DatasetRecord> {
    let expected = place_sensors(plan);
    let matches = samples.len() == expected.len()
        && samples
            .iter()
            .zip(&expected)
            .all(|((frame, _), site)| *frame == site.frame);
    if !matches {
        let got: Vec<String> = samples.iter().map(|(f, _)| f.to_string()).collect();
        let want: Vec<String> = expected.iter().map(|s| s.frame.to_string()).collect();
        return Err(Error::InconsistentPlan {
            details: format!(
                "sensor samples [{}] do not match the plan's sensors [{}]",
                got.join(", "),
                want.join(", ")
            ),
        });
    }

    let mut record = DatasetRecord {
        time: t,
        joint_values: [0.0; LINK_COUNT],
        base_imu: ImuSample::ZERO,
        tool_imu: ImuSample::ZERO,
        link_imus: [[ImuSample::ZERO; 2]; LINK_COUNT],
    };
    for i in 0..LINK_COUNT {
        if plan.link_types[i] != LinkType::Empty {
            record.joint_values[i] = joints[i].q;
        }
    }
    for (frame, sample) in samples {
        match frame {
            FrameName::BaseImu => record.base_imu = *sample,
            FrameName::ToolImu => record.tool_imu = *sample,
            FrameName::LinkImuMid(i) => record.link_imus[i - 1][0] = *sample,
            FrameName::LinkImuEnd(i) => record.link_imus[i - 1][1] = *sample,
            FrameName::Tooltip => {
                return Err(Error::InconsistentPlan {
                    details: "tooltip is a marker, not a sensor".into(),
                })
            }
        }
    }
    Ok(record)
}

/// Number of samples for a run: one at t=0 plus one per full step.
/// The small slack absorbs representation error in duration * rate.
pub fn row_count(duration_s: f64, sample_rate_hz: f64) -> usize {
    (duration_s * sample_rate_hz + 1e-9).floor() as usize + 1
}

/// Everything needed to regenerate a dataset, stored next to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: u32,
    pub generator: String,
    /// Name of the pseudo random generator family; fixed so datasets
    /// can be reproduced by other implementations.
    pub prng: String,
    pub mode: Mode,
    pub seed: u64,
    pub randomize_each_run: bool,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub noise_enabled: bool,
    pub gimbal_order: GimbalOrder,
    pub geometry: ImuGeometry,
    pub imu: ImuConfig,
    pub dataset_format: DatasetFormat,
    #[serde(rename = "senSenDH")]
    pub dh_table: [[f64; 5]; 8],
    #[serde(rename = "senSenJ")]
    pub joint_table: [[f64; 5]; 8],
    #[serde(rename = "senSenB")]
    pub base_table: [[f64; 4]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_override: Option<[[f64; 4]; 6]>,
    /// Randomization ranges used for mode 1 draws. These are tool
    /// settings, not measured quantities; kept for reproducibility.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ranges: Option<RandomRanges>,
}

pub fn manifest_path_for(dataset_path: &Path) -> PathBuf {
    let stem = dataset_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    dataset_path.with_file_name(format!("{stem}.manifest.json"))
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".tmp");
    PathBuf::from(os)
}

/// Write-then-rename so readers never observe a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(records: &[DatasetRecord]) -> Vec<u8> {
    let mut text = String::new();
    text.push_str(&format!("# format_version={FORMAT_VERSION}\n"));
    text.push_str(&column_names().join(","));
    text.push('\n');
    let mut cells: Vec<String> = Vec::with_capacity(COLUMN_COUNT);
    for record in records {
        cells.clear();
        cells.extend(record.to_row().iter().map(|v| v.to_string()));
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    text.into_bytes()
}

fn binary_bytes(records: &[DatasetRecord]) -> Vec<u8> {
    let mut bytes = Vec::with_capacity(24 + records.len() * COLUMN_COUNT * 8);
    bytes.extend_from_slice(&BINARY_MAGIC);
    bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    bytes.extend_from_slice(&(COLUMN_COUNT as u32).to_le_bytes());
    bytes.extend_from_slice(&(records.len() as u64).to_le_bytes());
    for record in records {
        for value in record.to_row() {
            bytes.extend_from_slice(&value.to_le_bytes());
        }
    }
    bytes
}

pub fn write_dataset(path: &Path, format: DatasetFormat, records: &[DatasetRecord]) -> Result<()> {
    let bytes = match format {
        DatasetFormat::Csv => csv_bytes(records),
        DatasetFormat::Binary => binary_bytes(records),
    };
    write_atomic(path, &bytes)
}

/// Writes the manifest sidecar next to the dataset and returns its path.
pub fn write_manifest(dataset_path: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let path = manifest_path_for(dataset_path);
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))?;
    text.push('\n');
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

pub fn load_manifest(path: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(path)?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            expected: FORMAT_VERSION,
            found: manifest.format_version,
        });
    }
    Ok(manifest)
}

/// A dataset read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetContents {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn parse_error(path: &Path, detail: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        detail: detail.into(),
    }
}

fn read_csv(path: &Path, text: &str) -> Result<DatasetContents> {
    let mut columns = Vec::new();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(version) = comment.trim().strip_prefix("format_version=") {
                let found: u32 = version
                    .trim()
                    .parse()
                    .map_err(|_| parse_error(path, format!("bad format_version {version:?}")))?;
                if found != FORMAT_VERSION {
                    return Err(Error::FormatVersion {
                        expected: FORMAT_VERSION,
                        found,
                    });
                }
            }
            continue;
        }
        if columns.is_empty() {
            columns = line.split(',').map(str::to_string).collect();
            continue;
        }
        let mut row = Vec::with_capacity(columns.len());
        for cell in line.split(',') {
            let value: f64 = cell.trim().parse().map_err(|_| {
                parse_error(path, format!("line {}: bad number {cell:?}", lineno + 1))
            })?;
            row.push(value);
        }
        if row.len() != columns.len() {
            return Err(parse_error(
                path,
                format!(
                    "line {}: {} cells, expected {} (truncated row?)",
                    lineno + 1,
                    row.len(),
                    columns.len()
                ),
            ));
        }
        rows.push(row);
    }
    if columns.is_empty() {
        return Err(parse_error(path, "no header row"));
    }
    Ok(DatasetContents { columns, rows })
}

fn read_binary(path: &Path, bytes: &[u8]) -> Result<DatasetContents> {
    if bytes.len() < 24 {
        return Err(parse_error(path, "truncated: shorter than the file header"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(Error::FormatVersion {
            expected: FORMAT_VERSION,
            found: version,
        });
    }
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let rows = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    if cols != COLUMN_COUNT {
        return Err(parse_error(
            path,
            format!("declares {cols} columns, expected {COLUMN_COUNT}"),
        ));
    }
    let expected_len = 24 + rows * cols * 8;
    if bytes.len() < expected_len {
        let full_rows = (bytes.len() - 24) / (cols * 8);
        return Err(parse_error(
            path,
            format!("truncated: holds {full_rows} complete rows of the {rows} declared"),
        ));
    }
    if bytes.len() > expected_len {
        return Err(parse_error(path, "trailing bytes after the declared rows"));
    }
    let mut data = Vec::with_capacity(rows);
    let mut offset = 24;
    for _ in 0..rows {
        let mut row = Vec::with_capacity(cols);
        for _ in 0..cols {
            row.push(f64::from_le_bytes(
                bytes[offset..offset + 8].try_into().unwrap(),
            ));
            offset += 8;
        }
        data.push(row);
    }
    Ok(DatasetContents {
        columns: column_names(),
        rows: data,
    })
}

/// Reads a dataset in either format, decided by the magic bytes.
pub fn read_dataset(path: &Path) -> Result<DatasetContents> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(&BINARY_MAGIC) {
        read_binary(path, &bytes)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| parse_error(path, "neither the binary magic nor valid UTF-8 text"))?;
        read_csv(path, &text)
    }
}
