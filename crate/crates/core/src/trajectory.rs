//! Sine trajectory generators for joints and the floating base.
//!
//! Every driven coordinate follows q(t) = A sin(w t + p) + b with the
//! velocity and acceleration given in closed form, so the kinematic
//! layer never differentiates numerically.

use serde::{Deserialize, Serialize};

use crate::chain_model::{LinkType, LINK_COUNT};
use crate::error::{Error, Result};

pub const JOINT_TABLE_ROWS: usize = 8;
pub const JOINT_TABLE_COLS: usize = 5;
pub const BASE_TABLE_ROWS: usize = 2;
pub const BASE_TABLE_COLS: usize = 4;

/// Amplitude in rad or m, frequency in rad/s, phase in rad.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SineParams {
    pub amplitude: f64,
    pub bias: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// Position, velocity and acceleration of one coordinate at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MotionSample {
    pub q: f64,
    pub qd: f64,
    pub qdd: f64,
}

impl MotionSample {
    pub const ZERO: MotionSample = MotionSample {
        q: 0.0,
        qd: 0.0,
        qdd: 0.0,
    };
}

pub fn eval_sine(params: &SineParams, t: f64) -> MotionSample {
    let arg = params.frequency * t + params.phase;
    let (sin, cos) = arg.sin_cos();
    MotionSample {
        q: params.amplitude * sin + params.bias,
        qd: params.amplitude * params.frequency * cos,
        qdd: -params.amplitude * params.frequency * params.frequency * sin,
    }
}

/// One row of the joint oscillation table. A row carries separate
/// amplitudes for the revolute and prismatic reading of the same link,
/// so the link type can change without touching this table.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct JointOscRow {
    pub amplitude: f64,
    pub prismatic_amplitude: f64,
    pub bias: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl JointOscRow {
    pub fn to_raw(&self) -> [f64; JOINT_TABLE_COLS] {
        [
            self.amplitude,
            self.prismatic_amplitude,
            self.bias,
            self.frequency,
            self.phase,
        ]
    }

    fn params(&self, kind: LinkType) -> SineParams {
        let amplitude = match kind {
            LinkType::Prismatic => self.prismatic_amplitude,
            _ => self.amplitude,
        };
        SineParams {
            amplitude,
            bias: self.bias,
            frequency: self.frequency,
            phase: self.phase,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointOscTable {
    rows: [JointOscRow; JOINT_TABLE_ROWS],
}

impl JointOscTable {
    pub fn new(rows: [JointOscRow; JOINT_TABLE_ROWS]) -> Self {
        JointOscTable { rows }
    }

    pub fn row(&self, index: usize) -> Result<&JointOscRow> {
        if (1..=JOINT_TABLE_ROWS).contains(&index) {
            Ok(&self.rows[index - 1])
        } else {
            Err(Error::LinkIndex { index })
        }
    }

    pub fn to_raw(&self) -> [[f64; JOINT_TABLE_COLS]; JOINT_TABLE_ROWS] {
        let mut out = [[0.0; JOINT_TABLE_COLS]; JOINT_TABLE_ROWS];
        for (i, row) in self.rows.iter().enumerate() {
            out[i] = row.to_raw();
        }
        out
    }
}

pub fn parse_joint_table(raw: &[Vec<f64>]) -> Result<JointOscTable> {
    if raw.len() != JOINT_TABLE_ROWS {
        return Err(Error::Dimension {
            expected_rows: JOINT_TABLE_ROWS,
            expected_cols: JOINT_TABLE_COLS,
            rows: raw.len(),
            cols: raw.first().map_or(0, Vec::len),
        });
    }
    let mut rows = [JointOscRow::default(); JOINT_TABLE_ROWS];
    for (i, cells) in raw.iter().enumerate() {
        if cells.len() != JOINT_TABLE_COLS {
            return Err(Error::Dimension {
                expected_rows: JOINT_TABLE_ROWS,
                expected_cols: JOINT_TABLE_COLS,
                rows: raw.len(),
                cols: cells.len(),
            });
        }
        for (col, value) in cells.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    row: i + 1,
                    col: col + 1,
                });
            }
        }
        if cells[3] < 0.0 {
            return Err(Error::NegativeFrequency {
                row: i + 1,
                value: cells[3],
            });
        }
        rows[i] = JointOscRow {
            amplitude: cells[0],
            prismatic_amplitude: cells[1],
            bias: cells[2],
            frequency: cells[3],
            phase: cells[4],
        };
    }
    Ok(JointOscTable::new(rows))
}

pub fn parse_joint_array(raw: &[[f64; JOINT_TABLE_COLS]; JOINT_TABLE_ROWS]) -> Result<JointOscTable> {
    let rows: Vec<Vec<f64>> = raw.iter().map(|r| r.to_vec()).collect();
    parse_joint_table(&rows)
}

/// Motion of one link's joint at time t. Empty links report zero motion.
pub fn joint_motion(
    table: &JointOscTable,
    link: usize,
    kind: LinkType,
    t: f64,
) -> Result<MotionSample> {
    if !(1..=LINK_COUNT).contains(&link) {
        return Err(Error::LinkIndex { index: link });
    }
    if kind == LinkType::Empty {
        return Ok(MotionSample::ZERO);
    }
    let row = table.row(link)?;
    Ok(eval_sine(&row.params(kind), t))
}

/// Base oscillation table: one row shared by the three translations,
/// one row shared by the three rotations.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BaseOscRow {
    pub amplitude: f64,
    pub bias: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl BaseOscRow {
    pub fn to_raw(&self) -> [f64; BASE_TABLE_COLS] {
        [self.amplitude, self.bias, self.frequency, self.phase]
    }

    fn params(&self) -> SineParams {
        SineParams {
            amplitude: self.amplitude,
            bias: self.bias,
            frequency: self.frequency,
            phase: self.phase,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BaseOscTable {
    pub translation: BaseOscRow,
    pub rotation: BaseOscRow,
}

impl BaseOscTable {
    pub fn to_raw(&self) -> [[f64; BASE_TABLE_COLS]; BASE_TABLE_ROWS] {
        [self.translation.to_raw(), self.rotation.to_raw()]
    }
}

pub fn parse_base_table(raw: &[Vec<f64>]) -> Result<BaseOscTable> {
    if raw.len() != BASE_TABLE_ROWS {
        return Err(Error::Dimension {
            expected_rows: BASE_TABLE_ROWS,
            expected_cols: BASE_TABLE_COLS,
            rows: raw.len(),
            cols: raw.first().map_or(0, Vec::len),
        });
    }
    let mut rows = [BaseOscRow::default(); BASE_TABLE_ROWS];
    for (i, cells) in raw.iter().enumerate() {
        if cells.len() != BASE_TABLE_COLS {
            return Err(Error::Dimension {
                expected_rows: BASE_TABLE_ROWS,
                expected_cols: BASE_TABLE_COLS,
                rows: raw.len(),
                cols: cells.len(),
            });
        }
        for (col, value) in cells.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    row: i + 1,
                    col: col + 1,
                });
            }
        }
        if cells[2] < 0.0 {
            return Err(Error::NegativeFrequency {
                row: i + 1,
                value: cells[2],
            });
        }
        rows[i] = BaseOscRow {
            amplitude: cells[0],
            bias: cells[1],
            frequency: cells[2],
            phase: cells[3],
        };
    }
    Ok(BaseOscTable {
        translation: rows[0],
        rotation: rows[1],
    })
}

pub fn parse_base_array(raw: &[[f64; BASE_TABLE_COLS]; BASE_TABLE_ROWS]) -> Result<BaseOscTable> {
    let rows: Vec<Vec<f64>> = raw.iter().map(|r| r.to_vec()).collect();
    parse_base_table(&rows)
}

/// Per-axis base trajectories in the order x, y, z translation then the
/// three gimbal angles bound to the x, y, z axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseAxes {
    pub axes: [SineParams; 6],
}

impl BaseAxes {
    pub const STILL: BaseAxes = BaseAxes {
        axes: [SineParams {
            amplitude: 0.0,
            bias: 0.0,
            frequency: 0.0,
            phase: 0.0,
        }; 6],
    };

    /// Replicates the shared table: translation row for axes 0..3,
    /// rotation row for axes 3..6.
    pub fn from_shared(table: &BaseOscTable) -> Self {
        let t = table.translation.params();
        let r = table.rotation.params();
        BaseAxes {
            axes: [t, t, t, r, r, r],
        }
    }

    /// Full per-axis control, rows ordered as the axes.
    pub fn from_rows(rows: &[[f64; BASE_TABLE_COLS]; 6]) -> Result<Self> {
        let mut axes = [SineParams::default(); 6];
        for (i, row) in rows.iter().enumerate() {
            for (col, value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFinite {
                        row: i + 1,
                        col: col + 1,
                    });
                }
            }
            if row[2] < 0.0 {
                return Err(Error::NegativeFrequency {
                    row: i + 1,
                    value: row[2],
                });
            }
            axes[i] = SineParams {
                amplitude: row[0],
                bias: row[1],
                frequency: row[2],
                phase: row[3],
            };
        }
        Ok(BaseAxes { axes })
    }

    pub fn sample(&self, t: f64) -> [MotionSample; 6] {
        let mut out = [MotionSample::ZERO; 6];
        for (i, params) in self.axes.iter().enumerate() {
            out[i] = eval_sine(params, t);
        }
        out
    }
}

/// Motion of all six base coordinates under the shared table.
pub fn base_motion(table: &BaseOscTable, t: f64) -> [MotionSample; 6] {
    BaseAxes::from_shared(table).sample(t)
}
