//! Seeded generation of chain and trajectory tables.
//!
//! All draws come from a ChaCha8 stream keyed by the run seed, so a
//! (seed, ranges) pair fully determines the output on every platform.
//! The draw order is part of the format: table cells are consumed row
//! by row in a fixed sequence and must not be reordered.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain_model::{parse_dh_table, DHTable, TABLE_ROWS};
use crate::error::{Error, Result};
use crate::trajectory::{
    parse_base_table, parse_joint_table, BaseOscTable, JointOscTable, JOINT_TABLE_ROWS,
};

/// Sampling ranges for every randomized quantity. Lengths in meters,
/// angles in radians, frequencies in rad/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomRanges {
    pub a_range: [f64; 2],
    pub d_range: [f64; 2],
    pub angle_choices: Vec<f64>,
    /// Weights for Empty, Revolute, Prismatic in that order.
    pub link_type_weights: [f64; 3],
    pub revolute_amplitude: [f64; 2],
    pub prismatic_amplitude: [f64; 2],
    pub bias: [f64; 2],
    pub frequency: [f64; 2],
    pub phase: [f64; 2],
}

impl Default for RandomRanges {
    fn default() -> Self {
        RandomRanges {
            a_range: [0.8, 0.9],
            d_range: [0.1, 0.3],
            angle_choices: vec![-FRAC_PI_2, 0.0, FRAC_PI_2],
            link_type_weights: [1.0, 1.0, 1.0],
            revolute_amplitude: [0.0, FRAC_PI_2],
            prismatic_amplitude: [0.0, 0.3],
            bias: [0.0, 0.0],
            frequency: [0.1, 2.0],
            phase: [0.0, TAU],
        }
    }
}

impl RandomRanges {
    pub fn validate(&self) -> Result<()> {
        let pairs = [
            ("a_range", self.a_range),
            ("d_range", self.d_range),
            ("revolute_amplitude", self.revolute_amplitude),
            ("prismatic_amplitude", self.prismatic_amplitude),
            ("bias", self.bias),
            ("frequency", self.frequency),
            ("phase", self.phase),
        ];
        for (name, [lo, hi]) in pairs {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidRange {
                    what: name.into(),
                    lo,
                    hi,
                });
            }
        }
        for (name, [lo, hi]) in [
            ("a_range", self.a_range),
            ("d_range", self.d_range),
            ("frequency", self.frequency),
        ] {
            if lo < 0.0 {
                return Err(Error::InvalidRange {
                    what: format!("{name} (must be nonnegative)"),
                    lo,
                    hi,
                });
            }
        }
        if self.angle_choices.is_empty() || self.angle_choices.iter().any(|a| !a.is_finite()) {
            return Err(Error::Config(
                "angle_choices must be a nonempty list of finite angles".into(),
            ));
        }
        let sum: f64 = self.link_type_weights.iter().sum();
        if self.link_type_weights.iter().any(|&w| !w.is_finite() || w < 0.0) || sum <= 0.0 {
            return Err(Error::Config(
                "link_type_weights must be nonnegative with a positive sum".into(),
            ));
        }
        Ok(())
    }
}

/// Run modes follow the original numbering: 1 randomizes a fresh
/// configuration from the seed, 2 consumes user supplied tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Mode {
    #[default]
    Randomize,
    FromInputs,
}

impl From<Mode> for u8 {
    fn from(mode: Mode) -> u8 {
        match mode {
            Mode::Randomize => 1,
            Mode::FromInputs => 2,
        }
    }
}

impl TryFrom<u8> for Mode {
    type Error = String;

    fn try_from(value: u8) -> std::result::Result<Self, String> {
        match value {
            1 => Ok(Mode::Randomize),
            2 => Ok(Mode::FromInputs),
            other => Err(format!("mode must be 1 or 2, got {other}")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Randomize => f.write_str("randomize (1)"),
            Mode::FromInputs => f.write_str("from-inputs (2)"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "randomize" => Ok(Mode::Randomize),
            "2" | "from-inputs" => Ok(Mode::FromInputs),
            other => Err(Error::Config(format!(
                "mode must be 1, 2, randomize or from-inputs, got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunMode {
    pub mode: Mode,
    pub randomize_each_run: bool,
}

/// The three resolved input tables a simulation runs from.
#[derive(Clone, Debug, PartialEq)]
pub struct InputTables {
    pub dh: DHTable,
    pub joints: JointOscTable,
    pub base: BaseOscTable,
}

/// Raw user supplied tables, each optional.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ProvidedTables {
    pub dh: Option<Vec<Vec<f64>>>,
    pub joints: Option<Vec<Vec<f64>>>,
    pub base: Option<Vec<Vec<f64>>>,
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn pick_angle(rng: &mut ChaCha8Rng, choices: &[f64]) -> f64 {
    choices[rng.gen_range(0..choices.len())]
}

/// One draw over the cumulative weights; zero-weight entries are
/// unreachable.
fn pick_weighted(rng: &mut ChaCha8Rng, weights: &[f64; 3]) -> f64 {
    let total: f64 = weights.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    for (code, &w) in weights.iter().enumerate() {
        cumulative += w;
        if u < cumulative {
            return code as f64;
        }
    }
    // Only reachable through floating point edge cases at u = total.
    (weights.len() - 1) as f64
}

/// Draws a full configuration. The tool and base rows are populated
/// from the same ranges as the links; the structurally unused cells in
/// those rows are harmless.
pub fn randomize_config(seed: u64, ranges: &RandomRanges) -> Result<InputTables> {
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut dh = Vec::with_capacity(TABLE_ROWS);
    for _ in 0..TABLE_ROWS {
        let alpha = pick_angle(&mut rng, &ranges.angle_choices);
        let a = uniform(&mut rng, ranges.a_range);
        let theta = pick_angle(&mut rng, &ranges.angle_choices);
        let d = uniform(&mut rng, ranges.d_range);
        let link_type = pick_weighted(&mut rng, &ranges.link_type_weights);
        dh.push(vec![alpha, a, theta, d, link_type]);
    }

    let mut joints = Vec::with_capacity(JOINT_TABLE_ROWS);
    for _ in 0..JOINT_TABLE_ROWS {
        let amplitude = uniform(&mut rng, ranges.revolute_amplitude);
        let prismatic_amplitude = uniform(&mut rng, ranges.prismatic_amplitude);
        let bias = uniform(&mut rng, ranges.bias);
        let frequency = uniform(&mut rng, ranges.frequency);
        let phase = uniform(&mut rng, ranges.phase);
        joints.push(vec![amplitude, prismatic_amplitude, bias, frequency, phase]);
    }

    let mut base = Vec::with_capacity(2);
    for amplitude_range in [ranges.prismatic_amplitude, ranges.revolute_amplitude] {
        let amplitude = uniform(&mut rng, amplitude_range);
        let bias = uniform(&mut rng, ranges.bias);
        let frequency = uniform(&mut rng, ranges.frequency);
        let phase = uniform(&mut rng, ranges.phase);
        base.push(vec![amplitude, bias, frequency, phase]);
    }

    Ok(InputTables {
        dh: parse_dh_table(&dh)?,
        joints: parse_joint_table(&joints)?,
        base: parse_base_table(&base)?,
    })
}

/// Resolves the tables a run will use. Mode 1 draws fresh tables from
/// the seed and ignores anything provided; mode 2 requires all three
/// tables and validates them.
pub fn resolve_inputs(
    run: &RunMode,
    seed: u64,
    ranges: &RandomRanges,
    provided: &ProvidedTables,
) -> Result<InputTables> {
    match run.mode {
        Mode::Randomize => {
            if provided.dh.is_some() || provided.joints.is_some() || provided.base.is_some() {
                log::debug!("mode 1 run: provided input tables are ignored");
            }
            randomize_config(seed, ranges)
        }
        Mode::FromInputs => {
            let mut missing = Vec::new();
            if provided.dh.is_none() {
                missing.push("dh");
            }
            if provided.joints.is_none() {
                missing.push("joints");
            }
            if provided.base.is_none() {
                missing.push("base");
            }
            if !missing.is_empty() {
                return Err(Error::MissingInputs {
                    missing: missing.join(", "),
                });
            }
            if !run.randomize_each_run {
                log::warn!("mode 2 run with randomization turned off: reusing provided tables");
            }
            Ok(InputTables {
                dh: parse_dh_table(provided.dh.as_ref().unwrap())?,
                joints: parse_joint_table(provided.joints.as_ref().unwrap())?,
                base: parse_base_table(provided.base.as_ref().unwrap())?,
            })
        }
    }
}

/// Seed for the run after this one. With randomize_each_run the seed
/// advances by one, giving the reproducible schedule s, s+1, s+2, ...
pub fn post_run_hook(run: &RunMode, seed: u64) -> u64 {
    if run.randomize_each_run {
        seed.wrapping_add(1)
    } else {
        seed
    }
}
