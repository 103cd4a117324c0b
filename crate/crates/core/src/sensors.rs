//! IMU measurement model: noise-free readout of a frame state plus
//! reproducible additive Gaussian noise.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::chain_model::{ChainPlan, FrameName, LinkType, LINK_COUNT};
use crate::error::{Error, Result};
use crate::kinematics::FrameState;

/// Frame the six signals are resolved in. Physical IMUs report in the
/// sensor body frame; world resolution is kept for analysis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResolveFrame {
    #[default]
    Body,
    World,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImuConfig {
    pub resolve_in: ResolveFrame,
    /// When set, the accelerometer reports specific force (kinematic
    /// acceleration minus gravity). Off by default: the plain readout
    /// is the kinematic acceleration itself.
    pub include_gravity: bool,
    pub gravity: [f64; 3],
    pub sigma_gyro: f64,
    pub sigma_accel: f64,
    pub rng_seed: u64,
}

impl Default for ImuConfig {
    fn default() -> Self {
        ImuConfig {
            resolve_in: ResolveFrame::Body,
            include_gravity: false,
            gravity: [0.0, 0.0, -9.80665],
            sigma_gyro: 2e-3,
            sigma_accel: 2e-2,
            rng_seed: 0,
        }
    }
}

impl ImuConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, sigma) in [("sigma_gyro", self.sigma_gyro), ("sigma_accel", self.sigma_accel)] {
            if !sigma.is_finite() || sigma < 0.0 {
                return Err(Error::Config(format!(
                    "{name} must be a nonnegative finite number, got {sigma}"
                )));
            }
        }
        if self.gravity.iter().any(|g| !g.is_finite()) {
            return Err(Error::Config("gravity vector must be finite".into()));
        }
        Ok(())
    }
}

/// One six-signal reading: gyro triple then accelerometer triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImuSample {
    pub angular_velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
}

impl ImuSample {
    pub const ZERO: ImuSample = ImuSample {
        angular_velocity: Vector3::new(0.0, 0.0, 0.0),
        acceleration: Vector3::new(0.0, 0.0, 0.0),
    };

    /// Channel order as written to datasets: wx, wy, wz, ax, ay, az.
    pub fn channels(&self) -> [f64; 6] {
        [
            self.angular_velocity.x,
            self.angular_velocity.y,
            self.angular_velocity.z,
            self.acceleration.x,
            self.acceleration.y,
            self.acceleration.z,
        ]
    }
}

/// Noise-free readout of a frame state.
pub fn measure(state: &FrameState, config: &ImuConfig) -> ImuSample {
    let mut accel = state.linear_acceleration;
    if config.include_gravity {
        accel -= Vector3::from(config.gravity);
    }
    match config.resolve_in {
        ResolveFrame::Body => {
            let to_body = state.rotation.transpose();
            ImuSample {
                angular_velocity: to_body * state.angular_velocity,
                acceleration: to_body * accel,
            }
        }
        ResolveFrame::World => ImuSample {
            angular_velocity: state.angular_velocity,
            acceleration: accel,
        },
    }
}

/// Stream for one (sensor, sample) pair. Keying the stream by sample
/// index rather than call order keeps parallel evaluation and partial
/// replays bit-reproducible.
pub fn noise_rng(seed: u64, sensor_stream: u64, sample_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&sensor_stream.to_le_bytes());
    key[16..24].copy_from_slice(&sample_index.to_le_bytes());
    key[24..32].copy_from_slice(b"imu-ns01");
    ChaCha8Rng::from_seed(key)
}

/// Adds zero-mean Gaussian noise per channel, gyro channels first.
pub fn add_noise(sample: &ImuSample, config: &ImuConfig, rng: &mut impl Rng) -> Result<ImuSample> {
    let gyro = Normal::new(0.0, config.sigma_gyro)
        .map_err(|e| Error::Config(format!("sigma_gyro: {e}")))?;
    let accel = Normal::new(0.0, config.sigma_accel)
        .map_err(|e| Error::Config(format!("sigma_accel: {e}")))?;
    let w = Vector3::new(gyro.sample(rng), gyro.sample(rng), gyro.sample(rng));
    let a = Vector3::new(accel.sample(rng), accel.sample(rng), accel.sample(rng));
    Ok(ImuSample {
        angular_velocity: sample.angular_velocity + w,
        acceleration: sample.acceleration + a,
    })
}

/// A sensor that contributes columns to the dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SensorSite {
    pub frame: FrameName,
    pub noise_stream: u64,
}

/// Sensors in dataset column order: base, tool, then each non-empty
/// link's mid and end sensors from first link to last.
pub fn place_sensors(plan: &ChainPlan) -> Vec<SensorSite> {
    let mut frames = vec![FrameName::BaseImu, FrameName::ToolImu];
    for link in 1..=LINK_COUNT {
        if plan.link_types[link - 1] != LinkType::Empty {
            frames.push(FrameName::LinkImuMid(link));
            frames.push(FrameName::LinkImuEnd(link));
        }
    }
    frames
        .into_iter()
        .map(|frame| SensorSite {
            frame,
            noise_stream: frame.noise_stream_id().expect("sensor frame"),
        })
        .collect()
}
