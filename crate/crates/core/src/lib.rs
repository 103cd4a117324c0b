//! Kinematic simulation of a reconfigurable serial chain of up to six
//! links riding on a freely oscillating base, instrumented with
//! synthetic inertial sensors.
//!
//! The crate is organized as a pipeline:
//!
//! * [`chain_model`] describes a chain as an 8 row parameter table and
//!   compiles it into a flat sequence of elementary transforms with
//!   sensor attachment points.
//! * [`trajectory`] evaluates the sine laws driving every joint and the
//!   six base axes, with exact first and second derivatives.
//! * [`kinematics`] propagates position, velocity and acceleration
//!   through the compiled chain in closed form, and carries a finite
//!   difference probe used for independent verification.
//! * [`sensors`] turns frame states into gyroscope and accelerometer
//!   readings, optionally with seeded, replayable Gaussian noise.
//! * [`randomizer`] draws complete chain configurations from documented
//!   ranges, deterministically per seed.
//! * [`dataset_io`] fixes the 91 column record layout and the CSV,
//!   binary and manifest file formats.
//! * [`runner`] ties everything together into runs and batches.
//!
//! The same seed, inputs and settings always reproduce a dataset bit
//! for bit; the manifest written next to every dataset holds all of
//! them.

pub mod chain_model;
pub mod dataset_io;
pub mod error;
pub mod kinematics;
pub mod randomizer;
pub mod runner;
pub mod sensors;
pub mod trajectory;

pub use chain_model::{
    compile_chain, ChainConfig, ChainPlan, DHTable, FrameName, GimbalOrder, ImuGeometry, LinkType,
    LINK_COUNT,
};
pub use dataset_io::{
    column_names, read_dataset, write_dataset, DatasetFormat, DatasetRecord, RunManifest,
    COLUMN_COUNT, FORMAT_VERSION,
};
pub use error::{Error, Result};
pub use kinematics::{evaluate_chain, fk_pose, FrameState, FrozenConfig, Pose};
pub use randomizer::{Mode, RandomRanges};
pub use runner::{run_batch, run_once, simulate, RunConfig};
pub use sensors::{ImuConfig, ImuSample};
pub use trajectory::{BaseAxes, JointOscTable, MotionSample};
