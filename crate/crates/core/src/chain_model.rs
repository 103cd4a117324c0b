//! Chain description and compilation.
//!
//! A chain is described by an 8 row parameter table: rows 1..=6 are the
//! links, row 7 the tool, row 8 the base. Each row holds the four
//! Denavit-Hartenberg parameters (modified convention) plus a link type
//! code. Compilation turns the table into a flat list of elementary
//! transforms with sensor attachment points, which the kinematics layer
//! then evaluates.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Pose;

pub const LINK_COUNT: usize = 6;
pub const TABLE_ROWS: usize = 8;
pub const TABLE_COLS: usize = 5;

/// Row 7 of the table describes the tool, row 8 the base.
pub const TOOL_ROW: usize = 7;
pub const BASE_ROW: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkType {
    Empty,
    Revolute,
    Prismatic,
}

impl LinkType {
    pub fn from_code(value: f64, row: usize) -> Result<Self> {
        if value == 0.0 {
            Ok(LinkType::Empty)
        } else if value == 1.0 {
            Ok(LinkType::Revolute)
        } else if value == 2.0 {
            Ok(LinkType::Prismatic)
        } else {
            Err(Error::InvalidLinkType { row, value })
        }
    }

    pub fn code(self) -> u8 {
        match self {
            LinkType::Empty => 0,
            LinkType::Revolute => 1,
            LinkType::Prismatic => 2,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            LinkType::Empty => "E",
            LinkType::Revolute => "R",
            LinkType::Prismatic => "P",
        }
    }
}

/// One row of the parameter table. Angles in radians, lengths in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DHRow {
    pub alpha: f64,
    pub a: f64,
    pub theta: f64,
    pub d: f64,
    pub link_type: LinkType,
}

impl DHRow {
    pub fn to_raw(&self) -> [f64; TABLE_COLS] {
        [
            self.alpha,
            self.a,
            self.theta,
            self.d,
            f64::from(self.link_type.code()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DHTable {
    rows: [DHRow; TABLE_ROWS],
}

impl DHTable {
    pub fn new(rows: [DHRow; TABLE_ROWS]) -> Self {
        DHTable { rows }
    }

    /// Link rows are addressed 1..=6.
    pub fn link(&self, index: usize) -> Result<&DHRow> {
        if (1..=LINK_COUNT).contains(&index) {
            Ok(&self.rows[index - 1])
        } else {
            Err(Error::LinkIndex { index })
        }
    }

    pub fn tool(&self) -> &DHRow {
        &self.rows[TOOL_ROW - 1]
    }

    pub fn base(&self) -> &DHRow {
        &self.rows[BASE_ROW - 1]
    }

    pub fn link_types(&self) -> [LinkType; LINK_COUNT] {
        let mut out = [LinkType::Empty; LINK_COUNT];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.rows[i].link_type;
        }
        out
    }

    pub fn to_raw(&self) -> [[f64; TABLE_COLS]; TABLE_ROWS] {
        let mut out = [[0.0; TABLE_COLS]; TABLE_ROWS];
        for (i, row) in self.rows.iter().enumerate() {
            out[i] = row.to_raw();
        }
        out
    }
}

fn parse_row(row_index: usize, cells: &[f64]) -> Result<DHRow> {
    for (col, value) in cells.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite {
                row: row_index,
                col: col + 1,
            });
        }
    }
    let link_type = LinkType::from_code(cells[4], row_index)?;
    if cells[1] < 0.0 {
        return Err(Error::NegativeLength {
            row: row_index,
            param: "a",
            value: cells[1],
        });
    }
    if cells[3] < 0.0 {
        return Err(Error::NegativeLength {
            row: row_index,
            param: "d",
            value: cells[3],
        });
    }
    Ok(DHRow {
        alpha: cells[0],
        a: cells[1],
        theta: cells[2],
        d: cells[3],
        link_type,
    })
}

/// Validates and converts a raw 8x5 table.
pub fn parse_dh_table(raw: &[Vec<f64>]) -> Result<DHTable> {
    if raw.len() != TABLE_ROWS {
        return Err(Error::Dimension {
            expected_rows: TABLE_ROWS,
            expected_cols: TABLE_COLS,
            rows: raw.len(),
            cols: raw.first().map_or(0, Vec::len),
        });
    }
    let mut rows = [DHRow {
        alpha: 0.0,
        a: 0.0,
        theta: 0.0,
        d: 0.0,
        link_type: LinkType::Empty,
    }; TABLE_ROWS];
    for (i, cells) in raw.iter().enumerate() {
        if cells.len() != TABLE_COLS {
            return Err(Error::Dimension {
                expected_rows: TABLE_ROWS,
                expected_cols: TABLE_COLS,
                rows: raw.len(),
                cols: cells.len(),
            });
        }
        rows[i] = parse_row(i + 1, cells)?;
    }
    Ok(DHTable::new(rows))
}

pub fn parse_dh_array(raw: &[[f64; TABLE_COLS]; TABLE_ROWS]) -> Result<DHTable> {
    let rows: Vec<Vec<f64>> = raw.iter().map(|r| r.to_vec()).collect();
    parse_dh_table(&rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> Vector3<f64> {
        match self {
            Axis::X => Vector3::x(),
            Axis::Y => Vector3::y(),
            Axis::Z => Vector3::z(),
        }
    }
}

/// Order in which the three base rotations are applied, each about the
/// current (intrinsic) axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GimbalOrder {
    #[default]
    Xyz,
    Xzy,
    Yxz,
    Yzx,
    Zxy,
    Zyx,
}

impl GimbalOrder {
    pub fn axes(self) -> [Axis; 3] {
        match self {
            GimbalOrder::Xyz => [Axis::X, Axis::Y, Axis::Z],
            GimbalOrder::Xzy => [Axis::X, Axis::Z, Axis::Y],
            GimbalOrder::Yxz => [Axis::Y, Axis::X, Axis::Z],
            GimbalOrder::Yzx => [Axis::Y, Axis::Z, Axis::X],
            GimbalOrder::Zxy => [Axis::Z, Axis::X, Axis::Y],
            GimbalOrder::Zyx => [Axis::Z, Axis::Y, Axis::X],
        }
    }
}

impl fmt::Display for GimbalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GimbalOrder::Xyz => "xyz",
            GimbalOrder::Xzy => "xzy",
            GimbalOrder::Yxz => "yxz",
            GimbalOrder::Yzx => "yzx",
            GimbalOrder::Zxy => "zxy",
            GimbalOrder::Zyx => "zyx",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for GimbalOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xyz" => Ok(GimbalOrder::Xyz),
            "xzy" => Ok(GimbalOrder::Xzy),
            "yxz" => Ok(GimbalOrder::Yxz),
            "yzx" => Ok(GimbalOrder::Yzx),
            "zxy" => Ok(GimbalOrder::Zxy),
            "zyx" => Ok(GimbalOrder::Zyx),
            other => Err(Error::Config(format!("unknown gimbal order {other:?}"))),
        }
    }
}

/// Where the two sensors sit along a link, as fractions of the link
/// length, and how far they are shifted sideways off the link axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImuGeometry {
    pub mid_fraction: f64,
    pub end_fraction: f64,
    pub lateral_offset: f64,
}

impl Default for ImuGeometry {
    fn default() -> Self {
        ImuGeometry {
            mid_fraction: 0.5,
            end_fraction: 0.9,
            lateral_offset: 0.05,
        }
    }
}

impl ImuGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("mid_fraction", self.mid_fraction),
            ("end_fraction", self.end_fraction),
        ] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::Config(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        if !self.lateral_offset.is_finite() {
            return Err(Error::Config("lateral_offset must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChainConfig {
    pub gimbal_order: GimbalOrder,
    pub geometry: ImuGeometry,
}

/// Identifies a sensor or marker frame on the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrameName {
    BaseImu,
    LinkImuMid(usize),
    LinkImuEnd(usize),
    ToolImu,
    Tooltip,
}

impl FrameName {
    /// Stable per-sensor stream index used to decorrelate noise draws.
    /// The tooltip is a marker, not a sensor, and has no stream.
    pub fn noise_stream_id(self) -> Option<u64> {
        match self {
            FrameName::BaseImu => Some(0),
            FrameName::LinkImuMid(i) => Some(2 * i as u64 - 1),
            FrameName::LinkImuEnd(i) => Some(2 * i as u64),
            FrameName::ToolImu => Some(13),
            FrameName::Tooltip => None,
        }
    }
}

impl fmt::Display for FrameName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameName::BaseImu => write!(f, "base_imu"),
            FrameName::LinkImuMid(i) => write!(f, "link{i}_imu_mid"),
            FrameName::LinkImuEnd(i) => write!(f, "link{i}_imu_end"),
            FrameName::ToolImu => write!(f, "tool_imu"),
            FrameName::Tooltip => write!(f, "tooltip"),
        }
    }
}

/// One elementary step of the chain. Constant steps carry their pose;
/// joint steps are resolved at evaluation time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ElementaryTransform {
    /// Fixed change of basis applied when entering a link's parameter
    /// frame. Its inverse is `DhToWorld`; the two compose to identity.
    WorldToDh,
    DhToWorld,
    RotX(f64),
    RotZ(f64),
    TransX(f64),
    TransZ(f64),
    /// Revolute joint of the given link, rotation about the local z axis.
    JointRotZ(usize),
    /// Prismatic joint of the given link, translation along local z.
    JointTransZ(usize),
    /// Three translations of the floating base along x, y, z.
    BaseCartesian,
    /// Three intrinsic rotations of the floating base.
    BaseGimbal,
}

impl ElementaryTransform {
    /// Pose of a constant step; `None` for joint driven steps.
    pub fn const_pose(&self) -> Option<Pose> {
        match *self {
            ElementaryTransform::WorldToDh => Some(Pose::world_to_dh()),
            ElementaryTransform::DhToWorld => Some(Pose::dh_to_world()),
            ElementaryTransform::RotX(angle) => Some(Pose::rot_x(angle)),
            ElementaryTransform::RotZ(angle) => Some(Pose::rot_z(angle)),
            ElementaryTransform::TransX(len) => Some(Pose::translation_xyz(len, 0.0, 0.0)),
            ElementaryTransform::TransZ(len) => Some(Pose::translation_xyz(0.0, 0.0, len)),
            ElementaryTransform::JointRotZ(_)
            | ElementaryTransform::JointTransZ(_)
            | ElementaryTransform::BaseCartesian
            | ElementaryTransform::BaseGimbal => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ElementaryTransform::WorldToDh => "world_to_dh",
            ElementaryTransform::DhToWorld => "dh_to_world",
            ElementaryTransform::RotX(_) => "rot_x",
            ElementaryTransform::RotZ(_) => "rot_z",
            ElementaryTransform::TransX(_) => "trans_x",
            ElementaryTransform::TransZ(_) => "trans_z",
            ElementaryTransform::JointRotZ(_) => "joint_rot_z",
            ElementaryTransform::JointTransZ(_) => "joint_trans_z",
            ElementaryTransform::BaseCartesian => "base_cartesian",
            ElementaryTransform::BaseGimbal => "base_gimbal",
        }
    }
}

/// Which part of the chain an element or attachment belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementSource {
    Base,
    Link(usize),
    Tool,
}

impl fmt::Display for ElementSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementSource::Base => write!(f, "base"),
            ElementSource::Link(i) => write!(f, "link{i}"),
            ElementSource::Tool => write!(f, "tool"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlannedElement {
    pub transform: ElementaryTransform,
    pub source: ElementSource,
}

/// A frame rigidly attached to the chain. The frame's state is the
/// running state after `position` elements, composed with `offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Attachment {
    pub frame: FrameName,
    pub position: usize,
    pub offset: Pose,
    pub source: ElementSource,
}

/// A driven degree of freedom contributed by one link.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointSlot {
    pub kind: LinkType,
    /// For prismatic links the table's d parameter is kept as the rail
    /// length; it does not enter the transform chain.
    pub rail_length: Option<f64>,
}

/// Per-link building block produced by the plan_* helpers. Attachment
/// positions are relative to the block's first element.
#[derive(Clone, Debug)]
pub struct LinkPlan {
    pub elements: Vec<ElementaryTransform>,
    pub attachments: Vec<(FrameName, usize, Pose)>,
    pub slot: Option<(usize, JointSlot)>,
}

pub fn plan_revolute_link(index: usize, row: &DHRow, geometry: &ImuGeometry) -> LinkPlan {
    let elements = vec![
        ElementaryTransform::WorldToDh,
        ElementaryTransform::RotX(row.alpha),
        ElementaryTransform::TransZ(row.d),
        ElementaryTransform::JointRotZ(index),
        ElementaryTransform::TransX(row.a),
        ElementaryTransform::DhToWorld,
    ];
    let attachments = link_attachments(index, row.a, geometry);
    LinkPlan {
        elements,
        attachments,
        slot: Some((
            index,
            JointSlot {
                kind: LinkType::Revolute,
                rail_length: None,
            },
        )),
    }
}

pub fn plan_prismatic_link(index: usize, row: &DHRow, geometry: &ImuGeometry) -> LinkPlan {
    let elements = vec![
        ElementaryTransform::WorldToDh,
        ElementaryTransform::RotX(row.alpha),
        ElementaryTransform::RotZ(row.theta),
        ElementaryTransform::JointTransZ(index),
        ElementaryTransform::TransX(row.a),
        ElementaryTransform::DhToWorld,
    ];
    let attachments = link_attachments(index, row.a, geometry);
    LinkPlan {
        elements,
        attachments,
        slot: Some((
            index,
            JointSlot {
                kind: LinkType::Prismatic,
                rail_length: Some(row.d),
            },
        )),
    }
}

pub fn plan_empty_link(_index: usize) -> LinkPlan {
    LinkPlan {
        elements: Vec::new(),
        attachments: Vec::new(),
        slot: None,
    }
}

/// Sensor placement shared by revolute and prismatic links: the mid
/// sensor sits after the joint step, partway along the link and shifted
/// to one side; the end sensor sits after the full link translation,
/// pulled back toward the link and shifted to the other side.
fn link_attachments(index: usize, a: f64, geometry: &ImuGeometry) -> Vec<(FrameName, usize, Pose)> {
    vec![
        (
            FrameName::LinkImuMid(index),
            4,
            Pose::translation_xyz(geometry.mid_fraction * a, geometry.lateral_offset, 0.0),
        ),
        (
            FrameName::LinkImuEnd(index),
            5,
            Pose::translation_xyz(
                (geometry.end_fraction - 1.0) * a,
                -geometry.lateral_offset,
                0.0,
            ),
        ),
    ]
}

pub fn plan_base() -> LinkPlan {
    LinkPlan {
        elements: vec![
            ElementaryTransform::BaseCartesian,
            ElementaryTransform::BaseGimbal,
        ],
        attachments: vec![(FrameName::BaseImu, 2, Pose::identity())],
        slot: None,
    }
}

pub fn plan_tool(row: &DHRow) -> LinkPlan {
    let half = row.a / 2.0;
    LinkPlan {
        elements: vec![
            ElementaryTransform::TransZ(half),
            ElementaryTransform::TransZ(half),
            ElementaryTransform::WorldToDh,
        ],
        attachments: vec![
            (FrameName::ToolImu, 3, Pose::identity()),
            (FrameName::Tooltip, 3, Pose::identity()),
        ],
        slot: None,
    }
}

/// Fully compiled chain: base, links in order, then tool.
#[derive(Clone, Debug)]
pub struct ChainPlan {
    pub elements: Vec<PlannedElement>,
    pub attachments: Vec<Attachment>,
    pub joint_slots: BTreeMap<usize, JointSlot>,
    pub link_types: [LinkType; LINK_COUNT],
    pub gimbal_order: GimbalOrder,
}

impl ChainPlan {
    pub fn joint_count(&self) -> usize {
        self.joint_slots.len()
    }

    /// Attachment lookup by frame name.
    pub fn attachment(&self, frame: FrameName) -> Option<&Attachment> {
        self.attachments.iter().find(|a| a.frame == frame)
    }
}

pub fn compile_chain(table: &DHTable, config: &ChainConfig) -> Result<ChainPlan> {
    config.geometry.validate()?;

    let mut elements = Vec::new();
    let mut attachments = Vec::new();
    let mut joint_slots = BTreeMap::new();

    let mut append = |block: LinkPlan, source: ElementSource| {
        let start = elements.len();
        for transform in block.elements {
            elements.push(PlannedElement { transform, source });
        }
        for (frame, position, offset) in block.attachments {
            attachments.push(Attachment {
                frame,
                position: start + position,
                offset,
                source,
            });
        }
        if let Some((index, slot)) = block.slot {
            joint_slots.insert(index, slot);
        }
    };

    append(plan_base(), ElementSource::Base);
    for index in 1..=LINK_COUNT {
        let row = table.link(index)?;
        let block = match row.link_type {
            LinkType::Empty => plan_empty_link(index),
            LinkType::Revolute => plan_revolute_link(index, row, &config.geometry),
            LinkType::Prismatic => plan_prismatic_link(index, row, &config.geometry),
        };
        append(block, ElementSource::Link(index));
    }
    append(plan_tool(table.tool()), ElementSource::Tool);

    Ok(ChainPlan {
        elements,
        attachments,
        joint_slots,
        link_types: table.link_types(),
        gimbal_order: config.gimbal_order,
    })
}
