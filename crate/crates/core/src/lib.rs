//! Analysis and design tools for planetary-cycloidal (3K-H-V) gear trains.
//!
//! A 3K-H-V train chains an involute 2K-H planetary input stage (sun S,
//! planets P1, fixed ring R1) with a cycloidal K-H-V output stage (cycloid
//! disc P2, pin-wheel R2) on one shared carrier H. The crate covers:
//!
//! - [`geometry`]: tooth-count geometry and its constraints
//! - [`kinematics`]: member speeds and exact reduction ratios
//! - [`efficiency`]: closed-form forward/backward efficiencies, self-locking
//! - [`quasistatic`]: an independent force and power-flow solver
//! - [`design_search`]: exhaustive tooth-count search for a target ratio
//! - [`sweep`]: efficiency curves over continuous ratio and mesh efficiency

pub mod design_search;
pub mod efficiency;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod quasistatic;
pub mod ratio;
pub mod sweep;

pub use efficiency::{compound_efficiencies, Direction, EfficiencyReport};
pub use error::{Error, Result};
pub use geometry::{
    CompoundTrainGeometry, CycloidStageGeometry, MeshEfficiencySet, PlanetaryStageGeometry,
    StageGeometry,
};
pub use kinematics::{compound_ratio, khv_ratio, planetary_ratio, SpeedState};
pub use quasistatic::{solve_case, DriveCase, PowerFlowReport};
pub use ratio::GearRatio;
