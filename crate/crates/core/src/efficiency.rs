//! Closed-form meshing efficiency of each stage and of the compound train.
//!
//! Only tooth-mesh losses are modelled. Backward efficiencies are returned
//! raw: a non-positive value means the stage cannot be back-driven
//! (self-locking), and callers read [`EfficiencyReport::self_locking`]
//! instead of relying on clamping.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{
    CompoundTrainGeometry, CycloidStageGeometry, MeshEfficiencySet, PlanetaryStageGeometry,
    StageGeometry,
};

/// Direction of power flow: forward is motor side to load side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];

    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    /// Sun to carrier.
    pub eta_sh: f64,
    /// Carrier to sun.
    pub eta_hs: f64,
    /// Carrier to pin-wheel.
    pub eta_hr2: f64,
    /// Pin-wheel to carrier.
    pub eta_r2h: f64,
    /// Whole train, sun to pin-wheel.
    pub eta_sr2: f64,
    /// Whole train, pin-wheel to sun.
    pub eta_r2s: f64,
    pub self_locking: bool,
}

impl EfficiencyReport {
    pub fn overall(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Forward => self.eta_sr2,
            Direction::Backward => self.eta_r2s,
        }
    }
}

fn check(geom: &StageGeometry, mesh: &MeshEfficiencySet) -> Result<()> {
    geom.ensure_valid()?;
    mesh.validate()
}

/// Sun-to-carrier efficiency `(eta z_r1 + z_s) / (z_r1 + z_s)` with
/// `eta = eta_sp1 eta_p1r1`.
pub fn planetary_forward(geom: &PlanetaryStageGeometry, mesh: &MeshEfficiencySet) -> Result<f64> {
    check(&(*geom).into(), mesh)?;
    let eta = mesh.planetary_forward();
    let (zs, zr) = (f64::from(geom.z_s), f64::from(geom.z_r1));
    Ok((eta * zr + zs) / (zr + zs))
}

/// Carrier-to-sun efficiency `eta (z_r1 + z_s) / (z_r1 + eta z_s)` with
/// `eta = eta_r1p1 eta_p1s`.
pub fn planetary_backward(
    geom: &PlanetaryStageGeometry,
    mesh: &MeshEfficiencySet,
) -> Result<f64> {
    check(&(*geom).into(), mesh)?;
    let eta = mesh.planetary_backward();
    let (zs, zr) = (f64::from(geom.z_s), f64::from(geom.z_r1));
    Ok(eta * (zr + zs) / (zr + eta * zs))
}

/// Carrier-to-pin-wheel efficiency `(z_r2 - z_p2) / (z_r2 - eta_r2p2 z_p2)`.
pub fn khv_forward(geom: &CycloidStageGeometry, mesh: &MeshEfficiencySet) -> Result<f64> {
    check(&(*geom).into(), mesh)?;
    let eta = mesh.eta_r2p2;
    let (zp, zr) = (f64::from(geom.z_p2), f64::from(geom.z_r2));
    Ok((zr - zp) / (zr - eta * zp))
}

/// Pin-wheel-to-carrier efficiency
/// `(eta_p2r2 z_r2 - z_p2) / (eta_p2r2 (z_r2 - z_p2))`, unclamped.
pub fn khv_backward(geom: &CycloidStageGeometry, mesh: &MeshEfficiencySet) -> Result<f64> {
    check(&(*geom).into(), mesh)?;
    let eta = mesh.eta_p2r2;
    let (zp, zr) = (f64::from(geom.z_p2), f64::from(geom.z_r2));
    Ok((eta * zr - zp) / (eta * (zr - zp)))
}

/// Efficiency of one stage in one direction.
pub fn stage_efficiency(
    geom: &StageGeometry,
    mesh: &MeshEfficiencySet,
    direction: Direction,
) -> Result<f64> {
    match (geom, direction) {
        (StageGeometry::Planetary(g), Direction::Forward) => planetary_forward(g, mesh),
        (StageGeometry::Planetary(g), Direction::Backward) => planetary_backward(g, mesh),
        (StageGeometry::Cycloid(g), Direction::Forward) => khv_forward(g, mesh),
        (StageGeometry::Cycloid(g), Direction::Backward) => khv_backward(g, mesh),
    }
}

/// All stage and train efficiencies of a 3K-H-V train.
pub fn compound_efficiencies(
    train: &CompoundTrainGeometry,
    mesh: &MeshEfficiencySet,
) -> Result<EfficiencyReport> {
    let eta_sh = planetary_forward(&train.input_stage, mesh)?;
    let eta_hs = planetary_backward(&train.input_stage, mesh)?;
    let eta_hr2 = khv_forward(&train.output_stage, mesh)?;
    let eta_r2h = khv_backward(&train.output_stage, mesh)?;
    let eta_r2s = eta_r2h * eta_hs;
    Ok(EfficiencyReport {
        eta_sh,
        eta_hs,
        eta_hr2,
        eta_r2h,
        eta_sr2: eta_sh * eta_hr2,
        eta_r2s,
        self_locking: eta_r2s <= 0.0,
    })
}

/// Largest `eta_p2r2` for which the K-H-V stage self-locks: `z_p2 / z_r2`.
pub fn self_lock_threshold(geom: &CycloidStageGeometry) -> Result<Ratio<u64>> {
    geom.ensure_valid()?;
    Ok(Ratio::new(u64::from(geom.z_p2), u64::from(geom.z_r2)))
}

/// The same efficiencies written in terms of a continuous stage ratio `i`
/// and a single mesh efficiency `eta` (for 2K-H, the product of the two
/// meshes in the direction of interest).
pub mod ratio_forms {
    /// `(eta (i - 1) + 1) / i`
    pub fn planetary_forward(i: f64, eta: f64) -> f64 {
        (eta * (i - 1.0) + 1.0) / i
    }

    /// `eta i / (i - 1 + eta)`
    pub fn planetary_backward(i: f64, eta: f64) -> f64 {
        eta * i / (i - 1.0 + eta)
    }

    /// `1 / (eta + i (1 - eta))`
    pub fn khv_forward(i: f64, eta: f64) -> f64 {
        1.0 / (eta + i * (1.0 - eta))
    }

    /// `(1 + i (eta - 1)) / eta`; zero at `i = 1 / (1 - eta)`.
    pub fn khv_backward(i: f64, eta: f64) -> f64 {
        (1.0 + i * (eta - 1.0)) / eta
    }
}
