//! Quasi-static torque and power-flow solver.
//!
//! This is a second, independent route to the stage efficiencies. For one
//! drive case it solves the mesh-force balance with the idle planet torque
//! set to zero, forms the mesh power loss in the carrier frame, takes the
//! absolute power of the sun or pin-wheel in the stationary frame and only
//! then divides. None of it calls into [`crate::efficiency`], which is what
//! makes [`cross_check`] meaningful.
//!
//! Radii are pitch radii with a unit module, so forces are in N·m per unit
//! module length. Only their ratios matter for efficiency.

use serde::{Deserialize, Serialize};

use crate::efficiency::{stage_efficiency, Direction};
use crate::error::{Error, Result};
use crate::geometry::{CycloidStageGeometry, MeshEfficiencySet, PlanetaryStageGeometry, StageGeometry};
use crate::kinematics::{khv_speeds, planetary_speeds, SpeedState};

/// Relative difference above which [`cross_check`] flags a mismatch.
pub const CROSS_CHECK_TOLERANCE: f64 = 1e-9;

/// One loading condition. The input torque is applied along the input
/// speed, so the input power is always `input_torque * |input_speed|`.
///
/// Forward cases drive the sun (2K-H) or the carrier (K-H-V); backward
/// cases drive the carrier (2K-H) or the pin-wheel (K-H-V).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveCase {
    pub direction: Direction,
    /// N·m, must be positive.
    pub input_torque: f64,
    /// rad/s, must be nonzero.
    pub input_speed: f64,
    pub mesh: MeshEfficiencySet,
}

impl DriveCase {
    pub fn new(direction: Direction, input_torque: f64, input_speed: f64, mesh: MeshEfficiencySet) -> Self {
        Self {
            direction,
            input_torque,
            input_speed,
            mesh,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.input_speed.is_finite() && self.input_speed != 0.0) {
            return Err(Error::InvalidInputSpeed(self.input_speed));
        }
        if !(self.input_torque.is_finite() && self.input_torque > 0.0) {
            return Err(Error::InvalidInputTorque(self.input_torque));
        }
        self.mesh.validate()
    }

    fn signed_torque(&self) -> f64 {
        self.input_torque.copysign(self.input_speed)
    }
}

/// Member torques (N·m). Members of the other stage are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MemberTorques {
    pub sun: Option<f64>,
    pub planet: Option<f64>,
    pub ring1: Option<f64>,
    pub disc: Option<f64>,
    pub ring2: Option<f64>,
    /// Carrier torque from the moment balance of the whole stage.
    pub carrier: f64,
}

/// Tangential mesh forces; which pair exists depends on stage and direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum MeshForces {
    /// Sun-driven 2K-H: ring on planet, planet on sun.
    PlanetaryForward { f_r1p1: f64, f_p1s: f64 },
    /// Carrier-driven 2K-H: planet on ring, sun on planet.
    PlanetaryBackward { f_p1r1: f64, f_sp1: f64 },
    /// Carrier-driven K-H-V: disc on pin-wheel.
    CycloidForward { f_p2r2: f64 },
    /// Pin-wheel-driven K-H-V: pin-wheel on disc.
    CycloidBackward { f_r2p2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFlowReport {
    pub direction: Direction,
    pub torques: MemberTorques,
    pub forces: MeshForces,
    pub speeds: SpeedState,
    /// Carrier-frame power of the active member, W.
    pub active_power_carrier_frame: f64,
    /// Carrier-frame power of the follower member, W.
    pub follower_power_carrier_frame: f64,
    pub power_in: f64,
    pub power_out: f64,
    pub power_loss: f64,
    pub efficiency: f64,
    /// Backward K-H-V efficiency came out non-positive.
    pub self_locking: bool,
}

/// Solves one drive case on one stage.
pub fn solve_case(geom: &StageGeometry, case: &DriveCase) -> Result<PowerFlowReport> {
    geom.ensure_valid()?;
    case.validate()?;
    let report = match (geom, case.direction) {
        (StageGeometry::Planetary(g), Direction::Forward) => planetary_forward_case(g, case)?,
        (StageGeometry::Planetary(g), Direction::Backward) => planetary_backward_case(g, case)?,
        (StageGeometry::Cycloid(g), Direction::Forward) => cycloid_forward_case(g, case)?,
        (StageGeometry::Cycloid(g), Direction::Backward) => cycloid_backward_case(g, case)?,
    };
    Ok(report)
}

fn radius(z: u32) -> f64 {
    f64::from(z) / 2.0
}

fn planetary_forward_case(g: &PlanetaryStageGeometry, case: &DriveCase) -> Result<PowerFlowReport> {
    let (rs, rp, rr) = (radius(g.z_s), radius(g.z_p1), radius(g.z_r1));
    let m = &case.mesh;
    let speeds = planetary_speeds(g, case.input_speed)?;
    let sun = speeds.sun.expect("2K-H sun speed");
    let ring = speeds.ring1.expect("2K-H ring speed");

    // T_s = r_s F_p1s, T_p1 = r_p1 F_r1p1 - eta_sp1 r_p1 F_p1s = 0,
    // T_r1 = eta_p1r1 r_r1 F_r1p1, with the sun carrying the input torque.
    let t_s = case.signed_torque();
    let f_p1s = t_s / rs;
    let f_r1p1 = m.eta_sp1 * f_p1s;
    let t_p1 = rp * f_r1p1 - m.eta_sp1 * rp * f_p1s;
    let t_r1 = m.eta_p1r1 * rr * f_r1p1;

    // Sun is active, ring is follower.
    let p_active = t_s * sun.carrier_frame;
    let p_follower = -t_r1 * ring.carrier_frame;
    let power_loss = p_active - p_follower;
    let power_in = t_s * sun.absolute;
    let power_out = power_in - power_loss;

    Ok(PowerFlowReport {
        direction: Direction::Forward,
        torques: MemberTorques {
            sun: Some(t_s),
            planet: Some(t_p1),
            ring1: Some(t_r1),
            carrier: -(t_s + t_r1),
            ..Default::default()
        },
        forces: MeshForces::PlanetaryForward { f_r1p1, f_p1s },
        speeds,
        active_power_carrier_frame: p_active,
        follower_power_carrier_frame: p_follower,
        power_in,
        power_out,
        power_loss,
        efficiency: power_out / power_in,
        self_locking: false,
    })
}

fn planetary_backward_case(g: &PlanetaryStageGeometry, case: &DriveCase) -> Result<PowerFlowReport> {
    let (rs, rp, rr) = (radius(g.z_s), radius(g.z_p1), radius(g.z_r1));
    let m = &case.mesh;
    // The carrier is driven; the sun turns (z_s + z_r1) / z_s times faster.
    let omega_s = case.input_speed * (f64::from(g.z_s) + f64::from(g.z_r1)) / f64::from(g.z_s);
    let speeds = planetary_speeds(g, omega_s)?;
    let sun = speeds.sun.expect("2K-H sun speed");
    let ring = speeds.ring1.expect("2K-H ring speed");

    // T_s = eta_p1s r_s F_sp1, T_p1 = eta_r1p1 r_p1 F_p1r1 - r_p1 F_sp1 = 0,
    // T_r1 = r_r1 F_p1r1, and the carrier balances -(T_s + T_r1) = T_in.
    let t_in = case.signed_torque();
    let f_p1r1 = -t_in / (rr + m.eta_p1s * m.eta_r1p1 * rs);
    let f_sp1 = m.eta_r1p1 * f_p1r1;
    let t_s = m.eta_p1s * rs * f_sp1;
    let t_p1 = m.eta_r1p1 * rp * f_p1r1 - rp * f_sp1;
    let t_r1 = rr * f_p1r1;

    // Ring is active, sun is follower.
    let p_active = t_r1 * ring.carrier_frame;
    let p_follower = -t_s * sun.carrier_frame;
    let power_loss = p_active - p_follower;
    let power_out = -t_s * sun.absolute;
    let power_in = power_out + power_loss;

    Ok(PowerFlowReport {
        direction: Direction::Backward,
        torques: MemberTorques {
            sun: Some(t_s),
            planet: Some(t_p1),
            ring1: Some(t_r1),
            carrier: -(t_s + t_r1),
            ..Default::default()
        },
        forces: MeshForces::PlanetaryBackward { f_p1r1, f_sp1 },
        speeds,
        active_power_carrier_frame: p_active,
        follower_power_carrier_frame: p_follower,
        power_in,
        power_out,
        power_loss,
        efficiency: power_out / power_in,
        self_locking: false,
    })
}

fn cycloid_forward_case(g: &CycloidStageGeometry, case: &DriveCase) -> Result<PowerFlowReport> {
    let (rp, rr) = (radius(g.z_p2), radius(g.z_r2));
    let eta = case.mesh.eta_r2p2;
    let speeds = khv_speeds(g, case.input_speed)?;
    let disc = speeds.disc.expect("K-H-V disc speed");
    let ring = speeds.ring2.expect("K-H-V ring speed");

    // T_r2 = r_r2 F_p2r2, T_p2 = -eta_r2p2 r_p2 F_p2r2, and the carrier
    // balances -(T_r2 + T_p2) = T_in (the disc torque reacts through V).
    let t_in = case.signed_torque();
    let f_p2r2 = -t_in / (rr - eta * rp);
    let t_r2 = rr * f_p2r2;
    let t_p2 = -eta * rp * f_p2r2;

    // Pin-wheel is active, disc is follower.
    let p_active = t_r2 * ring.carrier_frame;
    let p_follower = -t_p2 * disc.carrier_frame;
    let power_loss = p_active - p_follower;
    let power_out = -t_r2 * ring.absolute;
    let power_in = power_out + power_loss;

    Ok(PowerFlowReport {
        direction: Direction::Forward,
        torques: MemberTorques {
            disc: Some(t_p2),
            ring2: Some(t_r2),
            carrier: -(t_r2 + t_p2),
            ..Default::default()
        },
        forces: MeshForces::CycloidForward { f_p2r2 },
        speeds,
        active_power_carrier_frame: p_active,
        follower_power_carrier_frame: p_follower,
        power_in,
        power_out,
        power_loss,
        efficiency: power_out / power_in,
        self_locking: false,
    })
}

fn cycloid_backward_case(g: &CycloidStageGeometry, case: &DriveCase) -> Result<PowerFlowReport> {
    let (rp, rr) = (radius(g.z_p2), radius(g.z_r2));
    let eta = case.mesh.eta_p2r2;
    // The pin-wheel is driven; the carrier turns z_r2 / (z_r2 - z_p2) times faster.
    let omega_h = case.input_speed * f64::from(g.z_r2) / (f64::from(g.z_r2) - f64::from(g.z_p2));
    let speeds = khv_speeds(g, omega_h)?;
    let disc = speeds.disc.expect("K-H-V disc speed");
    let ring = speeds.ring2.expect("K-H-V ring speed");

    // T_r2 = -eta_p2r2 r_r2 F_r2p2 carries the input, T_p2 = r_p2 F_r2p2.
    let t_r2 = case.signed_torque();
    let f_r2p2 = -t_r2 / (eta * rr);
    let t_p2 = rp * f_r2p2;

    // Disc is active, pin-wheel is follower.
    let p_active = t_p2 * disc.carrier_frame;
    let p_follower = -t_r2 * ring.carrier_frame;
    let power_loss = p_active - p_follower;
    let power_in = t_r2 * ring.absolute;
    let power_out = power_in - power_loss;
    let efficiency = power_out / power_in;

    Ok(PowerFlowReport {
        direction: Direction::Backward,
        torques: MemberTorques {
            disc: Some(t_p2),
            ring2: Some(t_r2),
            carrier: -(t_r2 + t_p2),
            ..Default::default()
        },
        forces: MeshForces::CycloidBackward { f_r2p2 },
        speeds,
        active_power_carrier_frame: p_active,
        follower_power_carrier_frame: p_follower,
        power_in,
        power_out,
        power_loss,
        efficiency,
        self_locking: efficiency <= 0.0,
    })
}

/// Closed-form efficiency against the power-flow efficiency of one case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub closed_form: f64,
    pub power_flow: f64,
    pub relative_difference: f64,
    pub flagged: bool,
}

/// `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Compares [`crate::efficiency`] with [`solve_case`] at unit torque and speed.
pub fn cross_check(
    geom: &StageGeometry,
    mesh: &MeshEfficiencySet,
    direction: Direction,
) -> Result<CrossCheck> {
    let closed_form = stage_efficiency(geom, mesh, direction)?;
    let report = solve_case(geom, &DriveCase::new(direction, 1.0, 1.0, *mesh))?;
    let relative_difference = relative_difference(closed_form, report.efficiency);
    Ok(CrossCheck {
        closed_form,
        power_flow: report.efficiency,
        relative_difference,
        flagged: relative_difference > CROSS_CHECK_TOLERANCE,
    })
}
