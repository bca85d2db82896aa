//! Component speeds and reduction ratios.
//!
//! The operating conditions are fixed: the 2K-H ring R1 is grounded and the
//! sun drives, and in the K-H-V stage the carrier drives while the output
//! mechanism holds the cycloid disc's spin at zero so the pin-wheel R2
//! turns. Speeds are in rad/s; a negative sign means opposite direction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CompoundTrainGeometry, CycloidStageGeometry, PlanetaryStageGeometry};
use crate::ratio::GearRatio;

/// Speed of one member in the stationary frame and in the carrier frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpeed {
    pub absolute: f64,
    pub carrier_frame: f64,
}

impl ComponentSpeed {
    fn new(absolute: f64, carrier_frame: f64) -> Self {
        Self {
            absolute,
            carrier_frame,
        }
    }
}

/// Speeds of every member of the train. Members of a stage that was not
/// solved are `None`; the carrier is shared and always present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedState {
    pub sun: Option<ComponentSpeed>,
    pub planet: Option<ComponentSpeed>,
    pub ring1: Option<ComponentSpeed>,
    pub carrier: ComponentSpeed,
    pub disc: Option<ComponentSpeed>,
    pub ring2: Option<ComponentSpeed>,
}

impl SpeedState {
    /// All filled member speeds, labelled.
    pub fn members(&self) -> Vec<(&'static str, ComponentSpeed)> {
        [
            ("sun", self.sun),
            ("planet", self.planet),
            ("ring1", self.ring1),
            ("carrier", Some(self.carrier)),
            ("disc", self.disc),
            ("ring2", self.ring2),
        ]
        .into_iter()
        .filter_map(|(name, s)| s.map(|s| (name, s)))
        .collect()
    }
}

fn check_speed(omega: f64) -> Result<()> {
    if omega.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInputSpeed(omega))
    }
}

/// 2K-H speeds for a sun speed `omega_s` with the ring grounded.
pub fn planetary_speeds(geom: &PlanetaryStageGeometry, omega_s: f64) -> Result<SpeedState> {
    geom.ensure_valid()?;
    check_speed(omega_s)?;
    let r = geom.radii();
    let rs = r.sun.to_f64_lossy();
    let rp = r.planet.to_f64_lossy();
    let rr = r.ring.to_f64_lossy();

    let carrier = rs / (2.0 * rp + 2.0 * rs) * omega_s;
    // Planet spin: rolling on the fixed ring gives -r_s / (2 r_p1).
    let planet = -rs / (2.0 * rp) * omega_s;

    let sun_h = rr / (rr + rs) * omega_s;
    let planet_h = -rs * (2.0 * rp + rs) / (2.0 * rp * (rp + rs)) * omega_s;
    let ring_h = -rs / (rr + rs) * omega_s;

    Ok(SpeedState {
        sun: Some(ComponentSpeed::new(omega_s, sun_h)),
        planet: Some(ComponentSpeed::new(planet, planet_h)),
        ring1: Some(ComponentSpeed::new(0.0, ring_h)),
        carrier: ComponentSpeed::new(carrier, 0.0),
        disc: None,
        ring2: None,
    })
}

/// K-H-V speeds for a carrier speed `omega_h` with the disc spin held.
pub fn khv_speeds(geom: &CycloidStageGeometry, omega_h: f64) -> Result<SpeedState> {
    geom.ensure_valid()?;
    check_speed(omega_h)?;
    let r = geom.radii();
    let rp = r.disc.to_f64_lossy();
    let rr = r.ring.to_f64_lossy();

    let ring = (rr - rp) / rr * omega_h;
    // In the carrier frame the disc turns at -omega_h (its absolute spin is
    // zero) and the pin-wheel at -(r_p2 / r_r2) omega_h, so the pitch-line
    // speeds of the internal mesh agree.
    let ring_h = -rp / rr * omega_h;
    let disc_h = -omega_h;

    Ok(SpeedState {
        sun: None,
        planet: None,
        ring1: None,
        carrier: ComponentSpeed::new(omega_h, 0.0),
        disc: Some(ComponentSpeed::new(0.0, disc_h)),
        ring2: Some(ComponentSpeed::new(ring, ring_h)),
    })
}

/// Speeds of the whole 3K-H-V train driven at the sun.
pub fn compound_speeds(train: &CompoundTrainGeometry, omega_s: f64) -> Result<SpeedState> {
    train.ensure_valid()?;
    let input = planetary_speeds(&train.input_stage, omega_s)?;
    let output = khv_speeds(&train.output_stage, input.carrier.absolute)?;
    Ok(SpeedState {
        disc: output.disc,
        ring2: output.ring2,
        ..input
    })
}

/// `(z_s + z_r1) / z_s` without validating the rest of the stage.
pub fn planetary_ratio_from_counts(z_s: u32, z_r1: u32) -> GearRatio {
    GearRatio::new(u64::from(z_s) + u64::from(z_r1), u64::from(z_s))
}

/// `z_r2 / (z_r2 - z_p2)` without validating the stage.
///
/// # Panics
///
/// Panics unless `z_r2 > z_p2`.
pub fn khv_ratio_from_counts(z_p2: u32, z_r2: u32) -> GearRatio {
    assert!(z_r2 > z_p2, "pin count must exceed disc tooth count");
    GearRatio::new(u64::from(z_r2), u64::from(z_r2 - z_p2))
}

/// Sun-to-carrier reduction `omega_s / omega_h`.
pub fn planetary_ratio(geom: &PlanetaryStageGeometry) -> Result<GearRatio> {
    geom.ensure_valid()?;
    Ok(planetary_ratio_from_counts(geom.z_s, geom.z_r1))
}

/// Carrier-to-pin-wheel reduction `omega_h / omega_r2`; equals `z_r2`.
pub fn khv_ratio(geom: &CycloidStageGeometry) -> Result<GearRatio> {
    geom.ensure_valid()?;
    Ok(khv_ratio_from_counts(geom.z_p2, geom.z_r2))
}

/// Overall reduction `z_r2 (z_s + z_r1) / z_s`.
pub fn compound_ratio(train: &CompoundTrainGeometry) -> Result<GearRatio> {
    Ok(planetary_ratio(&train.input_stage)? * khv_ratio(&train.output_stage)?)
}

trait RatioF64 {
    fn to_f64_lossy(&self) -> f64;
}

impl RatioF64 for num_rational::Ratio<u64> {
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}
