//! Tooth-count geometry of the two stages and the compound train.
//!
//! Tooth counts are the canonical representation. Pitch radii are derived
//! as exact rationals with a unit module (`r = z / 2`), which is enough for
//! every ratio and efficiency computed in this crate.

use std::f64::consts::PI;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PLANETS: u32 = 3;

fn default_planets() -> u32 {
    DEFAULT_PLANETS
}

/// Involute 2K-H input stage: sun S, planets P1, fixed ring R1, carrier H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanetaryStageGeometry {
    pub z_s: u32,
    pub z_p1: u32,
    pub z_r1: u32,
    #[serde(default = "default_planets")]
    pub n_planets: u32,
}

/// Cycloid disc P2 meshing with a pin-wheel ring R2 of `z_r2` pins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CycloidStageGeometry {
    pub z_p2: u32,
    pub z_r2: u32,
}

/// 2K-H input stage and K-H-V output stage sharing one carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CompoundTrainGeometry {
    pub input_stage: PlanetaryStageGeometry,
    pub output_stage: CycloidStageGeometry,
}

/// Pitch radii of the 2K-H stage, unit module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanetaryRadii {
    pub sun: Ratio<u64>,
    pub planet: Ratio<u64>,
    pub ring: Ratio<u64>,
    /// Carrier arm, sun axis to planet axis.
    pub carrier: Ratio<u64>,
}

/// Pitch radii of the K-H-V stage, unit module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycloidRadii {
    pub disc: Ratio<u64>,
    pub ring: Ratio<u64>,
    /// Carrier eccentricity `r_r2 - r_p2`.
    pub carrier: Ratio<u64>,
}

fn half(z: u32) -> Ratio<u64> {
    Ratio::new(u64::from(z), 2)
}

impl PlanetaryStageGeometry {
    pub fn new(z_s: u32, z_p1: u32, z_r1: u32, n_planets: u32) -> Self {
        Self {
            z_s,
            z_p1,
            z_r1,
            n_planets,
        }
    }

    /// Builds the stage with the coaxial ring count `z_s + 2 z_p1`.
    pub fn from_sun_planet(z_s: u32, z_p1: u32, n_planets: u32) -> Self {
        Self::new(z_s, z_p1, z_s + 2 * z_p1, n_planets)
    }

    pub fn radii(&self) -> PlanetaryRadii {
        let sun = half(self.z_s);
        let planet = half(self.z_p1);
        PlanetaryRadii {
            sun,
            planet,
            ring: half(self.z_r1),
            carrier: sun + planet,
        }
    }

    pub fn validate(&self) -> Violations {
        validate_planetary(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }
}

impl CycloidStageGeometry {
    pub fn new(z_p2: u32, z_r2: u32) -> Self {
        Self { z_p2, z_r2 }
    }

    /// Disc with one tooth fewer than the pin count.
    pub fn from_disc(z_p2: u32) -> Self {
        Self::new(z_p2, z_p2 + 1)
    }

    pub fn radii(&self) -> CycloidRadii {
        let disc = half(self.z_p2);
        let ring = half(self.z_r2);
        CycloidRadii {
            disc,
            ring,
            carrier: if ring >= disc { ring - disc } else { Ratio::from_integer(0) },
        }
    }

    pub fn validate(&self) -> Violations {
        validate_cycloid(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }
}

impl CompoundTrainGeometry {
    pub fn new(input_stage: PlanetaryStageGeometry, output_stage: CycloidStageGeometry) -> Self {
        Self {
            input_stage,
            output_stage,
        }
    }

    /// Train from the three free tooth counts; ring counts follow from the
    /// coaxiality and one-tooth-difference constraints.
    pub fn from_free_counts(z_s: u32, z_p1: u32, z_p2: u32, n_planets: u32) -> Self {
        Self::new(
            PlanetaryStageGeometry::from_sun_planet(z_s, z_p1, n_planets),
            CycloidStageGeometry::from_disc(z_p2),
        )
    }

    /// Tooth counts as `(z_s, z_p1, z_r1, z_p2, z_r2)`.
    pub fn tooth_counts(&self) -> (u32, u32, u32, u32, u32) {
        let p = &self.input_stage;
        let c = &self.output_stage;
        (p.z_s, p.z_p1, p.z_r1, c.z_p2, c.z_r2)
    }

    pub fn validate(&self) -> Violations {
        let mut v = self.input_stage.validate();
        v.0.extend(self.output_stage.validate().0);
        v
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }
}

impl fmt::Display for CompoundTrainGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, p1, r1, p2, r2) = self.tooth_counts();
        write!(f, "({s}, {p1}, {r1}, {p2}, {r2})")
    }
}

/// Either stage of the train, for operations that handle both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum StageGeometry {
    Planetary(PlanetaryStageGeometry),
    Cycloid(CycloidStageGeometry),
}

impl StageGeometry {
    pub fn ensure_valid(&self) -> Result<()> {
        match self {
            StageGeometry::Planetary(g) => g.ensure_valid(),
            StageGeometry::Cycloid(g) => g.ensure_valid(),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            StageGeometry::Planetary(_) => "2K-H",
            StageGeometry::Cycloid(_) => "K-H-V",
        }
    }
}

impl From<PlanetaryStageGeometry> for StageGeometry {
    fn from(g: PlanetaryStageGeometry) -> Self {
        StageGeometry::Planetary(g)
    }
}

impl From<CycloidStageGeometry> for StageGeometry {
    fn from(g: CycloidStageGeometry) -> Self {
        StageGeometry::Cycloid(g)
    }
}

/// Directional per-mesh efficiencies. Each value must lie in (0, 1].
///
/// The 2K-H stage uses `eta_sp1`, `eta_p1r1` when driven from the sun and
/// `eta_r1p1`, `eta_p1s` when back-driven; the K-H-V stage uses `eta_r2p2`
/// forward and `eta_p2r2` backward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshEfficiencySet {
    pub eta_sp1: f64,
    pub eta_p1r1: f64,
    pub eta_r1p1: f64,
    pub eta_p1s: f64,
    pub eta_r2p2: f64,
    pub eta_p2r2: f64,
}

impl MeshEfficiencySet {
    pub fn uniform(eta: f64) -> Self {
        Self {
            eta_sp1: eta,
            eta_p1r1: eta,
            eta_r1p1: eta,
            eta_p1s: eta,
            eta_r2p2: eta,
            eta_p2r2: eta,
        }
    }

    pub fn lossless() -> Self {
        Self::uniform(1.0)
    }

    pub fn named_values(&self) -> [(&'static str, f64); 6] {
        [
            ("eta_sp1", self.eta_sp1),
            ("eta_p1r1", self.eta_p1r1),
            ("eta_r1p1", self.eta_r1p1),
            ("eta_p1s", self.eta_p1s),
            ("eta_r2p2", self.eta_r2p2),
            ("eta_p2r2", self.eta_p2r2),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.named_values() {
            // NaN fails both comparisons
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::MeshOutOfRange { name, value });
            }
        }
        Ok(())
    }

    /// Product of the two sun-driven 2K-H meshes.
    pub fn planetary_forward(&self) -> f64 {
        self.eta_sp1 * self.eta_p1r1
    }

    /// Product of the two carrier-driven 2K-H meshes.
    pub fn planetary_backward(&self) -> f64 {
        self.eta_r1p1 * self.eta_p1s
    }
}

impl Default for MeshEfficiencySet {
    fn default() -> Self {
        Self::lossless()
    }
}

/// One failed geometric constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A tooth or planet count is zero.
    NonPositive { field: &'static str },
    /// `z_r1 != z_s + 2 z_p1`.
    Coaxiality { z_r1: u32, expected: u32 },
    /// `(z_s + z_r1) mod n_planets != 0`.
    Assembly { sum: u32, n_planets: u32 },
    /// `z_r2 - z_p2 != 1`.
    OneToothDifference { difference: i64 },
    /// Adjacent planets overlap (only reported by the opt-in check).
    PlanetInterference { n_planets: u32 },
}

impl Violation {
    /// Short constraint name used in reports and error messages.
    pub fn constraint(&self) -> &'static str {
        match self {
            Violation::NonPositive { .. } => "positive counts",
            Violation::Coaxiality { .. } => "coaxiality",
            Violation::Assembly { .. } => "assembly",
            Violation::OneToothDifference { .. } => "one-tooth difference",
            Violation::PlanetInterference { .. } => "planet interference",
        }
    }

    /// The relation that failed, written out.
    pub fn relation(&self) -> &'static str {
        match self {
            Violation::NonPositive { .. } => "all tooth counts >= 1",
            Violation::Coaxiality { .. } => "z_r1 = z_s + 2*z_p1",
            Violation::Assembly { .. } => "(z_s + z_r1) mod n_planets = 0",
            Violation::OneToothDifference { .. } => "z_r2 - z_p2 = 1",
            Violation::PlanetInterference { .. } => {
                "z_p1 + 2 < (z_s + z_p1)*sin(pi/n_planets)"
            }
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): ", self.constraint(), self.relation())?;
        match self {
            Violation::NonPositive { field } => write!(f, "{field} is zero"),
            Violation::Coaxiality { z_r1, expected } => {
                write!(f, "z_r1 = {z_r1}, expected {expected}")
            }
            Violation::Assembly { sum, n_planets } => {
                write!(f, "z_s + z_r1 = {sum} is not divisible by {n_planets} planets")
            }
            Violation::OneToothDifference { difference } => {
                write!(f, "z_r2 - z_p2 = {difference}")
            }
            Violation::PlanetInterference { n_planets } => {
                write!(f, "{n_planets} planets do not fit around the sun")
            }
        }
    }
}

/// Outcome of a validation: empty means the geometry is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn is_ok(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.0.iter()
    }

    pub fn contains_constraint(&self, name: &str) -> bool {
        self.0.iter().any(|v| v.constraint() == name)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidGeometry(self))
        }
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Options for [`validate_planetary_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationOptions {
    pub check_interference: bool,
}

pub fn validate_planetary(geom: &PlanetaryStageGeometry) -> Violations {
    validate_planetary_with(geom, ValidationOptions::default())
}

pub fn validate_planetary_with(
    geom: &PlanetaryStageGeometry,
    opts: ValidationOptions,
) -> Violations {
    let mut out = Vec::new();
    for (field, value) in [
        ("z_s", geom.z_s),
        ("z_p1", geom.z_p1),
        ("z_r1", geom.z_r1),
        ("n_planets", geom.n_planets),
    ] {
        if value == 0 {
            out.push(Violation::NonPositive { field });
        }
    }

    let expected = u64::from(geom.z_s) + 2 * u64::from(geom.z_p1);
    if u64::from(geom.z_r1) != expected {
        out.push(Violation::Coaxiality {
            z_r1: geom.z_r1,
            expected: expected.min(u64::from(u32::MAX)) as u32,
        });
    }

    let sum = geom.z_s.saturating_add(geom.z_r1);
    if geom.n_planets > 0 && !sum.is_multiple_of(geom.n_planets) {
        out.push(Violation::Assembly {
            sum,
            n_planets: geom.n_planets,
        });
    }

    if opts.check_interference && geom.n_planets >= 2 {
        let span = f64::from(geom.z_s) + f64::from(geom.z_p1);
        let clearance = span * (PI / f64::from(geom.n_planets)).sin();
        if f64::from(geom.z_p1) + 2.0 >= clearance {
            out.push(Violation::PlanetInterference {
                n_planets: geom.n_planets,
            });
        }
    }

    Violations(out)
}

pub fn validate_cycloid(geom: &CycloidStageGeometry) -> Violations {
    let mut out = Vec::new();
    if geom.z_p2 == 0 {
        out.push(Violation::NonPositive { field: "z_p2" });
    }
    if geom.z_r2 == 0 {
        out.push(Violation::NonPositive { field: "z_r2" });
    }
    let difference = i64::from(geom.z_r2) - i64::from(geom.z_p2);
    if difference != 1 {
        out.push(Violation::OneToothDifference { difference });
    }
    Violations(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table3_planetary_is_valid() {
        let g = PlanetaryStageGeometry::new(39, 24, 87, 3);
        assert!(validate_planetary(&g).is_ok());
    }

    #[test]
    fn minimal_planetary_is_valid() {
        let g = PlanetaryStageGeometry::new(1, 1, 3, 1);
        assert!(validate_planetary(&g).is_ok());
    }

    #[test]
    fn coaxiality_violation_is_named() {
        let g = PlanetaryStageGeometry::new(39, 24, 88, 3);
        let v = validate_planetary(&g);
        assert!(v.contains_constraint("coaxiality"));
        assert!(v.to_string().contains("expected 87"));
    }

    #[test]
    fn assembly_condition() {
        // 20 + 60 = 80 is not divisible by 3
        let g = PlanetaryStageGeometry::from_sun_planet(20, 20, 3);
        let v = validate_planetary(&g);
        assert_eq!(v.0, vec![Violation::Assembly { sum: 80, n_planets: 3 }]);
        let g = PlanetaryStageGeometry::from_sun_planet(20, 20, 4);
        assert!(validate_planetary(&g).is_ok());
    }

    #[test]
    fn zero_counts_are_reported() {
        let g = PlanetaryStageGeometry::new(0, 1, 2, 0);
        let v = validate_planetary(&g);
        assert!(v.0.contains(&Violation::NonPositive { field: "z_s" }));
        assert!(v.0.contains(&Violation::NonPositive { field: "n_planets" }));
    }

    #[test]
    fn interference_is_opt_in() {
        // Small sun with big planets: four planets cannot fit.
        let g = PlanetaryStageGeometry::from_sun_planet(12, 30, 4);
        assert!(validate_planetary(&g).is_ok());
        let opts = ValidationOptions {
            check_interference: true,
        };
        let v = validate_planetary_with(&g, opts);
        assert!(v.contains_constraint("planet interference"));

        let table3 = PlanetaryStageGeometry::new(39, 24, 87, 3);
        assert!(validate_planetary_with(&table3, opts).is_ok());
    }

    #[test]
    fn cycloid_cases() {
        assert!(validate_cycloid(&CycloidStageGeometry::new(59, 60)).is_ok());
        assert!(validate_cycloid(&CycloidStageGeometry::new(1, 2)).is_ok());
        let v = validate_cycloid(&CycloidStageGeometry::new(58, 60));
        assert_eq!(v.0, vec![Violation::OneToothDifference { difference: 2 }]);
        assert!(v.contains_constraint("one-tooth difference"));
        let v = validate_cycloid(&CycloidStageGeometry::new(0, 1));
        assert!(v.contains_constraint("positive counts"));
    }

    #[test]
    fn radii_follow_tooth_counts() {
        let r = PlanetaryStageGeometry::new(39, 24, 87, 3).radii();
        assert_eq!(r.ring, r.sun + r.planet * 2);
        assert_eq!(r.carrier, Ratio::new(63, 2));
        let c = CycloidStageGeometry::new(59, 60).radii();
        assert_eq!(c.carrier, Ratio::new(1, 2));
    }

    #[test]
    fn mesh_set_bounds() {
        assert!(MeshEfficiencySet::uniform(0.99).validate().is_ok());
        assert!(MeshEfficiencySet::lossless().validate().is_ok());
        let mut m = MeshEfficiencySet::uniform(0.99);
        m.eta_p1s = 0.0;
        assert_eq!(
            m.validate(),
            Err(Error::MeshOutOfRange {
                name: "eta_p1s",
                value: 0.0
            })
        );
        m.eta_p1s = 1.01;
        assert!(m.validate().is_err());
        m.eta_p1s = f64::NAN;
        assert!(m.validate().is_err());
    }

    #[test]
    fn compound_collects_both_stages() {
        let t = CompoundTrainGeometry::new(
            PlanetaryStageGeometry::new(39, 24, 88, 3),
            CycloidStageGeometry::new(58, 60),
        );
        let v = t.validate();
        assert!(v.contains_constraint("coaxiality"));
        assert!(v.contains_constraint("one-tooth difference"));
        assert!(matches!(t.ensure_valid(), Err(Error::InvalidGeometry(_))));
        let ok = CompoundTrainGeometry::from_free_counts(39, 24, 59, 3);
        assert_eq!(ok.tooth_counts(), (39, 24, 87, 59, 60));
        assert_eq!(ok.to_string(), "(39, 24, 87, 59, 60)");
    }
}
