//! Machine-readable output documents.
//!
//! Every float is rounded to nine significant digits before it is stored
//! in a report, so JSON and CSV print the same digits and a parsed report
//! equals the one that was written.

use pcd_core::design_search::DesignCandidate;
use pcd_core::efficiency::self_lock_threshold;
use pcd_core::kinematics::{khv_ratio, planetary_ratio};
use pcd_core::quasistatic::{MeshForces, PowerFlowReport};
use pcd_core::sweep::{SweepSpec, SweepStage, SweepTable};
use pcd_core::{compound_ratio, Direction, EfficiencyReport, GearRatio, MeshEfficiencySet};
use serde::{Deserialize, Serialize};

use crate::config::TrainSpec;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest text that reads back as `sig(x)`; always uses `.` as the
/// decimal separator.
pub fn fmt_num(x: f64) -> String {
    format!("{:?}", sig(x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Units {
    pub speed: String,
    pub torque: String,
    pub power: String,
    pub ratio: String,
    pub efficiency: String,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            speed: "rad/s".into(),
            torque: "N*m".into(),
            power: "W".into(),
            ratio: "dimensionless".into(),
            efficiency: "dimensionless".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    /// Unreduced rational, e.g. `7560/39`.
    pub exact: GearRatio,
    pub decimal: f64,
    /// `7560/39 (≈193.85)`
    pub display: String,
}

impl From<GearRatio> for RatioEntry {
    fn from(r: GearRatio) -> Self {
        RatioEntry {
            exact: r,
            decimal: sig(r.to_f64()),
            display: r.display_approx(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub i_2kh: RatioEntry,
    pub i_khv: RatioEntry,
    pub i_3khv: RatioEntry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Efficiencies {
    pub eta_sh: f64,
    pub eta_hs: f64,
    pub eta_hr2: f64,
    pub eta_r2h: f64,
    pub eta_sr2: f64,
    pub eta_r2s: f64,
}

impl From<&EfficiencyReport> for Efficiencies {
    fn from(r: &EfficiencyReport) -> Self {
        Efficiencies {
            eta_sh: sig(r.eta_sh),
            eta_hs: sig(r.eta_hs),
            eta_hr2: sig(r.eta_hr2),
            eta_r2h: sig(r.eta_r2h),
            eta_sr2: sig(r.eta_sr2),
            eta_r2s: sig(r.eta_r2s),
        }
    }
}

impl Efficiencies {
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("eta_sh", self.eta_sh),
            ("eta_hs", self.eta_hs),
            ("eta_hr2", self.eta_hr2),
            ("eta_r2h", self.eta_r2h),
            ("eta_sr2", self.eta_sr2),
            ("eta_r2s", self.eta_r2s),
        ]
    }
}

fn rounded_mesh(m: &MeshEfficiencySet) -> MeshEfficiencySet {
    MeshEfficiencySet {
        eta_sp1: sig(m.eta_sp1),
        eta_p1r1: sig(m.eta_p1r1),
        eta_r1p1: sig(m.eta_r1p1),
        eta_p1s: sig(m.eta_p1s),
        eta_r2p2: sig(m.eta_r2p2),
        eta_p2r2: sig(m.eta_p2r2),
    }
}

/// Named scalar for the flat parts of a stage power-flow result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

fn q(name: &str, value: f64, unit: &str) -> Quantity {
    Quantity {
        name: name.into(),
        value: sig(value),
        unit: unit.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagePowerFlow {
    /// `2K-H` or `K-H-V`.
    pub stage: String,
    pub direction: Direction,
    pub torques: Vec<Quantity>,
    pub forces: Vec<Quantity>,
    pub speeds: Vec<Quantity>,
    pub power_in: f64,
    pub power_out: f64,
    pub power_loss: f64,
    pub efficiency: f64,
    pub self_locking: bool,
}

impl StagePowerFlow {
    pub fn new(stage: &str, r: &PowerFlowReport) -> Self {
        let t = &r.torques;
        let torques = [
            ("T_s", t.sun),
            ("T_p1", t.planet),
            ("T_r1", t.ring1),
            ("T_p2", t.disc),
            ("T_r2", t.ring2),
            ("T_h", Some(t.carrier)),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.map(|v| q(n, v, "N*m")))
        .collect();
        let forces = match r.forces {
            MeshForces::PlanetaryForward { f_r1p1, f_p1s } => {
                vec![q("F_r1p1", f_r1p1, "N*m/module"), q("F_p1s", f_p1s, "N*m/module")]
            }
            MeshForces::PlanetaryBackward { f_p1r1, f_sp1 } => {
                vec![q("F_p1r1", f_p1r1, "N*m/module"), q("F_sp1", f_sp1, "N*m/module")]
            }
            MeshForces::CycloidForward { f_p2r2 } => vec![q("F_p2r2", f_p2r2, "N*m/module")],
            MeshForces::CycloidBackward { f_r2p2 } => vec![q("F_r2p2", f_r2p2, "N*m/module")],
        };
        let speeds = r
            .speeds
            .members()
            .into_iter()
            .flat_map(|(name, s)| {
                [
                    q(&format!("omega_{name}"), s.absolute, "rad/s"),
                    q(&format!("omega_{name}^H"), s.carrier_frame, "rad/s"),
                ]
            })
            .collect();
        StagePowerFlow {
            stage: stage.into(),
            direction: r.direction,
            torques,
            forces,
            speeds,
            power_in: sig(r.power_in),
            power_out: sig(r.power_out),
            power_loss: sig(r.power_loss),
            efficiency: sig(r.efficiency),
            self_locking: r.self_locking,
        }
    }
}

/// Power flow through both stages at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainPowerFlow {
    pub direction: Direction,
    pub input_torque: f64,
    pub input_speed: f64,
    /// In the order power passes through them. The second stage is absent
    /// when the first one self-locks.
    pub stages: Vec<StagePowerFlow>,
    pub power_in: f64,
    pub power_out: f64,
    pub efficiency: f64,
    pub self_locking: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub units: Units,
    pub train: TrainSpec,
    pub mesh: MeshEfficiencySet,
    pub ratios: Ratios,
    pub efficiencies: Efficiencies,
    pub self_locking: bool,
    /// `eta_p2r2` at or below which the output stage self-locks.
    pub self_lock_threshold: String,
    pub power_flow: Option<TrainPowerFlow>,
}

impl AnalysisReport {
    pub fn new(
        train: &TrainSpec,
        mesh: &MeshEfficiencySet,
        eff: &EfficiencyReport,
        power_flow: Option<TrainPowerFlow>,
    ) -> pcd_core::Result<Self> {
        let geom = train.geometry();
        let threshold = self_lock_threshold(&geom.output_stage)?;
        Ok(AnalysisReport {
            units: Units::default(),
            train: *train,
            mesh: rounded_mesh(mesh),
            ratios: Ratios {
                i_2kh: planetary_ratio(&geom.input_stage)?.into(),
                i_khv: khv_ratio(&geom.output_stage)?.into(),
                i_3khv: compound_ratio(&geom)?.into(),
            },
            efficiencies: eff.into(),
            self_locking: eff.self_locking,
            self_lock_threshold: format!("{}/{}", threshold.numer(), threshold.denom()),
            power_flow,
        })
    }

    /// `quantity,value,unit` rows.
    pub fn csv_rows(&self) -> Vec<[String; 3]> {
        let mut rows = Vec::new();
        let mut push = |a: &str, b: String, c: &str| rows.push([a.to_owned(), b, c.to_owned()]);
        let t = &self.train;
        for (name, v) in [
            ("z_s", t.z_s),
            ("z_p1", t.z_p1),
            ("z_r1", t.z_r1),
            ("n_planets", t.n_planets),
            ("z_p2", t.z_p2),
            ("z_r2", t.z_r2),
        ] {
            push(name, v.to_string(), "count");
        }
        for (name, v) in self.mesh.named_values() {
            push(name, fmt_num(v), "dimensionless");
        }
        for (name, r) in [
            ("i_2kh", &self.ratios.i_2kh),
            ("i_khv", &self.ratios.i_khv),
            ("i_3khv", &self.ratios.i_3khv),
        ] {
            push(&format!("{name}_exact"), r.exact.to_string(), "dimensionless");
            push(name, fmt_num(r.decimal), "dimensionless");
        }
        for (name, v) in self.efficiencies.named() {
            push(name, fmt_num(v), "dimensionless");
        }
        push("self_locking", self.self_locking.to_string(), "bool");
        push("self_lock_threshold", self.self_lock_threshold.clone(), "dimensionless");
        if let Some(pf) = &self.power_flow {
            push("input_torque", fmt_num(pf.input_torque), "N*m");
            push("input_speed", fmt_num(pf.input_speed), "rad/s");
            for stage in &pf.stages {
                let prefix = format!("{}.{}", stage.stage, stage.direction.as_str());
                for item in stage.torques.iter().chain(&stage.forces).chain(&stage.speeds) {
                    push(&format!("{prefix}.{}", item.name), fmt_num(item.value), &item.unit);
                }
                push(&format!("{prefix}.power_in"), fmt_num(stage.power_in), "W");
                push(&format!("{prefix}.power_out"), fmt_num(stage.power_out), "W");
                push(&format!("{prefix}.power_loss"), fmt_num(stage.power_loss), "W");
                push(&format!("{prefix}.efficiency"), fmt_num(stage.efficiency), "dimensionless");
            }
            push("train.power_in", fmt_num(pf.power_in), "W");
            push("train.power_out", fmt_num(pf.power_out), "W");
            push("train.efficiency", fmt_num(pf.efficiency), "dimensionless");
            push("train.self_locking", pf.self_locking.to_string(), "bool");
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepColumn {
    pub mesh: f64,
    pub efficiency: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub stage: String,
    pub direction: Direction,
    pub split: Option<f64>,
    pub ratios: Vec<f64>,
    pub columns: Vec<SweepColumn>,
}

impl SweepReport {
    pub fn new(spec: &SweepSpec, table: &SweepTable) -> Self {
        let (stage, split) = match spec.stage {
            SweepStage::Planetary => ("2k-h", None),
            SweepStage::Cycloid => ("k-h-v", None),
            SweepStage::Compound { split } => ("compound", Some(sig(split))),
        };
        SweepReport {
            stage: stage.into(),
            direction: spec.direction,
            split,
            ratios: table.ratios.iter().copied().map(sig).collect(),
            columns: table
                .mesh
                .iter()
                .zip(&table.values)
                .map(|(&mesh, row)| SweepColumn {
                    mesh: sig(mesh),
                    efficiency: row.iter().copied().map(sig).collect(),
                })
                .collect(),
        }
    }

    pub fn csv_header(&self) -> Vec<String> {
        std::iter::once("ratio".to_owned())
            .chain(self.columns.iter().map(|c| format!("eta_mesh={}", fmt_num(c.mesh))))
            .collect()
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        self.ratios
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                std::iter::once(fmt_num(i))
                    .chain(self.columns.iter().map(|c| fmt_num(c.efficiency[k])))
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub rank: usize,
    pub z_s: u32,
    pub z_p1: u32,
    pub z_r1: u32,
    pub z_p2: u32,
    pub z_r2: u32,
    pub n_planets: u32,
    pub ratio_exact: GearRatio,
    pub ratio: f64,
    pub ratio_error: f64,
    pub eta_sh: f64,
    pub eta_hs: f64,
    pub eta_hr2: f64,
    pub eta_r2h: f64,
    pub eta_sr2: f64,
    pub eta_r2s: f64,
    pub self_locking: bool,
    pub merit: f64,
}

pub const CANDIDATE_HEADER: [&str; 18] = [
    "rank",
    "z_s",
    "z_p1",
    "z_r1",
    "z_p2",
    "z_r2",
    "n_planets",
    "ratio_exact",
    "ratio",
    "ratio_error",
    "eta_sh",
    "eta_hs",
    "eta_hr2",
    "eta_r2h",
    "eta_sr2",
    "eta_r2s",
    "self_locking",
    "merit",
];

impl CandidateRow {
    pub fn new(rank: usize, c: &DesignCandidate) -> Self {
        let (z_s, z_p1, z_r1, z_p2, z_r2) = c.train.tooth_counts();
        let e = &c.report;
        CandidateRow {
            rank,
            z_s,
            z_p1,
            z_r1,
            z_p2,
            z_r2,
            n_planets: c.train.input_stage.n_planets,
            ratio_exact: c.achieved_ratio,
            ratio: sig(c.achieved_ratio.to_f64()),
            ratio_error: sig(c.ratio_error),
            eta_sh: sig(e.eta_sh),
            eta_hs: sig(e.eta_hs),
            eta_hr2: sig(e.eta_hr2),
            eta_r2h: sig(e.eta_r2h),
            eta_sr2: sig(e.eta_sr2),
            eta_r2s: sig(e.eta_r2s),
            self_locking: e.self_locking,
            merit: sig(c.merit),
        }
    }

    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.rank.to_string(),
            self.z_s.to_string(),
            self.z_p1.to_string(),
            self.z_r1.to_string(),
            self.z_p2.to_string(),
            self.z_r2.to_string(),
            self.n_planets.to_string(),
            self.ratio_exact.to_string(),
            fmt_num(self.ratio),
            fmt_num(self.ratio_error),
            fmt_num(self.eta_sh),
            fmt_num(self.eta_hs),
            fmt_num(self.eta_hr2),
            fmt_num(self.eta_r2h),
            fmt_num(self.eta_sr2),
            fmt_num(self.eta_r2s),
            self.self_locking.to_string(),
            fmt_num(self.merit),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub target_ratio: f64,
    pub ratio_tolerance: f64,
    pub direction_of_merit: pcd_core::design_search::Merit,
    pub pareto_only: bool,
    pub count: usize,
    pub candidates: Vec<CandidateRow>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_num(1.0 / 1.59), "0.628930818");
        assert_eq!(fmt_num(7560.0 / 39.0), "193.846154");
        assert_eq!(fmt_num(1.0), "1.0");
        assert_eq!(fmt_num(0.0), "0.0");
        assert_eq!(fmt_num(-0.2040816326530612), "-0.204081633");
        assert_eq!(fmt_num(1234567890123.0), "1234567890000.0");
        assert_eq!(sig(sig(0.123456789123)), sig(0.123456789123));
    }

    #[test]
    fn ratio_entry_display() {
        let e = RatioEntry::from(GearRatio::new(7560, 39));
        assert_eq!(e.display, "7560/39 (≈193.85)");
        assert_eq!(e.exact.to_string(), "7560/39");
        assert_eq!(e.decimal, 193.846154);
    }
}
