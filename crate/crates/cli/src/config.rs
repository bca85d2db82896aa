//! Input files: analysis config, sweep spec and search query.
//!
//! All three are JSON. Field names are listed in `docs/SCHEMA.md`.

use std::path::Path;

use pcd_core::design_search::{DesignQuery, Merit, ToothBounds, DEFAULT_RATIO_TOLERANCE};
use pcd_core::geometry::DEFAULT_PLANETS;
use pcd_core::sweep::{default_ratio_grid, linear_grid, log_grid, SweepSpec, SweepStage};
use pcd_core::{
    CompoundTrainGeometry, CycloidStageGeometry, Direction, MeshEfficiencySet,
    PlanetaryStageGeometry,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Either one scalar applied to all six meshes, or all six named values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeshSpec {
    Scalar(f64),
    Each(MeshEfficiencySet),
}

impl MeshSpec {
    pub fn resolve(&self) -> MeshEfficiencySet {
        match *self {
            MeshSpec::Scalar(eta) => MeshEfficiencySet::uniform(eta),
            MeshSpec::Each(set) => set,
        }
    }
}

fn default_planets() -> u32 {
    DEFAULT_PLANETS
}

/// Tooth counts of a compound train, flat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSpec {
    pub z_s: u32,
    pub z_p1: u32,
    pub z_r1: u32,
    #[serde(default = "default_planets")]
    pub n_planets: u32,
    pub z_p2: u32,
    pub z_r2: u32,
}

impl TrainSpec {
    pub fn geometry(&self) -> CompoundTrainGeometry {
        CompoundTrainGeometry::new(
            PlanetaryStageGeometry::new(self.z_s, self.z_p1, self.z_r1, self.n_planets),
            CycloidStageGeometry::new(self.z_p2, self.z_r2),
        )
    }
}

impl From<CompoundTrainGeometry> for TrainSpec {
    fn from(t: CompoundTrainGeometry) -> Self {
        let (z_s, z_p1, z_r1, z_p2, z_r2) = t.tooth_counts();
        TrainSpec {
            z_s,
            z_p1,
            z_r1,
            n_planets: t.input_stage.n_planets,
            z_p2,
            z_r2,
        }
    }
}

/// Input torque (N·m) and speed (rad/s) at the driving end of the train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatingPoint {
    pub input_torque: f64,
    pub input_speed: f64,
    #[serde(default = "forward")]
    pub direction: Direction,
}

fn forward() -> Direction {
    Direction::Forward
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub train: TrainSpec,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub operating_point: Option<OperatingPoint>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatioRange {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "log_spacing")]
    pub spacing: Spacing,
}

fn log_spacing() -> Spacing {
    Spacing::Log
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageName {
    #[serde(rename = "2k-h")]
    Planetary,
    #[serde(rename = "k-h-v")]
    Cycloid,
    #[serde(rename = "compound")]
    Compound,
}

/// Points in the default ratio grid when a sweep file gives none.
pub const DEFAULT_SWEEP_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub stage: StageName,
    pub direction: Direction,
    #[serde(default)]
    pub split: Option<f64>,
    #[serde(default)]
    pub ratio_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub ratio_range: Option<RatioRange>,
    pub mesh_grid: Vec<f64>,
    #[serde(default)]
    pub format: Option<Format>,
}

impl SweepFile {
    pub fn to_spec(&self) -> Result<SweepSpec, String> {
        let stage = match (self.stage, self.split) {
            (StageName::Planetary, None) => SweepStage::Planetary,
            (StageName::Cycloid, None) => SweepStage::Cycloid,
            (StageName::Compound, Some(split)) => SweepStage::Compound { split },
            (StageName::Compound, None) => return Err("compound sweeps need `split`".into()),
            (_, Some(_)) => return Err("`split` only applies to compound sweeps".into()),
        };
        let ratio_grid = match (&self.ratio_grid, &self.ratio_range) {
            (Some(_), Some(_)) => {
                return Err("give either `ratio_grid` or `ratio_range`, not both".into())
            }
            (Some(grid), None) => grid.clone(),
            (None, Some(r)) => match r.spacing {
                Spacing::Log => log_grid(r.min, r.max, r.points),
                Spacing::Linear => linear_grid(r.min, r.max, r.points),
            },
            (None, None) => default_ratio_grid(DEFAULT_SWEEP_POINTS),
        };
        Ok(SweepSpec {
            stage,
            direction: self.direction,
            ratio_grid,
            mesh_grid: self.mesh_grid.clone(),
        })
    }
}

fn default_tolerance() -> f64 {
    DEFAULT_RATIO_TOLERANCE
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFile {
    pub target_ratio: f64,
    #[serde(default = "default_tolerance")]
    pub ratio_tolerance: f64,
    pub bounds: ToothBounds,
    #[serde(default = "default_planets")]
    pub n_planets: u32,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub direction_of_merit: Merit,
    #[serde(default = "yes")]
    pub forbid_self_locking: bool,
    #[serde(default)]
    pub check_interference: bool,
    /// Emit only the non-dominated candidates.
    #[serde(default)]
    pub pareto_only: bool,
    #[serde(default)]
    pub format: Option<Format>,
}

impl QueryFile {
    pub fn to_query(&self) -> DesignQuery {
        DesignQuery {
            target_ratio: self.target_ratio,
            ratio_tolerance: self.ratio_tolerance,
            bounds: self.bounds,
            n_planets: self.n_planets,
            mesh: self.mesh.resolve(),
            direction_of_merit: self.direction_of_merit,
            forbid_self_locking: self.forbid_self_locking,
            check_interference: self.check_interference,
        }
    }
}

/// Parses JSON text, reporting the failing field path and position.
pub fn parse<T: DeserializeOwned>(text: &str, path: &Path) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let parsed: T = serde_path_to_error::deserialize(&mut de).map_err(|err| {
        let field = err.path().to_string();
        let inner = err.into_inner();
        CliError::Parse {
            path: path.to_path_buf(),
            field,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|inner| CliError::Parse {
        path: path.to_path_buf(),
        field: ".".into(),
        line: inner.line(),
        column: inner.column(),
        message: inner.to_string(),
    })?;
    Ok(parsed)
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE3: &str = r#"{
        "train": { "z_s": 39, "z_p1": 24, "z_r1": 87, "n_planets": 3, "z_p2": 59, "z_r2": 60 },
        "mesh": 0.99
    }"#;

    #[test]
    fn scalar_or_six_mesh() {
        let cfg: AnalysisConfig = parse(TABLE3, Path::new("t.json")).unwrap();
        assert_eq!(cfg.mesh.resolve(), MeshEfficiencySet::uniform(0.99));
        let six = r#"{"eta_sp1":0.99,"eta_p1r1":0.98,"eta_r1p1":0.97,"eta_p1s":0.96,"eta_r2p2":0.95,"eta_p2r2":0.94}"#;
        let m: MeshSpec = parse(six, Path::new("m.json")).unwrap();
        assert_eq!(m.resolve().eta_p2r2, 0.94);
        assert_eq!(m.resolve().eta_p1r1, 0.98);
    }

    #[test]
    fn errors_name_field_and_line() {
        let text = "{\n  \"train\": {\n    \"z_s\": \"many\",\n    \"z_p1\": 24, \"z_r1\": 87, \"z_p2\": 59, \"z_r2\": 60 },\n  \"mesh\": 0.99\n}";
        let err = parse::<AnalysisConfig>(text, Path::new("bad.json")).unwrap_err();
        match err {
            CliError::Parse { field, line, .. } => {
                assert_eq!(field, "train.z_s");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = parse::<AnalysisConfig>(r#"{"train": {"z_s": 1}, "mesh": 1}"#, Path::new("x")).unwrap_err();
        assert!(err.to_string().contains("z_p1"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"train": {"z_s":39,"z_p1":24,"z_r1":87,"z_p2":59,"z_r2":60,"z_q":1}, "mesh": 0.99}"#;
        assert!(parse::<AnalysisConfig>(text, Path::new("x")).is_err());
    }

    #[test]
    fn sweep_file_grids() {
        let text = r#"{"stage":"k-h-v","direction":"forward","ratio_range":{"min":2,"max":100,"points":99,"spacing":"linear"},"mesh_grid":[0.98,0.99,1.0]}"#;
        let f: SweepFile = parse(text, Path::new("s.json")).unwrap();
        let spec = f.to_spec().unwrap();
        assert_eq!(spec.ratio_grid.len(), 99);
        assert_eq!(spec.ratio_grid[58], 60.0);
        assert_eq!(spec.stage, SweepStage::Cycloid);

        let text = r#"{"stage":"compound","direction":"backward","mesh_grid":[0.99]}"#;
        let f: SweepFile = parse(text, Path::new("s.json")).unwrap();
        assert!(f.to_spec().is_err());
        let text = r#"{"stage":"compound","split":0.3,"direction":"backward","mesh_grid":[0.99]}"#;
        let f: SweepFile = parse(text, Path::new("s.json")).unwrap();
        assert_eq!(f.to_spec().unwrap().ratio_grid.len(), DEFAULT_SWEEP_POINTS);
    }

    #[test]
    fn query_defaults() {
        let text = r#"{"target_ratio":193.8,"bounds":{"z_s":{"min":10,"max":60},"z_p1":{"min":10,"max":40},"z_p2":{"min":20,"max":80}},"mesh":0.99}"#;
        let q: QueryFile = parse(text, Path::new("q.json")).unwrap();
        let q = q.to_query();
        assert_eq!(q.ratio_tolerance, 0.01);
        assert_eq!(q.n_planets, 3);
        assert!(q.forbid_self_locking);
        assert_eq!(q.direction_of_merit, Merit::Forward);
    }
}
