//! Exhaustive tooth-count search for a target overall reduction.
//!
//! The ring counts follow from the sun, planet and disc counts
//! (`z_r1 = z_s + 2 z_p1`, `z_r2 = z_p2 + 1`), so the search walks three
//! free integers. For each `(z_s, z_p1)` pair only the pin counts whose
//! ratio can land inside the tolerance band are visited; every one of those
//! is checked exactly, so the result is the same set a plain triple loop
//! would produce.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::efficiency::{compound_efficiencies, EfficiencyReport};
use crate::error::{Error, Result};
use crate::geometry::{
    validate_planetary_with, CompoundTrainGeometry, MeshEfficiencySet, ValidationOptions,
    DEFAULT_PLANETS,
};
use crate::kinematics::compound_ratio;
use crate::ratio::GearRatio;

pub const DEFAULT_RATIO_TOLERANCE: f64 = 0.01;

/// Inclusive tooth-count range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToothRange {
    pub min: u32,
    pub max: u32,
}

impl ToothRange {
    pub fn new(min: u32, max: u32) -> Self {
        Self { min, max }
    }

    pub fn is_empty(&self) -> bool {
        self.min > self.max
    }

    pub fn len(&self) -> u64 {
        if self.is_empty() {
            0
        } else {
            u64::from(self.max - self.min) + 1
        }
    }
}

/// Bounds on the free tooth counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToothBounds {
    pub z_s: ToothRange,
    pub z_p1: ToothRange,
    pub z_p2: ToothRange,
}

impl ToothBounds {
    pub fn combinations(&self) -> u64 {
        self.z_s.len() * self.z_p1.len() * self.z_p2.len()
    }
}

/// Which efficiency ranks the candidates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Merit {
    #[default]
    Forward,
    Backward,
    /// The worse of the two directions.
    Both,
}

impl Merit {
    pub fn score(&self, report: &EfficiencyReport) -> f64 {
        match self {
            Merit::Forward => report.eta_sr2,
            Merit::Backward => report.eta_r2s,
            Merit::Both => report.eta_sr2.min(report.eta_r2s),
        }
    }
}

fn default_tolerance() -> f64 {
    DEFAULT_RATIO_TOLERANCE
}

fn default_planets() -> u32 {
    DEFAULT_PLANETS
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignQuery {
    pub target_ratio: f64,
    /// Relative: `|achieved / target - 1| <= ratio_tolerance`.
    #[serde(default = "default_tolerance")]
    pub ratio_tolerance: f64,
    pub bounds: ToothBounds,
    #[serde(default = "default_planets")]
    pub n_planets: u32,
    pub mesh: MeshEfficiencySet,
    #[serde(default)]
    pub direction_of_merit: Merit,
    #[serde(default = "yes")]
    pub forbid_self_locking: bool,
    #[serde(default)]
    pub check_interference: bool,
}

impl DesignQuery {
    pub fn new(target_ratio: f64, bounds: ToothBounds, mesh: MeshEfficiencySet) -> Self {
        Self {
            target_ratio,
            ratio_tolerance: DEFAULT_RATIO_TOLERANCE,
            bounds,
            n_planets: DEFAULT_PLANETS,
            mesh,
            direction_of_merit: Merit::Forward,
            forbid_self_locking: true,
            check_interference: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidQuery(msg));
        if !(self.target_ratio.is_finite() && self.target_ratio > 1.0) {
            return bad(format!("target_ratio must exceed 1, got {}", self.target_ratio));
        }
        // Zero tolerance is allowed: it asks for an exact ratio.
        if !(self.ratio_tolerance >= 0.0 && self.ratio_tolerance < 0.5) {
            return bad(format!(
                "ratio_tolerance must be in [0, 0.5), got {}",
                self.ratio_tolerance
            ));
        }
        for (name, range) in [
            ("z_s", self.bounds.z_s),
            ("z_p1", self.bounds.z_p1),
            ("z_p2", self.bounds.z_p2),
        ] {
            if range.is_empty() {
                return bad(format!("bounds.{name} is empty ({}..={})", range.min, range.max));
            }
            if range.min == 0 {
                return bad(format!("bounds.{name} must start at 1 or more"));
            }
        }
        if self.n_planets == 0 {
            return bad("n_planets must be at least 1".into());
        }
        self.mesh.validate()
    }

    /// Relative ratio error, or `None` if outside the tolerance band.
    fn ratio_error(&self, ratio: &GearRatio) -> Option<f64> {
        let err = (ratio.to_f64() / self.target_ratio - 1.0).abs();
        (err <= self.ratio_tolerance).then_some(err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignCandidate {
    pub train: CompoundTrainGeometry,
    pub achieved_ratio: GearRatio,
    pub ratio_error: f64,
    pub report: EfficiencyReport,
    /// Efficiency used for ranking, per the query's merit.
    pub merit: f64,
}

/// Ranking order: higher merit, then lower ratio error, then fewer pins,
/// then smaller sun, then smaller planet.
pub fn rank_order(a: &DesignCandidate, b: &DesignCandidate) -> Ordering {
    let (sa, pa, _, _, ra) = a.train.tooth_counts();
    let (sb, pb, _, _, rb) = b.train.tooth_counts();
    b.merit
        .total_cmp(&a.merit)
        .then(a.ratio_error.total_cmp(&b.ratio_error))
        .then(ra.cmp(&rb))
        .then(sa.cmp(&sb))
        .then(pa.cmp(&pb))
}

/// Evaluates one combination of free counts against the query.
pub fn evaluate(query: &DesignQuery, z_s: u32, z_p1: u32, z_p2: u32) -> Option<DesignCandidate> {
    let train = CompoundTrainGeometry::from_free_counts(z_s, z_p1, z_p2, query.n_planets);
    let opts = ValidationOptions {
        check_interference: query.check_interference,
    };
    if !validate_planetary_with(&train.input_stage, opts).is_ok()
        || !train.output_stage.validate().is_ok()
    {
        return None;
    }
    let achieved_ratio = compound_ratio(&train).ok()?;
    let ratio_error = query.ratio_error(&achieved_ratio)?;
    let report = compound_efficiencies(&train, &query.mesh).ok()?;
    if query.forbid_self_locking && report.eta_r2s <= 0.0 {
        return None;
    }
    Some(DesignCandidate {
        train,
        achieved_ratio,
        ratio_error,
        report,
        merit: query.direction_of_merit.score(&report),
    })
}

/// Range of disc counts whose ratio can fall inside the tolerance band for
/// the given 2K-H stage, clipped to the bounds. Padded by one on each side;
/// [`evaluate`] makes the exact decision.
fn disc_window(query: &DesignQuery, z_s: u32, z_p1: u32) -> Option<(u32, u32)> {
    let i_2kh = (2.0 * f64::from(z_s) + 2.0 * f64::from(z_p1)) / f64::from(z_s);
    let lo_pins = query.target_ratio * (1.0 - query.ratio_tolerance) / i_2kh;
    let hi_pins = query.target_ratio * (1.0 + query.ratio_tolerance) / i_2kh;
    let lo = (lo_pins.floor() - 2.0).max(f64::from(query.bounds.z_p2.min));
    let hi = (hi_pins.ceil()).min(f64::from(query.bounds.z_p2.max));
    (lo <= hi).then_some((lo as u32, hi as u32))
}

/// Every valid train within bounds whose ratio is within tolerance, ranked
/// by [`rank_order`]. An infeasible query gives an empty list.
pub fn enumerate(query: &DesignQuery) -> Result<Vec<DesignCandidate>> {
    query.validate()?;
    let b = query.bounds;
    let mut found: Vec<DesignCandidate> = (b.z_s.min..=b.z_s.max)
        .into_par_iter()
        .flat_map_iter(|z_s| {
            (b.z_p1.min..=b.z_p1.max).flat_map(move |z_p1| {
                let window = disc_window(query, z_s, z_p1);
                window
                    .into_iter()
                    .flat_map(|(lo, hi)| lo..=hi)
                    .filter_map(move |z_p2| evaluate(query, z_s, z_p1, z_p2))
            })
        })
        .collect();
    found.sort_by(rank_order);
    Ok(found)
}

/// Candidates not dominated in (lower ratio error, higher merit). Keeps the
/// input order.
pub fn pareto_front(candidates: &[DesignCandidate]) -> Vec<DesignCandidate> {
    let mut by_error: Vec<usize> = (0..candidates.len()).collect();
    by_error.sort_by(|&a, &b| {
        let (ca, cb) = (&candidates[a], &candidates[b]);
        ca.ratio_error
            .total_cmp(&cb.ratio_error)
            .then(cb.merit.total_cmp(&ca.merit))
    });

    // Sweep in order of increasing error; a candidate survives if no
    // earlier one has strictly higher merit, or equal merit with strictly
    // lower error.
    let mut keep = vec![false; candidates.len()];
    let mut best_merit = f64::NEG_INFINITY;
    let mut best_error = f64::NEG_INFINITY;
    for &idx in &by_error {
        let c = &candidates[idx];
        let dominated = c.merit < best_merit || (c.merit == best_merit && c.ratio_error > best_error);
        if !dominated {
            keep[idx] = true;
            if c.merit > best_merit {
                best_merit = c.merit;
                best_error = c.ratio_error;
            }
        }
    }
    candidates
        .iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(*c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(s: (u32, u32), p1: (u32, u32), p2: (u32, u32)) -> ToothBounds {
        ToothBounds {
            z_s: ToothRange::new(s.0, s.1),
            z_p1: ToothRange::new(p1.0, p1.1),
            z_p2: ToothRange::new(p2.0, p2.1),
        }
    }

    fn candidate(error: f64, merit: f64) -> DesignCandidate {
        let train = CompoundTrainGeometry::from_free_counts(39, 24, 59, 3);
        let report = compound_efficiencies(&train, &MeshEfficiencySet::lossless()).unwrap();
        DesignCandidate {
            train,
            achieved_ratio: compound_ratio(&train).unwrap(),
            ratio_error: error,
            report,
            merit,
        }
    }

    #[test]
    fn finds_table3_train() {
        let q = DesignQuery::new(193.8, bounds((10, 60), (10, 40), (20, 80)), MeshEfficiencySet::uniform(0.99));
        let found = enumerate(&q).unwrap();
        assert!(found
            .iter()
            .any(|c| c.train.tooth_counts() == (39, 24, 87, 59, 60)));
        for c in &found {
            assert!(c.ratio_error <= 0.01);
            assert!(c.report.eta_r2s > 0.0);
            assert!(c.train.ensure_valid().is_ok());
        }
    }

    #[test]
    fn exact_minimal_train() {
        let mut q = DesignQuery::new(8.0, bounds((1, 3), (1, 3), (1, 3)), MeshEfficiencySet::uniform(0.99));
        q.ratio_tolerance = 0.0;
        q.n_planets = 1;
        let found = enumerate(&q).unwrap();
        let minimal = found
            .iter()
            .find(|c| c.train.tooth_counts() == (1, 1, 3, 1, 2))
            .expect("minimal train");
        assert_eq!(minimal.achieved_ratio, GearRatio::integer(8));
        assert_eq!(minimal.ratio_error, 0.0);
    }

    #[test]
    fn infeasible_is_empty() {
        let mut q = DesignQuery::new(1000.0, bounds((10, 11), (10, 11), (10, 11)), MeshEfficiencySet::uniform(0.99));
        q.ratio_tolerance = 0.0;
        assert!(enumerate(&q).unwrap().is_empty());
    }

    #[test]
    fn invalid_queries() {
        let mesh = MeshEfficiencySet::uniform(0.99);
        let q = DesignQuery::new(100.0, bounds((10, 5), (10, 20), (10, 20)), mesh);
        assert!(matches!(enumerate(&q), Err(Error::InvalidQuery(_))));
        let q = DesignQuery::new(0.5, bounds((10, 20), (10, 20), (10, 20)), mesh);
        assert!(enumerate(&q).is_err());
        let mut q = DesignQuery::new(100.0, bounds((10, 20), (10, 20), (10, 20)), mesh);
        q.ratio_tolerance = 0.5;
        assert!(enumerate(&q).is_err());
        let q = DesignQuery::new(100.0, bounds((0, 20), (10, 20), (10, 20)), mesh);
        assert!(enumerate(&q).is_err());
    }

    #[test]
    fn self_locking_filter() {
        // eta_p2r2 = 0.98 locks every pin count above 50.
        let mut mesh = MeshEfficiencySet::uniform(0.99);
        mesh.eta_p2r2 = 0.98;
        let mut q = DesignQuery::new(193.8, bounds((10, 60), (10, 40), (20, 80)), mesh);
        let unlocked = enumerate(&q).unwrap();
        assert!(unlocked.iter().all(|c| c.train.output_stage.z_r2 < 50));
        q.forbid_self_locking = false;
        let all = enumerate(&q).unwrap();
        assert!(all.len() > unlocked.len());
        assert!(all.iter().any(|c| c.report.self_locking));
    }

    #[test]
    fn ranking_is_sorted_and_deterministic() {
        let q = DesignQuery::new(150.0, bounds((10, 40), (10, 30), (10, 60)), MeshEfficiencySet::uniform(0.99));
        let a = enumerate(&q).unwrap();
        let b = enumerate(&q).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| rank_order(&w[0], &w[1]) != Ordering::Greater));
    }

    #[test]
    fn pareto_basics() {
        let one = candidate(0.001, 0.6);
        assert_eq!(pareto_front(&[one]), vec![one]);
        let better = candidate(0.001, 0.7);
        let worse = candidate(0.002, 0.6);
        assert_eq!(pareto_front(&[worse, better]), vec![better]);
        let tradeoff = candidate(0.0, 0.5);
        assert_eq!(pareto_front(&[better, tradeoff]), vec![better, tradeoff]);
        let twin = better;
        assert_eq!(pareto_front(&[better, twin]).len(), 2);
    }
}
