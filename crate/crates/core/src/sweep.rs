//! Efficiency curve families over a continuous reduction ratio.
//!
//! Each cell is a stage efficiency evaluated with the ratio-parametrized
//! closed forms, so no tooth-count realization is needed. For the 2K-H
//! stage the mesh value stands for the product of its two meshes in the
//! chosen direction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::efficiency::{ratio_forms, Direction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "stage")]
pub enum SweepStage {
    #[serde(rename = "2k-h")]
    Planetary,
    #[serde(rename = "k-h-v")]
    Cycloid,
    /// Both stages with `i_2kh = i^split` and `i_khv = i^(1 - split)`.
    Compound { split: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    #[serde(flatten)]
    pub stage: SweepStage,
    pub direction: Direction,
    pub ratio_grid: Vec<f64>,
    pub mesh_grid: Vec<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        if self.ratio_grid.is_empty() {
            return bad("ratio_grid is empty".into());
        }
        if self.mesh_grid.is_empty() {
            return bad("mesh_grid is empty".into());
        }
        for &i in &self.ratio_grid {
            if !(i.is_finite() && i > 1.0) {
                return bad(format!("ratio {i} must be finite and greater than 1"));
            }
        }
        if let Some(w) = self.ratio_grid.windows(2).find(|w| w[1] <= w[0]) {
            return bad(format!("ratio_grid must be strictly increasing ({} then {})", w[0], w[1]));
        }
        for &eta in &self.mesh_grid {
            if !(eta > 0.0 && eta <= 1.0) {
                return bad(format!("mesh efficiency {eta} is outside (0, 1]"));
            }
        }
        if let SweepStage::Compound { split } = self.stage {
            if !(split > 0.0 && split < 1.0) {
                return bad(format!("split must be in (0, 1), got {split}"));
            }
        }
        Ok(())
    }
}

/// Efficiencies indexed `[mesh][ratio]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub ratios: Vec<f64>,
    pub mesh: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn row(&self, mesh_index: usize) -> &[f64] {
        &self.values[mesh_index]
    }

    pub fn get(&self, mesh_index: usize, ratio_index: usize) -> f64 {
        self.values[mesh_index][ratio_index]
    }
}

/// Efficiency of one stage family at ratio `i` and mesh efficiency `eta`.
pub fn efficiency_at(stage: SweepStage, direction: Direction, i: f64, eta: f64) -> f64 {
    match (stage, direction) {
        (SweepStage::Planetary, Direction::Forward) => ratio_forms::planetary_forward(i, eta),
        (SweepStage::Planetary, Direction::Backward) => ratio_forms::planetary_backward(i, eta),
        (SweepStage::Cycloid, Direction::Forward) => ratio_forms::khv_forward(i, eta),
        (SweepStage::Cycloid, Direction::Backward) => ratio_forms::khv_backward(i, eta),
        (SweepStage::Compound { split }, direction) => {
            let i_2kh = i.powf(split);
            let i_khv = i.powf(1.0 - split);
            efficiency_at(SweepStage::Planetary, direction, i_2kh, eta)
                * efficiency_at(SweepStage::Cycloid, direction, i_khv, eta)
        }
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let values = spec
        .mesh_grid
        .par_iter()
        .map(|&eta| {
            spec.ratio_grid
                .iter()
                .map(|&i| efficiency_at(spec.stage, spec.direction, i, eta))
                .collect()
        })
        .collect();
    Ok(SweepTable {
        ratios: spec.ratio_grid.clone(),
        mesh: spec.mesh_grid.clone(),
        values,
    })
}

/// `points` log-spaced values from `min` to `max`, both included.
pub fn log_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let (lo, hi) = (min.ln(), max.ln());
            let step = (hi - lo) / (points - 1) as f64;
            let mut grid: Vec<f64> = (0..points).map(|k| (lo + step * k as f64).exp()).collect();
            grid[points - 1] = max;
            grid
        }
    }
}

/// `points` linearly spaced values from `min` to `max`, both included.
pub fn linear_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let step = (max - min) / (points - 1) as f64;
            let mut grid: Vec<f64> = (0..points).map(|k| min + step * k as f64).collect();
            grid[points - 1] = max;
            grid
        }
    }
}

/// Log-spaced grid over (1, 1000]: `1000^(k / points)` for `k = 1..=points`.
/// A ratio of exactly 1 is not a reduction and is left out.
pub fn default_ratio_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|k| 1000f64.powf(k as f64 / points as f64))
        .collect()
}

/// Overall efficiency of a fixed total ratio as the share of `ln(i_total)`
/// given to the 2K-H stage varies.
pub fn allocation_curve(
    i_total: f64,
    eta: f64,
    direction: Direction,
    splits: &[f64],
) -> Result<Vec<(f64, f64)>> {
    splits
        .iter()
        .map(|&split| {
            let spec = SweepSpec {
                stage: SweepStage::Compound { split },
                direction,
                ratio_grid: vec![i_total],
                mesh_grid: vec![eta],
            };
            spec.validate()?;
            Ok((split, efficiency_at(spec.stage, direction, i_total, eta)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(stage: SweepStage, direction: Direction, ratios: Vec<f64>, mesh: Vec<f64>) -> SweepSpec {
        SweepSpec {
            stage,
            direction,
            ratio_grid: ratios,
            mesh_grid: mesh,
        }
    }

    #[test]
    fn khv_forward_at_sixty() {
        let t = run_sweep(&spec(SweepStage::Cycloid, Direction::Forward, vec![60.0], vec![0.99])).unwrap();
        assert!((t.get(0, 0) - 0.6289308176100629).abs() < 1e-12);
    }

    #[test]
    fn lossless_row_is_one() {
        for stage in [SweepStage::Planetary, SweepStage::Cycloid, SweepStage::Compound { split: 0.3 }] {
            for direction in Direction::BOTH {
                let t = run_sweep(&spec(stage, direction, default_ratio_grid(50), vec![1.0])).unwrap();
                assert!(t.row(0).iter().all(|&v| (v - 1.0).abs() < 1e-12), "{stage:?} {direction:?}");
            }
        }
    }

    #[test]
    fn khv_backward_changes_sign_at_hundred() {
        let t = run_sweep(&spec(
            SweepStage::Cycloid,
            Direction::Backward,
            vec![50.0, 99.0, 101.0, 200.0],
            vec![0.99],
        ))
        .unwrap();
        assert!(t.get(0, 1) > 0.0);
        assert!(t.get(0, 2) < 0.0);
    }

    #[test]
    fn rejects_bad_specs() {
        let bad = [
            spec(SweepStage::Cycloid, Direction::Forward, vec![], vec![0.9]),
            spec(SweepStage::Cycloid, Direction::Forward, vec![2.0], vec![]),
            spec(SweepStage::Cycloid, Direction::Forward, vec![1.0, 2.0], vec![0.9]),
            spec(SweepStage::Cycloid, Direction::Forward, vec![3.0, 2.0], vec![0.9]),
            spec(SweepStage::Cycloid, Direction::Forward, vec![2.0], vec![1.1]),
            spec(SweepStage::Compound { split: 1.0 }, Direction::Forward, vec![2.0], vec![0.9]),
        ];
        for s in bad {
            assert!(matches!(run_sweep(&s), Err(Error::InvalidSweep(_))), "{s:?}");
        }
    }

    #[test]
    fn grids() {
        let g = log_grid(1.0, 1000.0, 4);
        assert_eq!(g.len(), 4);
        assert!((g[1] - 10.0).abs() < 1e-9);
        assert_eq!(g[3], 1000.0);
        assert_eq!(linear_grid(2.0, 100.0, 99), (2..=100).map(f64::from).collect::<Vec<_>>());
        let d = default_ratio_grid(300);
        assert!(d[0] > 1.0);
        assert!((d[299] - 1000.0).abs() < 1e-9);
        assert!(d.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn allocation_favours_planetary_share() {
        let curve = allocation_curve(193.8, 0.99, Direction::Forward, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(curve.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(allocation_curve(100.0, 0.99, Direction::Forward, &[0.0]).is_err());
    }
}
