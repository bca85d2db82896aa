use std::collections::BTreeSet;

use pcd_core::design_search::{
    enumerate, pareto_front, DesignCandidate, DesignQuery, Merit, ToothBounds, ToothRange,
};
use pcd_core::MeshEfficiencySet;

fn bounds(s: (u32, u32), p1: (u32, u32), p2: (u32, u32)) -> ToothBounds {
    ToothBounds {
        z_s: ToothRange::new(s.0, s.1),
        z_p1: ToothRange::new(p1.0, p1.1),
        z_p2: ToothRange::new(p2.0, p2.1),
    }
}

/// Plain triple loop with every formula written out inline.
fn naive(query: &DesignQuery) -> BTreeSet<(u32, u32, u32)> {
    let b = query.bounds;
    let m = query.mesh;
    let mut out = BTreeSet::new();
    for z_s in b.z_s.min..=b.z_s.max {
        for z_p1 in b.z_p1.min..=b.z_p1.max {
            for z_p2 in b.z_p2.min..=b.z_p2.max {
                let z_r1 = z_s + 2 * z_p1;
                let z_r2 = z_p2 + 1;
                if (z_s + z_r1) % query.n_planets != 0 {
                    continue;
                }
                let ratio = f64::from(z_r2) * f64::from(z_s + z_r1) / f64::from(z_s);
                if (ratio / query.target_ratio - 1.0).abs() > query.ratio_tolerance {
                    continue;
                }
                if query.forbid_self_locking {
                    let e2 = m.eta_r1p1 * m.eta_p1s;
                    let hs = e2 * f64::from(z_r1 + z_s) / (f64::from(z_r1) + e2 * f64::from(z_s));
                    let r2h = (m.eta_p2r2 * f64::from(z_r2) - f64::from(z_p2))
                        / (m.eta_p2r2 * f64::from(z_r2 - z_p2));
                    if r2h * hs <= 0.0 {
                        continue;
                    }
                }
                out.insert((z_s, z_p1, z_p2));
            }
        }
    }
    out
}

fn keys(found: &[DesignCandidate]) -> BTreeSet<(u32, u32, u32)> {
    found
        .iter()
        .map(|c| {
            let (s, p1, _, p2, _) = c.train.tooth_counts();
            (s, p1, p2)
        })
        .collect()
}

/// O(n^2) dominance check.
fn pareto_oracle(cands: &[DesignCandidate]) -> Vec<DesignCandidate> {
    cands
        .iter()
        .filter(|c| {
            !cands.iter().any(|d| {
                d.ratio_error <= c.ratio_error
                    && d.merit >= c.merit
                    && (d.ratio_error < c.ratio_error || d.merit > c.merit)
            })
        })
        .copied()
        .collect()
}

#[test]
fn matches_naive_oracle_across_queries() {
    let mut locking = MeshEfficiencySet::uniform(0.99);
    locking.eta_p2r2 = 0.975;
    let cases = [
        (193.8, 0.01, 3, MeshEfficiencySet::uniform(0.99), true),
        (193.8, 0.02, 4, MeshEfficiencySet::uniform(0.97), true),
        (80.0, 0.005, 2, locking, true),
        (80.0, 0.005, 2, locking, false),
        (300.0, 0.03, 5, MeshEfficiencySet::uniform(0.995), true),
        (45.0, 0.0, 1, MeshEfficiencySet::uniform(0.99), true),
    ];
    for (target, tol, n, mesh, forbid) in cases {
        let mut q = DesignQuery::new(target, bounds((10, 60), (10, 40), (10, 90)), mesh);
        q.ratio_tolerance = tol;
        q.n_planets = n;
        q.forbid_self_locking = forbid;
        let found = enumerate(&q).unwrap();
        assert_eq!(found.len(), keys(&found).len(), "duplicates for {target}");
        assert_eq!(keys(&found), naive(&q), "target {target} tol {tol} n {n}");
    }
}

#[test]
fn pareto_front_matches_dominance_oracle() {
    for merit in [Merit::Forward, Merit::Backward, Merit::Both] {
        let mut q = DesignQuery::new(193.8, bounds((10, 60), (10, 40), (20, 80)), MeshEfficiencySet::uniform(0.99));
        q.direction_of_merit = merit;
        let found = enumerate(&q).unwrap();
        assert!(!found.is_empty());
        let front = pareto_front(&found);
        assert_eq!(front, pareto_oracle(&found), "{merit:?}");
        // The best-ranked candidate always survives.
        assert_eq!(front[0], found[0]);
    }
}

#[test]
fn larger_planetary_share_wins_at_equal_ratio() {
    // Trains with the same overall ratio but different stage splits.
    let mesh = MeshEfficiencySet::uniform(0.99);
    let mut q = DesignQuery::new(120.0, bounds((4, 60), (4, 60), (4, 100)), mesh);
    q.ratio_tolerance = 0.0;
    q.n_planets = 1;
    let found = enumerate(&q).unwrap();
    assert!(found.len() > 2);
    let share = |c: &DesignCandidate| {
        let (s, _, r1, _, _) = c.train.tooth_counts();
        f64::from(s + r1) / f64::from(s)
    };
    let best_share = found.iter().map(share).fold(f64::MIN, f64::max);
    assert_eq!(share(&found[0]), best_share);
    // Forward efficiency rises with the planetary share.
    let mut by_share = found.clone();
    by_share.sort_by(|a, b| share(a).total_cmp(&share(b)));
    for w in by_share.windows(2) {
        if share(&w[1]) > share(&w[0]) {
            assert!(w[1].report.eta_sr2 > w[0].report.eta_sr2);
        }
    }
}
