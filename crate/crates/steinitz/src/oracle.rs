//! Instance generation and independent certification: seeded random
//! clouds, the sharp (2d+1)-point configuration, and exhaustive
//! best-subset search used to cross-check the pipeline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Tolerance, Vector};
use crate::polarity::{inscribed_radius_at_origin, PointCloud};
use crate::rng::Rng;

/// Default cap on the number of subsets the exhaustive search may visit.
pub const EXHAUSTIVE_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    RandomSeeded { seed: u64 },
    Grundbacher,
    File,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Instance {
    pub cloud: PointCloud,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveReport {
    pub best_subset: Vec<usize>,
    pub best_radius: f64,
    pub subsets_examined: u64,
}

/// The sharp (2d+1)-point configuration: signed scaled basis vectors in the
/// first d-1 axes, the positive last axis, and the two skew points
/// `-sqrt(d) (e_d ± (e_1 + ... + e_{d-1}))`.
pub fn generate_grundbacher(d: usize) -> Result<Instance> {
    if d < 2 {
        return Err(Error::InvalidInput(
            "the sharp configuration needs dimension at least 2".into(),
        ));
    }
    let s = (d as f64).sqrt();
    let mut points: Vec<Vector> = Vec::with_capacity(2 * d + 1);
    for i in 0..d - 1 {
        for sign in [1.0, -1.0] {
            let mut p = vec![0.0; d];
            p[i] = sign * s;
            points.push(p);
        }
    }
    let mut top = vec![0.0; d];
    top[d - 1] = s;
    points.push(top);
    let mut p_minus = vec![-s; d];
    p_minus[d - 1] = -s;
    let mut p_plus = vec![s; d];
    p_plus[d - 1] = -s;
    points.push(p_minus);
    points.push(p_plus);
    Ok(Instance {
        cloud: PointCloud::new(d, points)?,
        provenance: Provenance::Grundbacher,
    })
}

fn binomial(m: usize, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    let k = k.min(m - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (m - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Best k-subset by certified inscribed radius, over every k-subset.
/// Deterministic regardless of thread count: the reduction is a max with a
/// lexicographic tie-break on the subset.
pub fn exhaustive_best_subset(
    q: &PointCloud,
    k: usize,
    tol: &Tolerance,
) -> Result<ExhaustiveReport> {
    let m = q.len();
    if k == 0 || k > m {
        return Err(Error::InvalidInput(format!(
            "subset size {k} out of range for {m} points"
        )));
    }
    let subsets = binomial(m, k);
    if subsets > EXHAUSTIVE_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            subsets,
            budget: EXHAUSTIVE_BUDGET,
        });
    }

    struct Branch {
        best_radius: f64,
        best_subset: Vec<usize>,
        examined: u64,
        error: Option<Error>,
    }

    // Partition by the smallest element of the subset.
    let branches: Vec<Branch> = (0..=m - k)
        .into_par_iter()
        .map(|first| {
            let mut branch = Branch {
                best_radius: f64::NEG_INFINITY,
                best_subset: Vec::new(),
                examined: 0,
                error: None,
            };
            let mut idx: Vec<usize> = (0..k).collect();
            idx[0] = first;
            for (j, slot) in idx.iter_mut().enumerate().skip(1) {
                *slot = first + j;
            }
            if idx[k - 1] >= m {
                return branch;
            }
            loop {
                let pts: Vec<Vector> = idx.iter().map(|&i| q.points[i].clone()).collect();
                let cloud = PointCloud {
                    dim: q.dim,
                    points: pts,
                };
                match inscribed_radius_at_origin(&cloud, tol) {
                    Ok(r) => {
                        branch.examined += 1;
                        if r > branch.best_radius
                            || (r == branch.best_radius && idx < branch.best_subset)
                        {
                            branch.best_radius = r;
                            branch.best_subset = idx.clone();
                        }
                    }
                    Err(e) => {
                        branch.error = Some(e);
                        return branch;
                    }
                }
                // Advance within this branch: positions 1..k vary.
                let mut i = k;
                let mut advanced = false;
                while i > 1 {
                    i -= 1;
                    if idx[i] != i + m - k {
                        idx[i] += 1;
                        for j in i + 1..k {
                            idx[j] = idx[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    return branch;
                }
            }
        })
        .collect();

    let mut best_radius = f64::NEG_INFINITY;
    let mut best_subset: Vec<usize> = Vec::new();
    let mut examined = 0u64;
    for b in branches {
        if let Some(e) = b.error {
            return Err(e);
        }
        examined += b.examined;
        if b.examined > 0
            && (b.best_radius > best_radius
                || (b.best_radius == best_radius
                    && (best_subset.is_empty() || b.best_subset < best_subset)))
        {
            best_radius = b.best_radius;
            best_subset = b.best_subset;
        }
    }
    Ok(ExhaustiveReport {
        best_subset,
        best_radius,
        subsets_examined: examined,
    })
}

/// Seeded random cloud rescaled so its certified inscribed radius is 1
/// plus a feasibility margin. Deterministic per (d, m, seed).
pub fn generate_random_ball_instance(d: usize, m: usize, seed: u64) -> Result<Instance> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    if m < d + 1 {
        return Err(Error::InvalidInput(format!(
            "need at least d + 1 = {} points, got {m}",
            d + 1
        )));
    }
    let tol = Tolerance::default();
    let mut rng = Rng::new(seed);
    const ATTEMPTS: u32 = 100;
    // Clouds with a tiny raw inradius would be rescaled by a huge factor,
    // producing badly conditioned instances. Near-minimal point counts in
    // high dimension cannot do better, so the bar scales with the headroom.
    let min_raw_inradius = (0.02 * (m - d) as f64).min(0.1);
    for _ in 0..ATTEMPTS {
        let points: Vec<Vector> = (0..m)
            .map(|_| {
                let u = rng.unit_vector(d);
                let r = rng.range_f64(1.0, 2.0);
                u.iter().map(|x| x * r).collect()
            })
            .collect();
        let cloud = PointCloud::new(d, points)?;
        let r0 = inscribed_radius_at_origin(&cloud, &tol)?;
        if r0 >= min_raw_inradius {
            let scale = (1.0 + tol.feas_eps) / r0;
            return Ok(Instance {
                cloud: cloud.scaled(scale),
                provenance: Provenance::RandomSeeded { seed },
            });
        }
    }
    Err(Error::RetryExhausted { attempts: ATTEMPTS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarity::certify_ball_in_hull;
    use crate::selection;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn sharp_bound(d: usize) -> f64 {
        let d = d as f64;
        (d / (d * d + d - 1.0)).sqrt()
    }

    #[test]
    fn grundbacher_counts_and_ball() {
        for d in 2..=5 {
            let g = generate_grundbacher(d).unwrap();
            assert_eq!(g.cloud.len(), 2 * d + 1);
        }
        for d in 2..=4 {
            let g = generate_grundbacher(d).unwrap();
            assert!(certify_ball_in_hull(&g.cloud, 1.0, &tol()).unwrap().contained);
        }
    }

    #[test]
    fn grundbacher_plane_matches_hand_coordinates() {
        let g = generate_grundbacher(2).unwrap();
        let s = 2.0_f64.sqrt();
        let expect = [
            vec![s, 0.0],
            vec![-s, 0.0],
            vec![0.0, s],
            vec![-s, -s],
            vec![s, -s],
        ];
        for (p, e) in g.cloud.points.iter().zip(&expect) {
            assert!(crate::geom::dist(p, e) <= 1e-12);
        }
    }

    #[test]
    fn exhaustive_on_grundbacher_plane_hits_sharp_bound() {
        let g = generate_grundbacher(2).unwrap();
        let rep = exhaustive_best_subset(&g.cloud, 4, &tol()).unwrap();
        assert_eq!(rep.subsets_examined, 5);
        assert!(
            (rep.best_radius - sharp_bound(2)).abs() <= 1e-9,
            "best {} vs sharp {}",
            rep.best_radius,
            sharp_bound(2)
        );
    }

    #[test]
    fn exhaustive_must_keep_whole_cross_polytope() {
        let d = 3;
        let mut pts = Vec::new();
        for i in 0..d {
            for sign in [1.0_f64, -1.0] {
                let mut p = vec![0.0; d];
                p[i] = sign * (d as f64).sqrt();
                pts.push(p);
            }
        }
        let q = PointCloud::new(d, pts).unwrap();
        let rep = exhaustive_best_subset(&q, 2 * d, &tol()).unwrap();
        assert!((rep.best_radius - 1.0).abs() <= 1e-9);
        assert_eq!(rep.best_subset, (0..2 * d).collect::<Vec<_>>());
    }

    #[test]
    fn random_instance_is_deterministic_and_certified() {
        let a = generate_random_ball_instance(3, 12, 7).unwrap();
        let b = generate_random_ball_instance(3, 12, 7).unwrap();
        assert_eq!(a.cloud.points, b.cloud.points);
        assert!(certify_ball_in_hull(&a.cloud, 1.0, &tol()).unwrap().contained);

        let cert = selection::select_steinitz(&a.cloud, &tol(), 7).unwrap();
        assert!(cert.certified_radius >= 1.0 / 31.0 - 1e-8);
    }

    #[test]
    fn pipeline_never_beats_exhaustive() {
        let t = tol();
        for seed in 0..5u64 {
            let inst = generate_random_ball_instance(2, 9, 40 + seed).unwrap();
            let cert = selection::select_steinitz(&inst.cloud, &t, seed).unwrap();
            let rep = exhaustive_best_subset(&inst.cloud, 4, &t).unwrap();
            assert!(cert.certified_radius <= rep.best_radius + 1e-9);
        }
    }

    #[test]
    fn exhaustive_search_is_deterministic_across_thread_counts() {
        let inst = generate_random_ball_instance(3, 11, 13).unwrap();
        let t = tol();
        let reports: Vec<ExhaustiveReport> = [1usize, 4]
            .iter()
            .map(|&threads| {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .unwrap();
                pool.install(|| exhaustive_best_subset(&inst.cloud, 6, &t).unwrap())
            })
            .collect();
        assert_eq!(reports[0].best_subset, reports[1].best_subset);
        assert_eq!(
            reports[0].best_radius.to_bits(),
            reports[1].best_radius.to_bits()
        );
        assert_eq!(reports[0].subsets_examined, reports[1].subsets_examined);
    }

    #[test]
    fn budget_is_enforced() {
        let inst = generate_random_ball_instance(2, 40, 1).unwrap();
        // C(40, 20) is astronomically past the budget.
        assert!(matches!(
            exhaustive_best_subset(&inst.cloud, 20, &tol()),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
