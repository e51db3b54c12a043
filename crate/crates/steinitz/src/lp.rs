//! Phase-1 simplex for small dense feasibility systems `A y = b, y >= 0`,
//! with a Farkas certificate on infeasibility.
//!
//! Bland's rule throughout: entering column is the lowest eligible index,
//! leaving row breaks ratio ties by lowest basic variable index. That makes
//! every solve deterministic and cycle-free, which matters more here than
//! pivot counts; the systems are tiny (a convexity row plus d coordinates).

use crate::error::Result;
use crate::geom::{Tolerance, Vector};

/// Outcome of a convex-combination feasibility solve.
#[derive(Clone, Debug)]
pub enum Combination {
    Feasible { weights: Vec<f64> },
    /// `witness` satisfies `<witness, target> > max_i <witness, point_i>`.
    Infeasible { witness: Vector },
}

enum Phase1 {
    Feasible(Vec<f64>),
    /// `farkas` satisfies `farkas^T A <= 0` (within tolerance) and
    /// `farkas^T b > 0` for the original, unflipped system.
    Infeasible(Vec<f64>),
}

/// Solve `sum_j y_j * cols_j = b, y >= 0` where each column has `rows` entries.
fn phase1(cols: &[Vec<f64>], b: &[f64], tol: &Tolerance) -> Phase1 {
    let rows = b.len();
    let n = cols.len();
    debug_assert!(cols.iter().all(|c| c.len() == rows));

    let mut scale: f64 = 1.0;
    for c in cols {
        for &x in c {
            scale = scale.max(x.abs());
        }
    }
    let tol_piv = 1e-11 * scale;
    let tol_red = 1e-11 * scale;
    let feas_thr = tol.feas_eps * (1.0 + b.iter().map(|x| x.abs()).sum::<f64>());

    // Row flips make the artificial basis start at nonnegative values.
    let flip: Vec<f64> = b.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect();

    let width = n + rows;
    // tab[i] holds the structural and artificial columns; rhs separately.
    let mut tab: Vec<Vec<f64>> = (0..rows)
        .map(|i| {
            let mut row = vec![0.0; width];
            for (j, c) in cols.iter().enumerate() {
                row[j] = flip[i] * c[i];
            }
            row[n + i] = 1.0;
            row
        })
        .collect();
    let mut rhs: Vec<f64> = b.iter().zip(&flip).map(|(&x, &f)| x * f).collect();
    let mut basis: Vec<usize> = (n..n + rows).collect();

    // Phase-1 reduced costs after eliminating the artificial basis.
    let mut red = vec![0.0; width];
    for (j, r) in red.iter_mut().enumerate().take(n) {
        *r = -(0..rows).map(|i| tab[i][j]).sum::<f64>();
    }
    let mut obj: f64 = rhs.iter().sum();

    let max_iters = 200 * (width + 10);
    for _ in 0..max_iters {
        // Entering: lowest structural index with negative reduced cost.
        // Artificials never re-enter.
        let mut pivoted = false;
        for e in 0..n {
            if red[e] >= -tol_red {
                continue;
            }
            // Leaving: min ratio, ties by lowest basic variable index.
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for i in 0..rows {
                if tab[i][e] > tol_piv {
                    let ratio = rhs[i] / tab[i][e];
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best_ratio - 1e-15 * (1.0 + best_ratio.abs())
                                || ((ratio - best_ratio).abs()
                                    <= 1e-15 * (1.0 + best_ratio.abs())
                                    && basis[i] < basis[l])
                        }
                    };
                    if better {
                        leave = Some(i);
                        best_ratio = ratio;
                    }
                }
            }
            let Some(r) = leave else { continue };
            // Pivot on (r, e).
            let p = tab[r][e];
            for x in tab[r].iter_mut() {
                *x /= p;
            }
            rhs[r] /= p;
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = tab[i][e];
                if f == 0.0 {
                    continue;
                }
                for j in 0..width {
                    tab[i][j] -= f * tab[r][j];
                }
                tab[i][e] = 0.0;
                rhs[i] -= f * rhs[r];
                if rhs[i] < 0.0 {
                    rhs[i] = 0.0; // rounding guard; ratio test keeps rhs >= 0
                }
            }
            let f = red[e];
            for j in 0..width {
                red[j] -= f * tab[r][j];
            }
            red[e] = 0.0;
            obj += f * rhs[r];
            basis[r] = e;
            pivoted = true;
            break;
        }
        if !pivoted {
            break;
        }
    }

    if obj.abs() <= feas_thr {
        let mut y = vec![0.0; n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                y[bv] = rhs[i].max(0.0);
            }
        }
        Phase1::Feasible(y)
    } else {
        // Simplex multipliers: red over an artificial column j is 1 - pi_j.
        let mut u = vec![0.0; rows];
        for i in 0..rows {
            u[i] = flip[i] * (1.0 - red[n + i]);
        }
        Phase1::Infeasible(u)
    }
}

/// Weights `w >= 0, sum w = 1` with `sum_i w_i * points_i = target`, or a
/// separating witness direction.
pub fn convex_combination(points: &[Vector], target: &[f64], tol: &Tolerance) -> Combination {
    let d = target.len();
    let cols: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            debug_assert_eq!(p.len(), d);
            let mut c = p.clone();
            c.push(1.0);
            c
        })
        .collect();
    let mut b = target.to_vec();
    b.push(1.0);
    match phase1(&cols, &b, tol) {
        Phase1::Feasible(w) => Combination::Feasible { weights: w },
        Phase1::Infeasible(farkas) => Combination::Infeasible {
            witness: farkas[..d].to_vec(),
        },
    }
}

pub fn in_convex_hull(points: &[Vector], target: &[f64], tol: &Tolerance) -> bool {
    matches!(
        convex_combination(points, target, tol),
        Combination::Feasible { .. }
    )
}

/// Nonnegative coefficients expressing `direction` over `generators`, or a
/// ray `u` with `<u, g> <= 0` for every generator and `<u, direction> > 0`.
pub fn cone_membership(
    generators: &[Vector],
    direction: &[f64],
    tol: &Tolerance,
) -> std::result::Result<Vec<f64>, Vector> {
    match phase1(generators, direction, tol) {
        Phase1::Feasible(y) => Ok(y),
        Phase1::Infeasible(u) => Err(u),
    }
}

/// Convenience wrapper for membership plus reconstruction error.
pub fn combination_residual(points: &[Vector], weights: &[f64], target: &[f64]) -> Result<f64> {
    let d = target.len();
    let mut acc = vec![0.0; d];
    for (w, p) in weights.iter().zip(points) {
        for i in 0..d {
            acc[i] += w * p[i];
        }
    }
    Ok(crate::geom::dist(&acc, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{dist, dot};
    use crate::rng::Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn centroid_is_reproduced() {
        let points = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]];
        let target = vec![0.0, 0.0];
        match convex_combination(&points, &target, &tol()) {
            Combination::Feasible { weights } => {
                assert!(weights.iter().all(|&w| w >= 0.0));
                assert!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                assert!(combination_residual(&points, &weights, &target).unwrap() <= 1e-9);
            }
            Combination::Infeasible { .. } => panic!("centroid must be feasible"),
        }
    }

    #[test]
    fn outside_target_yields_separating_witness() {
        let points = vec![
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
        ];
        let target = vec![3.0, 0.2];
        match convex_combination(&points, &target, &tol()) {
            Combination::Feasible { .. } => panic!("target is outside the square"),
            Combination::Infeasible { witness } => {
                let h = points
                    .iter()
                    .map(|p| dot(&witness, p))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(
                    dot(&witness, &target) > h,
                    "witness fails to separate: {} vs {}",
                    dot(&witness, &target),
                    h
                );
            }
        }
    }

    #[test]
    fn boundary_point_is_feasible() {
        let points = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]];
        let target = vec![1.0, 1.0]; // midpoint of an edge
        assert!(in_convex_hull(&points, &target, &tol()));
    }

    #[test]
    fn cone_spans_plane_with_three_generators() {
        let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]];
        for dir in [
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ] {
            let y = cone_membership(&gens, &dir, &tol()).expect("cone spans the plane");
            let mut acc = vec![0.0, 0.0];
            for (c, g) in y.iter().zip(&gens) {
                acc[0] += c * g[0];
                acc[1] += c * g[1];
            }
            assert!(dist(&acc, &dir) <= 1e-9);
        }
    }

    #[test]
    fn halfplane_cone_certifies_missing_direction() {
        let gens = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let ray = cone_membership(&gens, &[-1.0, 0.0], &tol()).unwrap_err();
        for g in &gens {
            assert!(dot(&ray, g) <= 1e-9);
        }
        assert!(dot(&ray, &[-1.0, 0.0]) > 0.0);
    }

    #[test]
    fn random_interior_targets_are_reproduced() {
        let mut rng = Rng::new(5);
        for _ in 0..30 {
            let d = 3;
            let m = 8;
            let points: Vec<Vector> = (0..m)
                .map(|_| (0..d).map(|_| rng.range_f64(-1.0, 1.0)).collect())
                .collect();
            // A random convex combination is always inside.
            let mut w: Vec<f64> = (0..m).map(|_| rng.range_f64(0.0, 1.0)).collect();
            let s: f64 = w.iter().sum();
            for x in &mut w {
                *x /= s;
            }
            let mut target = vec![0.0; d];
            for (wi, p) in w.iter().zip(&points) {
                for i in 0..d {
                    target[i] += wi * p[i];
                }
            }
            match convex_combination(&points, &target, &tol()) {
                Combination::Feasible { weights } => {
                    assert!(combination_residual(&points, &weights, &target).unwrap() <= 1e-8);
                }
                Combination::Infeasible { .. } => panic!("interior target must be feasible"),
            }
        }
    }
}
