//! The selection pipeline: prune to extreme points, re-center the polar,
//! map to the balanced picture, pick a locally maximal simplex, close the
//! selection with an anchored Caratheodory step, and certify the inscribed
//! radius of the result.
//!
//! Every geometric claim the construction relies on is re-verified
//! numerically along the way and recorded in the certificate; a failed
//! check is a bug signal, not a soft warning.

use serde::Serialize;

use crate::center::{solve_center, verify_zero_sum, WeightedSystem};
use crate::error::{Error, Result};
use crate::geom::{dist, dot, gram_dual_coeffs, norm, KahanSum, Matrix, Tolerance, Vector};
use crate::lp::{self, Combination};
use crate::polarity::{
    certify_ball_in_hull, inscribed_radius_at_origin, polar_of_cloud, vertex_correspondence,
    PointCloud,
};
use crate::rng::Rng;

/// Single-vertex swaps must beat this factor to count as an improvement.
const SWAP_IMPROVEMENT: f64 = 1.0 + 1e-9;
/// Slack for the containment coefficients checked after the simplex search.
const INCLUSION_SLACK: f64 = 1e-8;
/// Escalating restart budgets tried before giving up on local maximality.
const RESTART_SCHEDULE: [u32; 3] = [3, 10, 30];

/// A locally maximal origin-anchored simplex.
#[derive(Clone, Debug, Serialize)]
pub struct SimplexResult {
    /// Indices of the d chosen points.
    pub indices: Vec<usize>,
    /// `|det[w_1 .. w_d]| / d!`.
    pub volume: f64,
    pub swaps: u32,
    pub restarts_used: u32,
}

/// Convex representation of a target over at most d cloud points plus a
/// prescribed anchor.
#[derive(Clone, Debug, Serialize)]
pub struct CaratheodoryResult {
    /// At most d indices into the candidate cloud.
    pub indices: Vec<usize>,
    /// Convex weights on `{anchor} ∪ chosen`; entry 0 is the anchor's.
    pub coefficients: Vec<f64>,
    /// Worst recomputed reproduction error across reduction steps.
    pub max_step_residual: f64,
}

/// Per-run record of the verified geometric facts.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaChecks {
    /// Norm of the (weighted) vertex-image sum at the solved center.
    pub zero_sum_residual: f64,
    /// Inscribed radius of the re-centered cloud; must clear 1/2.
    pub recentered_inradius: f64,
    /// Largest |coefficient| of any cloud point in the simplex basis.
    pub zonotope_max_abs_coeff: f64,
    /// Worst barycentric violation over all sign-vertices of the zonotope.
    pub zonotope_vertex_excess: f64,
    /// Inscribed radius of the selected points in the re-centered picture,
    /// against the required 1/(2(m+d)).
    pub selected_midspace_inradius: f64,
    pub selected_midspace_required: f64,
    /// Distance between the analytic centroid identity and the actual mean
    /// of the non-simplex points.
    pub centroid_residual: f64,
    /// Reproduction error of the final Caratheodory representation.
    pub caratheodory_residual: f64,
    pub caratheodory_max_step_residual: f64,
    pub simplex_volume: f64,
    pub simplex_swaps: u32,
    pub simplex_restarts: u32,
}

/// Output of the selection pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct SelectionCertificate {
    pub dim: usize,
    /// Number of points that survived pruning; the radius bound uses it.
    pub pruned_m: usize,
    /// Selected indices into the original input cloud.
    pub selected_indices: Vec<usize>,
    /// Inscribed radius of the selected points, certified by enumeration.
    pub certified_radius: f64,
    /// `1 / (2(m + d) + 1)` with `m = pruned_m`.
    pub guaranteed_radius: f64,
    pub lemma_checks: LemmaChecks,
}

/// Checks produced by `verify_simplex_inclusions`.
#[derive(Clone, Debug, Serialize)]
pub struct InclusionChecks {
    pub max_abs_coeff: f64,
    pub zonotope_vertex_excess: f64,
}

/// Stage record of the two-stage cross-polytope reduction pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct TwoStageCertificate {
    /// Indices into the original cloud collected by the axis targets.
    pub stage1_indices: Vec<usize>,
    /// Certified inscribed radius of the stage-1 union.
    pub stage1_inradius: f64,
    /// Required stage-1 radius, `1/sqrt(d)`.
    pub stage1_required: f64,
    /// Final floor `d^(-5/2) / 7` the certificate must clear.
    pub final_floor: f64,
    pub certificate: SelectionCertificate,
}

/// Drop duplicates and hull-interior points; returns the surviving cloud
/// and the original index of each survivor.
pub fn prune_to_extreme(q: &PointCloud, tol: &Tolerance) -> Result<(PointCloud, Vec<usize>)> {
    let (deduped, idx) = q.dedup();
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..deduped.len() {
        let others: Vec<Vector> = deduped
            .points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        if others.is_empty() || !lp::in_convex_hull(&others, &deduped.points[i], tol) {
            keep.push(i);
        }
    }
    let points: Vec<Vector> = keep.iter().map(|&i| deduped.points[i].clone()).collect();
    let orig: Vec<usize> = keep.iter().map(|&i| idx[i]).collect();
    Ok((PointCloud::new(q.dim, points)?, orig))
}

/// Phase-1 feasibility for `target = sum w_i q_i, sum w_i = 1, w >= 0`.
pub fn initial_convex_combination(
    cloud: &PointCloud,
    target: &[f64],
    tol: &Tolerance,
) -> Combination {
    lp::convex_combination(&cloud.points, target, tol)
}

/// Representation of `target` over `{anchor} ∪ cloud` with at most d cloud
/// points, by support reduction that only ever grows the anchor weight.
pub fn anchored_caratheodory(
    cloud: &PointCloud,
    target: &[f64],
    anchor: &[f64],
    tol: &Tolerance,
) -> Result<CaratheodoryResult> {
    let d = cloud.dim;
    let weights = match initial_convex_combination(cloud, target, tol) {
        Combination::Feasible { weights } => weights,
        Combination::Infeasible { witness } => {
            return Err(Error::TargetNotInHull { witness });
        }
    };
    let mut lambda = weights;
    let mut mu = 0.0_f64;
    let mut support: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i] > 0.0).collect();
    let mut max_step_residual = 0.0_f64;

    let residual = |lambda: &[f64], mu: f64| -> f64 {
        let mut acc = vec![0.0; d];
        for (i, p) in cloud.points.iter().enumerate() {
            if lambda[i] != 0.0 {
                for k in 0..d {
                    acc[k] += lambda[i] * p[k];
                }
            }
        }
        for k in 0..d {
            acc[k] += mu * anchor[k];
        }
        dist(&acc, target)
    };

    while support.len() > d {
        let columns: Vec<Vector> = support
            .iter()
            .map(|&i| crate::geom::sub(&cloud.points[i], anchor))
            .collect();
        let mut dep = crate::geom::nullspace_vector(&columns, d, tol).ok_or_else(|| {
            Error::VerificationFailed {
                check: "caratheodory_dependence".into(),
                detail: "no dependence among an over-sized support".into(),
            }
        })?;
        // Orient so the anchor weight never decreases and a positive entry
        // exists to zero out.
        let sum_c: f64 = dep.iter().sum();
        let has_positive = dep.iter().any(|&c| c > 1e-14);
        if sum_c < 0.0 || (sum_c.abs() <= 1e-14 && !has_positive) {
            for c in &mut dep {
                *c = -*c;
            }
        }
        let mut t = f64::INFINITY;
        let mut kill: Option<usize> = None;
        for (k, &c) in dep.iter().enumerate() {
            if c > 1e-14 {
                let ratio = lambda[support[k]] / c;
                if ratio < t {
                    t = ratio;
                    kill = Some(k);
                }
            }
        }
        let kill = kill.ok_or_else(|| Error::VerificationFailed {
            check: "caratheodory_step".into(),
            detail: "dependence has no positive component".into(),
        })?;
        let sum_c: f64 = dep.iter().sum();
        for (k, &c) in dep.iter().enumerate() {
            let i = support[k];
            lambda[i] = (lambda[i] - t * c).max(0.0);
        }
        lambda[support[kill]] = 0.0;
        mu += t * sum_c;
        max_step_residual = max_step_residual.max(residual(&lambda, mu));
        support.retain(|&i| lambda[i] > 0.0);
    }

    let mut coefficients = Vec::with_capacity(support.len() + 1);
    coefficients.push(mu);
    coefficients.extend(support.iter().map(|&i| lambda[i]));
    Ok(CaratheodoryResult {
        indices: support,
        coefficients,
        max_step_residual,
    })
}

fn greedy_simplex(l: &PointCloud, first: Option<usize>, tol: &Tolerance) -> Result<Vec<usize>> {
    let d = l.dim;
    let mut chosen: Vec<usize> = Vec::with_capacity(d);
    // Orthonormalized span of the chosen points, for the orthogonal factor.
    let mut ortho: Vec<Vector> = Vec::with_capacity(d);
    if let Some(i) = first {
        if norm(&l.points[i]) > tol.sing_eps {
            chosen.push(i);
            let n = norm(&l.points[i]);
            ortho.push(l.points[i].iter().map(|x| x / n).collect());
        }
    }
    while chosen.len() < d {
        let mut best: Option<(f64, usize, Vector)> = None;
        for (i, p) in l.points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut r = p.clone();
            for q in &ortho {
                let c = dot(&r, q);
                for k in 0..d {
                    r[k] -= c * q[k];
                }
            }
            let f = norm(&r);
            if best.as_ref().is_none_or(|(bf, _, _)| f > *bf) {
                best = Some((f, i, r));
            }
        }
        match best {
            Some((f, i, r)) if f > tol.sing_eps => {
                chosen.push(i);
                ortho.push(r.iter().map(|x| x / f).collect());
            }
            _ => return Err(Error::DegenerateCloud),
        }
    }
    Ok(chosen)
}

/// Locally maximal simplex with one vertex at the origin and d vertices
/// from the cloud: greedy init, then single-vertex swaps until no swap
/// improves the volume by more than the threshold factor. Best over the
/// requested number of restarts; ties keep the earliest restart.
pub fn max_volume_simplex_at_origin(
    l: &PointCloud,
    restarts: u32,
    seed: u64,
    tol: &Tolerance,
) -> Result<SimplexResult> {
    let d = l.dim;
    let m = l.len();
    if m < d {
        return Err(Error::DegenerateCloud);
    }
    let mut rng = Rng::new(seed);
    let mut best: Option<(f64, Vec<usize>, u32)> = None;
    let restarts = restarts.max(1);
    for r in 0..restarts {
        let first = if r == 0 {
            None
        } else {
            Some(rng.next_usize(m))
        };
        let mut chosen = match greedy_simplex(l, first, tol) {
            Ok(c) => c,
            Err(Error::DegenerateCloud) if r > 0 => continue,
            Err(e) => return Err(e),
        };
        let mut swaps = 0u32;
        loop {
            let cols: Vec<&[f64]> = chosen.iter().map(|&i| l.points[i].as_slice()).collect();
            let basis = Matrix::from_columns(&cols)?;
            // Replacing chosen[j] by point p scales |det| by |coeff_j(p)|.
            let mut best_swap: Option<(f64, usize, usize)> = None;
            for (i, p) in l.points.iter().enumerate() {
                if chosen.contains(&i) {
                    continue;
                }
                let t = match basis.solve(p, tol) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                for (j, &tj) in t.iter().enumerate() {
                    let f = tj.abs();
                    if f > SWAP_IMPROVEMENT
                        && best_swap.as_ref().is_none_or(|(bf, _, _)| f > *bf)
                    {
                        best_swap = Some((f, j, i));
                    }
                }
            }
            match best_swap {
                Some((_, j, i)) => {
                    chosen[j] = i;
                    swaps += 1;
                }
                None => break,
            }
        }
        let cols: Vec<&[f64]> = chosen.iter().map(|&i| l.points[i].as_slice()).collect();
        let vol = Matrix::from_columns(&cols)?.det(tol).abs() / factorial(d);
        if best.as_ref().is_none_or(|(bv, _, _)| vol > *bv) {
            best = Some((vol, chosen, swaps));
        }
    }
    let (volume, mut indices, swaps) = best.ok_or(Error::DegenerateCloud)?;
    if volume <= 0.0 {
        return Err(Error::DegenerateCloud);
    }
    indices.sort_unstable();
    Ok(SimplexResult {
        indices,
        volume,
        swaps,
        restarts_used: restarts,
    })
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// Containment checks for a locally maximal simplex:
/// (a) every cloud point has all basis coefficients in [-1, 1];
/// (b) every sign-vertex of the induced parallelotope lies in the shifted
///     and negatively scaled simplex.
pub fn verify_simplex_inclusions(
    l: &PointCloud,
    s: &SimplexResult,
    tol: &Tolerance,
) -> Result<InclusionChecks> {
    let d = l.dim;
    let w: Vec<Vector> = s.indices.iter().map(|&i| l.points[i].clone()).collect();
    let mut max_abs = 0.0_f64;
    let mut worst: Option<(usize, f64)> = None;
    for (i, p) in l.points.iter().enumerate() {
        let t = gram_dual_coeffs(&w, p, tol)?;
        let c = t.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if c > max_abs {
            max_abs = c;
            worst = Some((i, c));
        }
    }
    if max_abs > 1.0 + INCLUSION_SLACK {
        let (point_index, c) = worst.unwrap();
        return Err(Error::InclusionViolated {
            point_index,
            margin: c - 1.0,
        });
    }

    let mut sum_w = vec![0.0; d];
    for v in &w {
        for k in 0..d {
            sum_w[k] += v[k];
        }
    }
    let mut vertex_excess = 0.0_f64;
    for bits in 0..(1u32 << d) {
        // z = sum eps_i w_i, eps in {-1, +1}^d
        let mut z = vec![0.0; d];
        for (i, v) in w.iter().enumerate() {
            let eps = if bits & (1 << i) != 0 { 1.0 } else { -1.0 };
            for k in 0..d {
                z[k] += eps * v[k];
            }
        }
        // z in -2dS + sum_w  <=>  (sum_w - z) / 2d in conv{0, w_1..w_d}.
        let y: Vector = (0..d)
            .map(|k| (sum_w[k] - z[k]) / (2.0 * d as f64))
            .collect();
        let muv = gram_dual_coeffs(&w, &y, tol)?;
        let neg = muv.iter().fold(0.0_f64, |m, x| m.max(-x));
        let over = (muv.iter().sum::<f64>() - 1.0).max(0.0);
        let excess = neg.max(over);
        vertex_excess = vertex_excess.max(excess);
        if excess > INCLUSION_SLACK {
            return Err(Error::InclusionViolated {
                point_index: bits as usize,
                margin: excess,
            });
        }
    }
    Ok(InclusionChecks {
        max_abs_coeff: max_abs,
        zonotope_vertex_excess: vertex_excess,
    })
}

fn check(cond: bool, check_name: &str, detail: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::VerificationFailed {
            check: check_name.into(),
            detail,
        })
    }
}

/// Full selection pipeline for a cloud whose hull contains the unit ball:
/// returns at most 2d of the points whose hull still contains the ball of
/// radius `1/(2(m+d)+1)`, certified by enumeration.
pub fn select_steinitz(q: &PointCloud, tol: &Tolerance, seed: u64) -> Result<SelectionCertificate> {
    let ball = certify_ball_in_hull(q, 1.0, tol)?;
    if !ball.contained {
        let w = ball.witness.expect("failed check carries a witness");
        return Err(Error::BallNotContained {
            direction: w.direction,
            support: w.support,
            required: 1.0,
        });
    }

    let d = q.dim;
    let (pruned, orig_idx) = prune_to_extreme(q, tol)?;
    let m = pruned.len();
    if m < d + 1 {
        return Err(Error::TooFewPoints { points: m, dim: d });
    }

    // Re-center the polar so the vertex images sum to zero.
    let ws = WeightedSystem::unit(polar_of_cloud(&pruned));
    let cr = solve_center(&ws, tol, 200)?;
    check(
        cr.converged,
        "center_convergence",
        format!("residual {:.3e} after {} iterations", cr.residual, cr.iterations),
    )?;
    let zero_sum = verify_zero_sum(&ws, &cr.center, tol)?;
    check(
        zero_sum <= 1e-7,
        "zero_sum",
        format!("vertex-image sum has norm {zero_sum:.3e}"),
    )?;

    let images: Vec<Vector> = pruned
        .points
        .iter()
        .map(|p| vertex_correspondence(p, &cr.center, tol))
        .collect::<Result<_>>()?;
    let l = PointCloud::new(d, images)?;
    let recentered_inradius = inscribed_radius_at_origin(&l, tol)?;
    check(
        recentered_inradius >= 0.5 - 1e-8,
        "recentered_half_ball",
        format!("re-centered inradius {recentered_inradius:.6}"),
    )?;

    // Locally maximal simplex, with restart escalation if containment fails.
    let mut simplex: Option<(SimplexResult, InclusionChecks)> = None;
    let mut last_err: Option<Error> = None;
    for &budget in &RESTART_SCHEDULE {
        let s = max_volume_simplex_at_origin(&l, budget, seed, tol)?;
        match verify_simplex_inclusions(&l, &s, tol) {
            Ok(checks) => {
                simplex = Some((s, checks));
                break;
            }
            Err(e @ Error::InclusionViolated { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let (simplex, inclusion) = match simplex {
        Some(v) => v,
        None => return Err(last_err.expect("schedule is nonempty")),
    };

    // The remaining vertices average to the reflected simplex sum.
    let mut sum_w = vec![0.0; d];
    for &i in &simplex.indices {
        for (s, x) in sum_w.iter_mut().zip(&l.points[i]) {
            *s += x;
        }
    }
    let rest: Vec<usize> = (0..m).filter(|i| !simplex.indices.contains(i)).collect();
    let target: Vector = sum_w.iter().map(|x| -x / (m - d) as f64).collect();
    let anchor: Vector = sum_w.iter().map(|x| x / d as f64).collect();

    let mut mean = vec![KahanSum::new(); d];
    for &i in &rest {
        for (s, &x) in mean.iter_mut().zip(&l.points[i]) {
            s.add(x);
        }
    }
    let mean: Vector = mean.iter().map(|s| s.value() / rest.len() as f64).collect();
    let centroid_residual = dist(&mean, &target);
    check(
        centroid_residual <= 1e-9,
        "centroid_identity",
        format!("centroid residual {centroid_residual:.3e}"),
    )?;

    let rest_cloud = PointCloud::new(
        d,
        rest.iter().map(|&i| l.points[i].clone()).collect(),
    )?;
    let car = anchored_caratheodory(&rest_cloud, &target, &anchor, tol)?;
    let caratheodory_residual = {
        let mut acc: Vector = anchor.iter().map(|x| x * car.coefficients[0]).collect();
        for (k, &ri) in car.indices.iter().enumerate() {
            let wgt = car.coefficients[k + 1];
            for (a, x) in acc.iter_mut().zip(&rest_cloud.points[ri]) {
                *a += wgt * x;
            }
        }
        dist(&acc, &target)
    };
    check(
        caratheodory_residual <= 1e-8,
        "caratheodory_reproduction",
        format!("residual {caratheodory_residual:.3e}"),
    )?;

    // Union of simplex and Caratheodory picks, as positions in the pruned
    // cloud, then mapped to the original indexing.
    let mut selected_positions: Vec<usize> = simplex.indices.clone();
    selected_positions.extend(car.indices.iter().map(|&k| rest[k]));
    selected_positions.sort_unstable();
    selected_positions.dedup();
    check(
        selected_positions.len() <= 2 * d,
        "selection_size",
        format!("{} points selected", selected_positions.len()),
    )?;

    let midspace_cloud = PointCloud::new(
        d,
        selected_positions
            .iter()
            .map(|&i| l.points[i].clone())
            .collect(),
    )?;
    let selected_midspace_inradius = inscribed_radius_at_origin(&midspace_cloud, tol)?;
    let selected_midspace_required = 1.0 / (2.0 * (m + d) as f64);
    check(
        selected_midspace_inradius >= selected_midspace_required - 1e-8,
        "midspace_radius",
        format!(
            "selected re-centered inradius {selected_midspace_inradius:.6e} < {selected_midspace_required:.6e}"
        ),
    )?;

    let selected_indices: Vec<usize> = selected_positions.iter().map(|&i| orig_idx[i]).collect();
    let selected_cloud = PointCloud::new(
        d,
        selected_indices
            .iter()
            .map(|&i| q.points[i].clone())
            .collect(),
    )?;
    let certified_radius = inscribed_radius_at_origin(&selected_cloud, tol)?;
    let guaranteed_radius = 1.0 / (2.0 * (m + d) as f64 + 1.0);
    check(
        certified_radius >= guaranteed_radius - 1e-8,
        "certified_radius",
        format!("certified {certified_radius:.6e} < guaranteed {guaranteed_radius:.6e}"),
    )?;

    Ok(SelectionCertificate {
        dim: d,
        pruned_m: m,
        selected_indices,
        certified_radius,
        guaranteed_radius,
        lemma_checks: LemmaChecks {
            zero_sum_residual: zero_sum,
            recentered_inradius,
            zonotope_max_abs_coeff: inclusion.max_abs_coeff,
            zonotope_vertex_excess: inclusion.zonotope_vertex_excess,
            selected_midspace_inradius,
            selected_midspace_required,
            centroid_residual,
            caratheodory_residual,
            caratheodory_max_step_residual: car.max_step_residual,
            simplex_volume: simplex.volume,
            simplex_swaps: simplex.swaps,
            simplex_restarts: simplex.restarts_used,
        },
    })
}

/// Selection for a cloud of roughly `alpha * d` points whose hull contains
/// `lambda * B`: rescale, select, rescale back, and check the
/// `lambda / (5 alpha d)` floor.
pub fn select_scaled(
    q: &PointCloud,
    alpha: f64,
    lambda: f64,
    tol: &Tolerance,
    seed: u64,
) -> Result<SelectionCertificate> {
    if !(alpha > 1.0) {
        return Err(Error::InvalidInput("alpha must exceed 1".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput("lambda must be positive".into()));
    }
    let d = q.dim;
    if q.len() as f64 > alpha * d as f64 * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!(
            "cloud has {} points, more than alpha * d = {}",
            q.len(),
            alpha * d as f64
        )));
    }
    let ball = certify_ball_in_hull(q, lambda, tol)?;
    if !ball.contained {
        let w = ball.witness.expect("failed check carries a witness");
        return Err(Error::BallNotContained {
            direction: w.direction,
            support: w.support,
            required: lambda,
        });
    }
    let scaled = q.scaled(1.0 / lambda);
    let mut cert = select_steinitz(&scaled, tol, seed)?;
    cert.certified_radius *= lambda;
    cert.guaranteed_radius *= lambda;
    let floor = lambda / (5.0 * alpha * d as f64);
    check(
        cert.certified_radius >= floor - 1e-8,
        "scaled_floor",
        format!(
            "certified {:.6e} < floor {floor:.6e}",
            cert.certified_radius
        ),
    )?;
    Ok(cert)
}

/// Two-stage pipeline for arbitrary clouds containing the unit ball:
/// collect at most 2d^2 points covering an inscribed cross-polytope, then
/// select 2d among them. The final radius clears `d^(-5/2) / 7`.
pub fn select_two_stage(
    q: &PointCloud,
    tol: &Tolerance,
    seed: u64,
) -> Result<TwoStageCertificate> {
    let d = q.dim;
    let ball = certify_ball_in_hull(q, 1.0, tol)?;
    if !ball.contained {
        let w = ball.witness.expect("failed check carries a witness");
        return Err(Error::BallNotContained {
            direction: w.direction,
            support: w.support,
            required: 1.0,
        });
    }

    // Stage 1: for every signed basis direction, an origin-anchored
    // Caratheodory step picks at most d points reaching it.
    let origin = vec![0.0; d];
    let mut union: Vec<usize> = Vec::new();
    for j in 0..d {
        for sign in [1.0, -1.0] {
            let mut target = vec![0.0; d];
            target[j] = sign;
            let car = anchored_caratheodory(q, &target, &origin, tol)?;
            union.extend(car.indices.iter().copied());
        }
    }
    union.sort_unstable();
    union.dedup();
    let stage1_cloud = PointCloud::new(
        d,
        union.iter().map(|&i| q.points[i].clone()).collect(),
    )?;
    let stage1_inradius = inscribed_radius_at_origin(&stage1_cloud, tol)?;
    let stage1_required = 1.0 / (d as f64).sqrt();
    check(
        stage1_inradius >= stage1_required - 1e-8,
        "stage1_cross_polytope",
        format!("stage-1 inradius {stage1_inradius:.6e} < {stage1_required:.6e}"),
    )?;

    // Stage 2: rescale so the hull contains the unit ball and select.
    let sqrt_d = (d as f64).sqrt();
    let scaled = stage1_cloud.scaled(sqrt_d);
    let mut cert = select_steinitz(&scaled, tol, seed)?;
    cert.certified_radius /= sqrt_d;
    cert.guaranteed_radius /= sqrt_d;
    cert.selected_indices = cert
        .selected_indices
        .iter()
        .map(|&i| union[i])
        .collect();
    let final_floor = (d as f64).powf(-2.5) / 7.0;
    check(
        cert.certified_radius >= final_floor - 1e-8,
        "two_stage_floor",
        format!(
            "certified {:.6e} < floor {final_floor:.6e}",
            cert.certified_radius
        ),
    )?;
    Ok(TwoStageCertificate {
        stage1_indices: union,
        stage1_inradius,
        stage1_required,
        final_floor,
        certificate: cert,
    })
}
