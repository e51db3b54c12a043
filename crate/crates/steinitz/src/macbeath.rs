//! Numerical explorer for the symmetry center of a convex body: the
//! maximizer of `x -> vol(K ∩ (-K + 2x))` and the smallest `lambda` with
//! `K - p ⊆ -lambda (K - p)`.
//!
//! Volumes are Monte-Carlo estimates with common random numbers across
//! objective evaluations, so the derivative-free search sees one
//! consistent noisy landscape. Results are evidence at desk scale, not
//! proofs, and reports carry the sampling error.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{dot, norm, Tolerance, Vector};
use crate::lp;
use crate::polarity::PointCloud;
use crate::rng::Rng;

#[derive(Clone, Debug)]
pub struct MacbeathConfig {
    pub samples: usize,
    pub seed: u64,
    /// Random interior starts tried in addition to the centroid.
    pub random_restarts: usize,
    /// Initial pattern step as a fraction of the largest box extent.
    pub initial_step: f64,
    /// Pattern search stops once the step shrinks below this fraction.
    pub min_step: f64,
    pub bisection_tol: f64,
}

impl Default for MacbeathConfig {
    fn default() -> Self {
        MacbeathConfig {
            samples: 4000,
            seed: 0,
            random_restarts: 2,
            initial_step: 0.25,
            min_step: 1e-3,
            bisection_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MacbeathReport {
    pub point: Vector,
    pub volume_at_point: f64,
    pub volume_stderr: f64,
    pub inclusion_factor: f64,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
}

fn bounding_box(k: &PointCloud) -> (Vector, Vector) {
    let d = k.dim;
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in &k.points {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

fn spans_space(k: &PointCloud, tol: &Tolerance) -> bool {
    // Full-dimensional iff d of the edge vectors from the first point are
    // independent; greedy orthogonalization suffices at desk scale.
    let d = k.dim;
    let base = &k.points[0];
    let mut ortho: Vec<Vector> = Vec::new();
    for p in k.points.iter().skip(1) {
        let mut r = crate::geom::sub(p, base);
        for q in &ortho {
            let c = dot(&r, q);
            for i in 0..d {
                r[i] -= c * q[i];
            }
        }
        let n = norm(&r);
        if n > tol.sing_eps * 1e3 {
            ortho.push(r.iter().map(|x| x / n).collect());
            if ortho.len() == d {
                return true;
            }
        }
    }
    false
}

/// Monte-Carlo estimate of `vol(K ∩ (-K + 2x))` from box sampling.
/// Membership is decided by convex-combination feasibility.
pub fn intersection_volume_mc(
    k: &PointCloud,
    x: &[f64],
    samples: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<VolumeEstimate> {
    if !spans_space(k, tol) {
        return Err(Error::DegenerateCloud);
    }
    let d = k.dim;
    let (lo, hi) = bounding_box(k);
    let box_vol: f64 = (0..d).map(|i| hi[i] - lo[i]).product();
    let mut rng = Rng::new(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let u: Vector = (0..d).map(|i| rng.range_f64(lo[i], hi[i])).collect();
        if !lp::in_convex_hull(&k.points, &u, tol) {
            continue;
        }
        // u in -K + 2x  <=>  2x - u in K
        let mirrored: Vector = (0..d).map(|i| 2.0 * x[i] - u[i]).collect();
        if lp::in_convex_hull(&k.points, &mirrored, tol) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        value: box_vol * p,
        stderr: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

/// Smallest `lambda` with `K - p ⊆ -lambda (K - p)`, by per-vertex ray
/// bisection: for each cloud point u, find the largest t with
/// `p - t (u - p)` still in K; the factor is the reciprocal of the
/// smallest such t.
pub fn inclusion_factor(
    k: &PointCloud,
    p: &[f64],
    bisection_tol: f64,
    tol: &Tolerance,
) -> Result<f64> {
    if !lp::in_convex_hull(&k.points, p, tol) {
        return Err(Error::InfeasiblePoint);
    }
    let d = k.dim;
    let mut worst = 0.0_f64;
    for u in &k.points {
        let dir: Vector = (0..d).map(|i| p[i] - u[i]).collect();
        if norm(&dir) <= 1e-14 {
            continue;
        }
        let point_at = |t: f64| -> Vector { (0..d).map(|i| p[i] + t * dir[i]).collect() };
        // Bracket the exit parameter, then bisect.
        let mut t_in = 0.0_f64;
        let mut t_out = 1.0_f64;
        let mut expansions = 0;
        while lp::in_convex_hull(&k.points, &point_at(t_out), tol) {
            t_in = t_out;
            t_out *= 2.0;
            expansions += 1;
            if expansions > 60 {
                return Err(Error::VerificationFailed {
                    check: "inclusion_factor_bracket".into(),
                    detail: "ray never exits the hull".into(),
                });
            }
        }
        while t_out - t_in > bisection_tol {
            let mid = 0.5 * (t_in + t_out);
            if lp::in_convex_hull(&k.points, &point_at(mid), tol) {
                t_in = mid;
            } else {
                t_out = mid;
            }
        }
        let t_exit = 0.5 * (t_in + t_out);
        worst = worst.max(1.0 / t_exit);
    }
    Ok(worst)
}

/// Derivative-free maximization of the intersection volume with common
/// random numbers, then the inclusion factor at the found point.
pub fn find_macbeath_point(
    k: &PointCloud,
    config: &MacbeathConfig,
    tol: &Tolerance,
) -> Result<MacbeathReport> {
    if !spans_space(k, tol) {
        return Err(Error::DegenerateCloud);
    }
    let d = k.dim;
    let (lo, hi) = bounding_box(k);
    let box_vol: f64 = (0..d).map(|i| hi[i] - lo[i]).product();
    let extent = (0..d).map(|i| hi[i] - lo[i]).fold(0.0_f64, f64::max);

    // Common random numbers: one sample set, K-membership precomputed.
    let mut rng = Rng::new(config.seed);
    let in_k: Vec<Vector> = {
        let mut kept = Vec::new();
        for _ in 0..config.samples {
            let u: Vector = (0..d).map(|i| rng.range_f64(lo[i], hi[i])).collect();
            if lp::in_convex_hull(&k.points, &u, tol) {
                kept.push(u);
            }
        }
        kept
    };
    if in_k.is_empty() {
        return Err(Error::DegenerateCloud);
    }
    // Counts only; the box volume factor is monotone and shared.
    let objective = |x: &[f64]| -> usize {
        in_k.iter()
            .filter(|u| {
                let mirrored: Vector = (0..d).map(|i| 2.0 * x[i] - u[i]).collect();
                lp::in_convex_hull(&k.points, &mirrored, tol)
            })
            .count()
    };

    let centroid: Vector = (0..d)
        .map(|i| k.points.iter().map(|p| p[i]).sum::<f64>() / k.len() as f64)
        .collect();
    let mut starts = vec![centroid];
    for _ in 0..config.random_restarts {
        // Random interior point from random convex weights.
        let mut w: Vec<f64> = (0..k.len())
            .map(|_| -(1.0 - rng.next_f64()).ln())
            .collect();
        let s: f64 = w.iter().sum();
        for x in &mut w {
            *x /= s;
        }
        let mut p = vec![0.0; d];
        for (wi, q) in w.iter().zip(&k.points) {
            for i in 0..d {
                p[i] += wi * q[i];
            }
        }
        starts.push(p);
    }

    let mut best_point: Option<(usize, Vector)> = None;
    for start in starts {
        let mut x = start;
        let mut fx = objective(&x);
        let mut step = config.initial_step * extent;
        let min_step = config.min_step * extent;
        while step >= min_step {
            let mut improved = false;
            for i in 0..d {
                for sign in [1.0, -1.0] {
                    let mut cand = x.clone();
                    cand[i] += sign * step;
                    if !lp::in_convex_hull(&k.points, &cand, tol) {
                        continue;
                    }
                    let fc = objective(&cand);
                    if fc > fx {
                        x = cand;
                        fx = fc;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if best_point.as_ref().is_none_or(|(bf, _)| fx > *bf) {
            best_point = Some((fx, x));
        }
    }
    let (hits, point) = best_point.expect("at least the centroid start runs");

    let p_hat = hits as f64 / config.samples as f64;
    let volume = box_vol * p_hat;
    let stderr = box_vol * (p_hat * (1.0 - p_hat) / config.samples as f64).sqrt();
    let factor = inclusion_factor(k, &point, config.bisection_tol, tol)?;
    Ok(MacbeathReport {
        point,
        volume_at_point: volume,
        volume_stderr: stderr,
        inclusion_factor: factor,
        samples: config.samples,
        seed: config.seed,
    })
}

// ----- exact 2-D oracle -------------------------------------------------

/// Convex hull in CCW order (monotone chain). Used by the exact clipper.
pub fn convex_hull_2d(points: &[Vector]) -> Vec<Vector> {
    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| crate::geom::dist(a, b) < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: &Vector, a: &Vector, b: &Vector| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<Vector> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vector> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(poly: &[Vector]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        acc += poly[i][0] * poly[j][1] - poly[j][0] * poly[i][1];
    }
    acc.abs() / 2.0
}

/// Sutherland-Hodgman clip of a convex subject polygon by the halfplane to
/// the left of the directed edge (a, b).
fn clip_by_edge(subject: &[Vector], a: &Vector, b: &Vector) -> Vec<Vector> {
    let inside = |p: &Vector| -> f64 {
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    };
    let mut out: Vec<Vector> = Vec::new();
    let n = subject.len();
    for i in 0..n {
        let cur = &subject[i];
        let prev = &subject[(i + n - 1) % n];
        let ic = inside(cur);
        let ip = inside(prev);
        let intersect = || -> Vector {
            let t = ip / (ip - ic);
            vec![
                prev[0] + t * (cur[0] - prev[0]),
                prev[1] + t * (cur[1] - prev[1]),
            ]
        };
        if ic >= 0.0 {
            if ip < 0.0 {
                out.push(intersect());
            }
            out.push(cur.clone());
        } else if ip >= 0.0 {
            out.push(intersect());
        }
    }
    out
}

/// Exact area of `K ∩ (-K + 2x)` for a planar cloud, by convex polygon
/// clipping. The independent oracle for the Monte-Carlo estimate.
pub fn exact_intersection_area_2d(k: &PointCloud, x: &[f64]) -> Result<f64> {
    if k.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: k.dim,
        });
    }
    let subject = convex_hull_2d(&k.points);
    let mirrored: Vec<Vector> = k
        .points
        .iter()
        .map(|p| vec![2.0 * x[0] - p[0], 2.0 * x[1] - p[1]])
        .collect();
    let clipper = convex_hull_2d(&mirrored);
    if subject.len() < 3 || clipper.len() < 3 {
        return Ok(0.0);
    }
    let mut poly = subject;
    for i in 0..clipper.len() {
        let a = clipper[i].clone();
        let b = clipper[(i + 1) % clipper.len()].clone();
        poly = clip_by_edge(&poly, &a, &b);
        if poly.len() < 3 {
            return Ok(0.0);
        }
    }
    Ok(polygon_area(&poly))
}
