//! Weighted polar center: the interior point `c` of `{x : <x, v_i> <= 1}`
//! at which the weighted images `beta_i * v_i / (1 - <c, v_i>)` sum to zero.
//!
//! That point is the unique maximizer of the strictly concave objective
//! `sum_i beta_i * ln(1 - <x, v_i>)`, so the solver is damped Newton with a
//! fraction-to-boundary step cap and Armijo backtracking. The stopping
//! quantity is the norm of the zero-sum identity itself, since that
//! residual is the deliverable.
//!
//! All sums over normals run in a canonical order (lexicographic by normal
//! coordinates, then weight) with compensated accumulation, so the solve is
//! bitwise reproducible under permutations of the input and under any
//! partitioning of the accumulation.

use crate::error::{Error, Result};
use crate::geom::{dot, norm, KahanSum, Matrix, Tolerance, Vector};
use crate::polarity::{
    inscribed_radius_at_origin, vertex_correspondence, PointCloud, UnitHalfspaceSystem,
};

/// Halfspace system with one positive weight per normal.
#[derive(Clone, Debug)]
pub struct WeightedSystem {
    pub system: UnitHalfspaceSystem,
    pub weights: Vec<f64>,
    /// Canonical accumulation order over the normals.
    order: Vec<usize>,
}

impl WeightedSystem {
    pub fn new(system: UnitHalfspaceSystem, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != system.normals.len() {
            return Err(Error::DimensionMismatch {
                expected: system.normals.len(),
                got: weights.len(),
            });
        }
        if !weights.iter().all(|&w| w > 0.0 && w.is_finite()) {
            return Err(Error::InvalidInput(
                "weights must be strictly positive and finite".into(),
            ));
        }
        let mut order: Vec<usize> = (0..system.normals.len()).collect();
        order.sort_by(|&a, &b| {
            let (na, nb) = (&system.normals[a], &system.normals[b]);
            for (x, y) in na.iter().zip(nb) {
                match x.total_cmp(y) {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            weights[a].total_cmp(&weights[b])
        });
        Ok(WeightedSystem {
            system,
            weights,
            order,
        })
    }

    pub fn unit(system: UnitHalfspaceSystem) -> Self {
        let n = system.normals.len();
        WeightedSystem::new(system, vec![1.0; n]).expect("unit weights are valid")
    }

    fn slacks(&self, x: &[f64]) -> Result<Vec<f64>> {
        let s: Vec<f64> = self
            .system
            .normals
            .iter()
            .map(|v| 1.0 - dot(x, v))
            .collect();
        if s.iter().any(|&si| si <= 0.0) {
            return Err(Error::InfeasiblePoint);
        }
        Ok(s)
    }

    /// `1 + sum_i beta_i * |v_i|`, the scale of the residual bound.
    fn residual_scale(&self) -> f64 {
        let mut acc = KahanSum::new();
        for &i in &self.order {
            acc.add(self.weights[i] * norm(&self.system.normals[i]));
        }
        1.0 + acc.value()
    }
}

/// Result of a center solve.
#[derive(Clone, Debug)]
pub struct CenterResult {
    pub center: Vector,
    /// Norm of `sum_i beta_i * v_i / (1 - <c, v_i>)`.
    pub residual: f64,
    pub iterations: u32,
    pub converged: bool,
    pub log_objective: f64,
}

/// `sum_i beta_i * ln(1 - <x, v_i>)` for strictly feasible `x`.
pub fn log_objective(w: &WeightedSystem, x: &[f64]) -> Result<f64> {
    let s = w.slacks(x)?;
    let mut acc = KahanSum::new();
    for &i in &w.order {
        acc.add(w.weights[i] * s[i].ln());
    }
    Ok(acc.value())
}

/// Gradient of the log objective: `-sum_i beta_i * v_i / (1 - <x, v_i>)`.
pub fn gradient(w: &WeightedSystem, x: &[f64]) -> Result<Vector> {
    let s = w.slacks(x)?;
    let d = w.system.dim;
    let mut acc: Vec<KahanSum> = vec![KahanSum::new(); d];
    for &i in &w.order {
        let f = -w.weights[i] / s[i];
        for (k, sum) in acc.iter_mut().enumerate() {
            sum.add(f * w.system.normals[i][k]);
        }
    }
    Ok(acc.iter().map(|k| k.value()).collect())
}

/// `sum_i beta_i * v_i v_i^T / (1 - <x, v_i>)^2`, the negated Hessian of
/// the log objective; positive definite whenever the normals span.
fn curvature(w: &WeightedSystem, slacks: &[f64]) -> Matrix {
    let d = w.system.dim;
    let mut h = Matrix::zeros(d);
    for &i in &w.order {
        let f = w.weights[i] / (slacks[i] * slacks[i]);
        let v = &w.system.normals[i];
        for r in 0..d {
            let fr = f * v[r];
            for (c, &vc) in v.iter().enumerate() {
                *h.at_mut(r, c) += fr * vc;
            }
        }
    }
    h
}

/// Newton solve from the origin, which is strictly feasible under the
/// unit-RHS convention.
pub fn solve_center(w: &WeightedSystem, tol: &Tolerance, max_iter: u32) -> Result<CenterResult> {
    solve_center_from(w, &vec![0.0; w.system.dim], tol, max_iter)
}

/// Newton solve from an arbitrary strictly feasible start.
pub fn solve_center_from(
    w: &WeightedSystem,
    start: &[f64],
    tol: &Tolerance,
    max_iter: u32,
) -> Result<CenterResult> {
    // The objective has a maximizer iff the polytope is bounded, i.e. the
    // origin is interior to the hull of the normals.
    let normal_cloud = PointCloud::new(w.system.dim, w.system.normals.clone())?;
    if inscribed_radius_at_origin(&normal_cloud, tol)? <= 0.0 {
        return Err(Error::UnboundedPolytope);
    }

    let scale = w.residual_scale();
    let target = tol.grad_eps * scale;
    // Aim well below the contract bound; Newton is quadratic near the
    // optimum so the extra iterations are one or two at most.
    let strict_target = 1e-3 * target;
    const MIN_SLACK: f64 = 1e-12;
    const ARMIJO: f64 = 0.01;
    const BOUNDARY_FRACTION: f64 = 0.99;

    // Below this Newton decrement the iterate is inside the quadratic
    // basin; the objective can no longer resolve progress in f64 there
    // (changes scale with the squared residual), so acceptance switches
    // to strict residual decrease. Scaled for sub-unit weights, whose
    // self-concordance constant degrades like sqrt(beta_min).
    let beta_min = w.weights.iter().cloned().fold(f64::INFINITY, f64::min);
    let quad_basin = 0.1 * beta_min.min(1.0).sqrt();

    let mut x = start.to_vec();
    let mut slacks = w.slacks(&x)?;
    let mut g = gradient(w, &x)?;
    let mut res = norm(&g);
    let mut f_cur = log_objective(w, &x)?;
    let mut iterations = 0u32;

    while res > strict_target && iterations < max_iter {
        let h = curvature(w, &slacks);
        let l = h.cholesky()?;
        let step = Matrix::cholesky_solve(&l, &g);
        let ascent = dot(&g, &step);
        if ascent <= 0.0 {
            break; // numerically flat; residual already near the floor
        }
        // Fraction-to-boundary cap keeps every slack strictly positive.
        let mut t_max = f64::INFINITY;
        for (v, &s) in w.system.normals.iter().zip(&slacks) {
            let dv = dot(v, &step);
            if dv > 0.0 {
                t_max = t_max.min(s / dv);
            }
        }
        let t_cap = (BOUNDARY_FRACTION * t_max).min(1.0);
        let eval = |t: f64| -> (Vector, Vec<f64>) {
            let cand: Vector = x.iter().zip(&step).map(|(xi, si)| xi + t * si).collect();
            let cand_slacks: Vec<f64> = w
                .system
                .normals
                .iter()
                .map(|v| 1.0 - dot(&cand, v))
                .collect();
            (cand, cand_slacks)
        };
        let mut accepted = false;
        if ascent.sqrt() <= quad_basin {
            let (cand, cand_slacks) = eval(t_cap);
            if cand_slacks.iter().all(|&s| s >= MIN_SLACK) {
                let g_cand = gradient(w, &cand)?;
                let res_cand = norm(&g_cand);
                if res_cand.is_finite() && res_cand < res {
                    x = cand;
                    slacks = cand_slacks;
                    g = g_cand;
                    res = res_cand;
                    accepted = true;
                    iterations += 1;
                }
            }
            if !accepted {
                break; // residual floor reached
            }
            f_cur = log_objective(w, &x)?;
            continue;
        }
        // Damped phase: Armijo backtracking on the objective.
        let mut t = t_cap;
        while t > 1e-18 {
            let (cand, cand_slacks) = eval(t);
            if cand_slacks.iter().all(|&s| s >= MIN_SLACK) {
                let f_cand = {
                    let mut acc = KahanSum::new();
                    for &i in &w.order {
                        acc.add(w.weights[i] * cand_slacks[i].ln());
                    }
                    acc.value()
                };
                if f_cand >= f_cur + ARMIJO * t * ascent {
                    debug_assert!(f_cand >= f_cur);
                    x = cand;
                    slacks = cand_slacks;
                    f_cur = f_cand;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        iterations += 1;
        g = gradient(w, &x)?;
        let new_res = norm(&g);
        if !new_res.is_finite() {
            break;
        }
        res = new_res;
    }

    Ok(CenterResult {
        converged: res <= target,
        residual: res,
        iterations,
        log_objective: f_cur,
        center: x,
    })
}

/// Norm of the weighted vertex-image sum at `c`; zero exactly at the center.
pub fn verify_zero_sum(w: &WeightedSystem, c: &[f64], tol: &Tolerance) -> Result<f64> {
    w.slacks(c)?;
    let d = w.system.dim;
    let mut acc: Vec<KahanSum> = vec![KahanSum::new(); d];
    for &i in &w.order {
        let img = vertex_correspondence(&w.system.normals[i], c, tol)?;
        for (k, sum) in acc.iter_mut().enumerate() {
            sum.add(w.weights[i] * img[k]);
        }
    }
    let v: Vector = acc.iter().map(|k| k.value()).collect();
    Ok(norm(&v))
}
