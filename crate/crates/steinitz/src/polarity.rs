//! Polar duality between point clouds and unit-halfspace systems.
//!
//! Every halfspace system in this crate has right-hand side 1, so polarity
//! is a pure representation exchange: the polar of `conv{q_i}` is
//! `{x : <x, q_i> <= 1}` and vice versa. Vertex enumeration solves the
//! d-by-d system for every d-subset of normals and keeps the feasible
//! solutions. That is exponential in d but free of degeneracy corner cases
//! beyond duplicate merging, and certification code should stay simpler
//! than the code it certifies.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dist, dot, norm, Matrix, Tolerance, Vector};
use crate::lp;

/// Default cap on the number of d-subsets a single enumeration may visit.
pub const SUBSET_BUDGET: u64 = 5_000_000;

/// Proximity below which two enumerated vertices are merged.
const DEDUP_EPS: f64 = 1e-9;

/// Finite list of points; V-representation of `conv(points)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Vector>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("point cloud must be nonempty".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if !crate::geom::is_finite_vec(p) {
                return Err(Error::InvalidInput("point has nonfinite coordinates".into()));
            }
        }
        Ok(PointCloud { dim, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Merge points closer than 1e-12; keeps first occurrences and returns
    /// the surviving original indices alongside the deduplicated cloud.
    pub fn dedup(&self) -> (PointCloud, Vec<usize>) {
        let mut kept: Vec<Vector> = Vec::new();
        let mut idx: Vec<usize> = Vec::new();
        for (i, p) in self.points.iter().enumerate() {
            if !kept.iter().any(|q| dist(p, q) <= 1e-12) {
                kept.push(p.clone());
                idx.push(i);
            }
        }
        (
            PointCloud {
                dim: self.dim,
                points: kept,
            },
            idx,
        )
    }

    pub fn scaled(&self, s: f64) -> PointCloud {
        PointCloud {
            dim: self.dim,
            points: self.points.iter().map(|p| crate::geom::scaled(p, s)).collect(),
        }
    }
}

/// H-representation `{x : <x, n_i> <= 1 for all i}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitHalfspaceSystem {
    pub dim: usize,
    pub normals: Vec<Vector>,
}

/// Vertex set of a bounded unit-halfspace system together with one witness
/// subset of active normals per vertex.
#[derive(Clone, Debug)]
pub struct VertexEnumeration {
    pub vertices: Vec<Vector>,
    pub defining_subsets: Vec<Vec<usize>>,
}

/// Representation exchange: the polar of `conv(Q)` in unit-RHS form.
pub fn polar_of_cloud(q: &PointCloud) -> UnitHalfspaceSystem {
    UnitHalfspaceSystem {
        dim: q.dim,
        normals: q.points.clone(),
    }
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

/// Bounded iff the normals positively span R^d; equivalently every signed
/// basis direction lies in their conic hull. On failure the Farkas ray is a
/// feasible recession direction of the system.
fn check_bounded(h: &UnitHalfspaceSystem, tol: &Tolerance) -> Result<()> {
    for j in 0..h.dim {
        for sign in [1.0, -1.0] {
            let mut dir = vec![0.0; h.dim];
            dir[j] = sign;
            if let Err(ray) = lp::cone_membership(&h.normals, &dir, tol) {
                let n = norm(&ray);
                let ray = if n > 0.0 {
                    ray.iter().map(|x| x / n).collect()
                } else {
                    ray
                };
                return Err(Error::Unbounded { ray });
            }
        }
    }
    Ok(())
}

/// Visit the basic solution of every d-subset of normals that is feasible
/// for the whole system. Does not deduplicate.
fn for_each_feasible_basic_solution<F>(
    h: &UnitHalfspaceSystem,
    tol: &Tolerance,
    budget: u64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[usize], Vector),
{
    let d = h.dim;
    let m = h.normals.len();
    let subsets = binomial(m, d);
    if subsets > budget as f64 {
        return Err(Error::DimensionTooLarge { subsets, budget });
    }
    if m < d {
        return Ok(());
    }
    let ones = vec![1.0; d];
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let rows: Vec<&[f64]> = idx.iter().map(|&i| h.normals[i].as_slice()).collect();
        if let Ok(mat) = Matrix::from_rows(&rows) {
            if let Ok(x) = mat.solve(&ones, tol) {
                let feasible = h
                    .normals
                    .iter()
                    .all(|n| dot(n, &x) <= 1.0 + tol.feas_eps);
                if feasible {
                    visit(&idx, x);
                }
            }
        }
        // Advance to the next lexicographic d-subset.
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] != i + m - d {
                break;
            }
        }
        if idx[i] == i + m - d {
            return Ok(());
        }
        idx[i] += 1;
        for j in i + 1..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact vertex set of a bounded system by exhaustive d-subset solves.
pub fn enumerate_vertices(
    h: &UnitHalfspaceSystem,
    tol: &Tolerance,
) -> Result<VertexEnumeration> {
    check_bounded(h, tol)?;
    let mut vertices: Vec<Vector> = Vec::new();
    let mut defining: Vec<Vec<usize>> = Vec::new();
    for_each_feasible_basic_solution(h, tol, SUBSET_BUDGET, |subset, x| {
        if !vertices.iter().any(|v| dist(v, &x) <= DEDUP_EPS) {
            vertices.push(x);
            defining.push(subset.to_vec());
        }
    })?;
    if vertices.is_empty() {
        // A bounded nonempty polyhedron has vertices; reaching this means
        // the boundedness certificate and the enumeration disagree.
        return Err(Error::VerificationFailed {
            check: "vertex_enumeration".into(),
            detail: "bounded system produced no vertices".into(),
        });
    }
    Ok(VertexEnumeration {
        vertices,
        defining_subsets: defining,
    })
}

/// The vertex map induced by re-centering polarity at `c`: `v / (1 - <c,v>)`.
pub fn vertex_correspondence(v: &[f64], c: &[f64], tol: &Tolerance) -> Result<Vector> {
    let s = 1.0 - dot(c, v);
    if s <= tol.feas_eps {
        return Err(Error::CenterNotInterior);
    }
    Ok(v.iter().map(|x| x / s).collect())
}

enum PolarExtremes {
    Bounded { farthest: Vector, max_norm: f64 },
    Unbounded { ray: Vector },
}

fn polar_extremes(w: &PointCloud, tol: &Tolerance) -> Result<PolarExtremes> {
    let h = polar_of_cloud(w);
    match check_bounded(&h, tol) {
        Err(Error::Unbounded { ray }) => return Ok(PolarExtremes::Unbounded { ray }),
        Err(e) => return Err(e),
        Ok(()) => {}
    }
    let mut best: Option<(f64, Vector)> = None;
    for_each_feasible_basic_solution(&h, tol, SUBSET_BUDGET, |_, x| {
        let n = norm(&x);
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, x));
        }
    })?;
    match best {
        Some((max_norm, farthest)) => Ok(PolarExtremes::Bounded { farthest, max_norm }),
        None => Err(Error::VerificationFailed {
            check: "polar_extremes".into(),
            detail: "bounded polar produced no vertices".into(),
        }),
    }
}

/// Largest `r` with `r * B^d` contained in `conv(W)`, computed as the
/// reciprocal of the farthest polar vertex norm. Returns 0 when the origin
/// is not interior to the hull.
pub fn inscribed_radius_at_origin(w: &PointCloud, tol: &Tolerance) -> Result<f64> {
    match polar_extremes(w, tol)? {
        PolarExtremes::Bounded { max_norm, .. } => Ok(1.0 / max_norm),
        PolarExtremes::Unbounded { .. } => Ok(0.0),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BallWitness {
    /// Unit direction along which the hull's support is too small.
    pub direction: Vector,
    /// Support of `conv(Q)` along `direction`.
    pub support: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BallCheck {
    pub contained: bool,
    pub inscribed_radius: f64,
    pub witness: Option<BallWitness>,
}

/// Does `conv(Q)` contain the origin-centered ball of the given radius?
/// On failure the witness direction certifies the deficit.
pub fn certify_ball_in_hull(q: &PointCloud, radius: f64, tol: &Tolerance) -> Result<BallCheck> {
    if radius <= 0.0 {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let support_along = |u: &[f64]| -> f64 {
        q.points
            .iter()
            .map(|p| dot(u, p))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    match polar_extremes(q, tol)? {
        PolarExtremes::Bounded { farthest, max_norm } => {
            let r = 1.0 / max_norm;
            if r >= radius - tol.feas_eps {
                Ok(BallCheck {
                    contained: true,
                    inscribed_radius: r,
                    witness: None,
                })
            } else {
                let u: Vector = farthest.iter().map(|x| x / max_norm).collect();
                let support = support_along(&u);
                Ok(BallCheck {
                    contained: false,
                    inscribed_radius: r,
                    witness: Some(BallWitness {
                        direction: u,
                        support,
                    }),
                })
            }
        }
        PolarExtremes::Unbounded { ray } => {
            let support = support_along(&ray);
            Ok(BallCheck {
                contained: false,
                inscribed_radius: 0.0,
                witness: Some(BallWitness {
                    direction: ray,
                    support,
                }),
            })
        }
    }
}

/// Radius transfer of the polarity round trip: `lambda / (1 + lambda)`.
pub fn round_trip_radius(lambda: f64) -> f64 {
    debug_assert!(lambda > 0.0);
    lambda / (1.0 + lambda)
}
