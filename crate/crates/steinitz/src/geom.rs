//! Dense small-dimension linear algebra and the shared tolerance record.
//!
//! Everything here targets desk scale (d <= 10, a few dozen points). Partial
//! pivoting is adequate in that regime; conditioning beyond roughly 1e12 is
//! outside the supported envelope and surfaces as `SingularSystem`.

use crate::error::{Error, Result};

/// A point or direction in R^d, dense coordinates.
pub type Vector = Vec<f64>;

/// Centralized numeric tolerances, passed explicitly. No hidden globals.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    /// Feasibility slack for constraint checks.
    pub feas_eps: f64,
    /// Singularity threshold for elimination pivots.
    pub sing_eps: f64,
    /// Stopping threshold for the Newton residual.
    pub grad_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            feas_eps: 1e-9,
            sing_eps: 1e-12,
            grad_eps: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        if !(self.feas_eps > 0.0 && self.sing_eps > 0.0 && self.grad_eps > 0.0) {
            return Err(Error::InvalidInput(
                "tolerances must be strictly positive".into(),
            ));
        }
        if self.feas_eps <= self.sing_eps {
            return Err(Error::InvalidInput(
                "feas_eps must exceed sing_eps".into(),
            ));
        }
        Ok(())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scaled(a: &[f64], s: f64) -> Vector {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn is_finite_vec(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Compensated (Kahan) accumulator. Used wherever a sum is part of a
/// reproducibility contract.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            *m.at_mut(i, i) = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = Matrix::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        Ok(m)
    }

    pub fn from_columns(cols: &[&[f64]]) -> Result<Self> {
        let n = cols.len();
        let mut m = Matrix::zeros(n);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: c.len(),
                });
            }
            for i in 0..n {
                *m.at_mut(i, j) = c[i];
            }
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vector {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], v))
            .collect()
    }

    pub fn mul_mat(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    *out.at_mut(i, j) += a * other.at(k, j);
                }
            }
        }
        out
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Determinant by partial-pivot elimination.
    ///
    /// Returns 0.0 when a pivot falls below the (scaled) singularity
    /// threshold; the sign is exact for determinants clear of it.
    pub fn det(&self, tol: &Tolerance) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let thr = tol.sing_eps * scale.max(1.0);
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col].abs() <= thr {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        det
    }

    /// Solve `self * x = b` by partial-pivot elimination.
    pub fn solve(&self, b: &[f64], tol: &Tolerance) -> Result<Vector> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return Err(Error::SingularSystem);
        }
        let thr = tol.sing_eps * scale.max(1.0);
        let mut a = self.data.clone();
        let mut rhs = b.to_vec();
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col].abs() <= thr {
                return Err(Error::SingularSystem);
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                rhs.swap(col, piv);
            }
            let p = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                rhs[r] -= f * rhs[col];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for j in i + 1..n {
                s -= a[i * n + j] * x[j];
            }
            x[i] = s / a[i * n + i];
        }
        Ok(x)
    }

    /// Cholesky factor L (lower triangular) of a symmetric positive
    /// definite matrix. Failure means the matrix is not numerically PD.
    pub fn cholesky(&self) -> Result<Matrix> {
        let n = self.n;
        let mut l = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.at(i, j);
                for k in 0..j {
                    s -= l.at(i, k) * l.at(j, k);
                }
                if i == j {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::SingularSystem);
                    }
                    *l.at_mut(i, j) = s.sqrt();
                } else {
                    *l.at_mut(i, j) = s / l.at(j, j);
                }
            }
        }
        Ok(l)
    }

    /// Solve `L L^T x = b` given the Cholesky factor `L`.
    pub fn cholesky_solve(l: &Matrix, b: &[f64]) -> Vector {
        let n = l.n;
        debug_assert_eq!(b.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= l.at(i, k) * y[k];
            }
            y[i] = s / l.at(i, i);
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l.at(k, i) * x[k];
            }
            x[i] = s / l.at(i, i);
        }
        x
    }
}

/// Coefficients `t` with `x = sum_i t_i * basis_i`.
pub fn gram_dual_coeffs(basis: &[Vector], x: &[f64], tol: &Tolerance) -> Result<Vector> {
    let cols: Vec<&[f64]> = basis.iter().map(|v| v.as_slice()).collect();
    let m = Matrix::from_columns(&cols)?;
    m.solve(x, tol)
}

/// A nontrivial vector `c` with `sum_i c_i * columns_i = 0`, normalized to
/// unit max-norm, or `None` when the columns are numerically independent.
///
/// The first free column (lowest index) is selected, so the output is
/// deterministic under permutation-free reuse.
pub fn nullspace_vector(columns: &[Vector], dim: usize, tol: &Tolerance) -> Option<Vector> {
    let k = columns.len();
    if k == 0 {
        return None;
    }
    let mut a = vec![0.0; dim * k];
    let mut scale = 0.0_f64;
    for (j, c) in columns.iter().enumerate() {
        debug_assert_eq!(c.len(), dim);
        for i in 0..dim {
            a[i * k + j] = c[i];
            scale = scale.max(c[i].abs());
        }
    }
    let thr = tol.sing_eps * scale.max(1.0);
    // Column-by-column echelon form; pivots recorded as (row, col).
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut free_col: Option<usize> = None;
    let mut row = 0usize;
    for col in 0..k {
        if row >= dim {
            free_col = Some(col);
            break;
        }
        let mut piv = row;
        for r in row + 1..dim {
            if a[r * k + col].abs() > a[piv * k + col].abs() {
                piv = r;
            }
        }
        if a[piv * k + col].abs() <= thr {
            free_col = Some(col);
            break;
        }
        if piv != row {
            for j in 0..k {
                a.swap(row * k + j, piv * k + j);
            }
        }
        let p = a[row * k + col];
        for r in row + 1..dim {
            let f = a[r * k + col] / p;
            if f == 0.0 {
                continue;
            }
            for j in col..k {
                a[r * k + j] -= f * a[row * k + j];
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    let free = free_col?;
    let mut c = vec![0.0; k];
    c[free] = 1.0;
    for &(r, pc) in pivots.iter().rev() {
        let mut s = 0.0;
        for j in pc + 1..k {
            if c[j] != 0.0 {
                s += a[r * k + j] * c[j];
            }
        }
        c[pc] = -s / a[r * k + pc];
    }
    let mx = c.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if mx == 0.0 {
        return None;
    }
    for x in &mut c {
        *x /= mx;
    }
    Some(c)
}
