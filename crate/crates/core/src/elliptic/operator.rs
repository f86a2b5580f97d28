//! Matrix-free five-point operators and a Jacobi-preconditioned CG solver.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Harmonic mean of two positive face neighbours.
#[inline]
pub(crate) fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Partial derivatives of [`harmonic`] with respect to `a` and `b`.
#[inline]
pub(crate) fn harmonic_grad(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let s2 = s * s;
    (2.0 * b * b / s2, 2.0 * a * a / s2)
}

/// Length factor (face length / h) of the face between `(i, j)` and
/// `(i + 1, j)`; faces on the contact rows are half faces.
#[inline]
pub(crate) fn x_face_factor(grid: &Grid, j: usize) -> f64 {
    if j == 0 || j == grid.n() - 1 {
        0.5
    } else {
        1.0
    }
}

/// Length factor of the face between `(i, j)` and `(i, j + 1)`.
#[inline]
pub(crate) fn y_face_factor(grid: &Grid, i: usize) -> f64 {
    if i == 0 || i == grid.n() - 1 {
        0.5
    } else {
        1.0
    }
}

/// Symmetric operator `K(κ) + diag(d)` where `K` is the finite-volume
/// stiffness matrix of `-div(κ ∇·)` on the node-centred dual cells.
///
/// `cx[k]` is the conductance of the face between `k` and `k + 1`,
/// `cy[k]` the one between `k` and `k + n` (zero where the face does not
/// exist).
#[derive(Debug, Clone)]
pub(crate) struct FaceOperator {
    pub grid: Grid,
    pub cx: Vec<f64>,
    pub cy: Vec<f64>,
    pub diag_extra: Vec<f64>,
}

impl FaceOperator {
    /// Stiffness of `-div(κ ∇·)` with harmonic-mean face coefficients.
    pub fn stiffness(grid: Grid, kappa: &[f64]) -> Self {
        let n = grid.n();
        let mut cx = vec![0.0; grid.len()];
        let mut cy = vec![0.0; grid.len()];
        for j in 0..n {
            for i in 0..n {
                let k = grid.idx(i, j);
                if i + 1 < n {
                    cx[k] = x_face_factor(&grid, j) * harmonic(kappa[k], kappa[k + 1]);
                }
                if j + 1 < n {
                    cy[k] = y_face_factor(&grid, i) * harmonic(kappa[k], kappa[k + n]);
                }
            }
        }
        FaceOperator {
            grid,
            cx,
            cy,
            diag_extra: vec![0.0; grid.len()],
        }
    }

    /// Unit-coefficient stiffness (the negative Laplacian times cell area).
    pub fn laplace(grid: Grid) -> Self {
        FaceOperator::stiffness(grid, &vec![1.0; grid.len()])
    }

    pub fn scale(mut self, s: f64) -> Self {
        self.cx.iter_mut().for_each(|c| *c *= s);
        self.cy.iter_mut().for_each(|c| *c *= s);
        self.diag_extra.iter_mut().for_each(|c| *c *= s);
        self
    }

    pub fn with_diag(mut self, d: &[f64]) -> Self {
        for (e, v) in self.diag_extra.iter_mut().zip(d) {
            *e += v;
        }
        self
    }

    /// `out = A u` on every node.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.grid.n();
        for k in 0..u.len() {
            out[k] = self.diag_extra[k] * u[k];
        }
        for j in 0..n {
            let row = j * n;
            for i in 0..n - 1 {
                let k = row + i;
                let d = self.cx[k] * (u[k] - u[k + 1]);
                out[k] += d;
                out[k + 1] -= d;
            }
        }
        for k in 0..u.len() - n {
            let d = self.cy[k] * (u[k] - u[k + n]);
            out[k] += d;
            out[k + n] -= d;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let n = self.grid.n();
        let mut d = self.diag_extra.clone();
        for k in 0..d.len() {
            if k % n + 1 < n {
                d[k] += self.cx[k];
                d[k + 1] += self.cx[k];
            }
            if k + n < d.len() {
                d[k] += self.cy[k];
                d[k + n] += self.cy[k];
            }
        }
        d
    }

    /// Solves `A u = rhs` on the free nodes with `u` prescribed on the nodes
    /// where `fixed` is set. On entry `u` holds the prescribed values on the
    /// fixed nodes and the initial guess elsewhere; only free rows of `rhs`
    /// are read.
    pub fn solve(
        &self,
        fixed: &[bool],
        rhs: &[f64],
        u: &mut [f64],
        tol: f64,
        max_iter: usize,
    ) -> Result<CgStats> {
        let len = u.len();
        let diag = self.diagonal();
        let inv_diag: Vec<f64> = diag
            .iter()
            .zip(fixed)
            .map(|(&d, &f)| if f { 0.0 } else { 1.0 / d })
            .collect();

        // Scale for the relative stopping test: the right-hand side seen by
        // the free unknowns when they start from zero.
        let mut lifted = vec![0.0; len];
        {
            let mut ud = vec![0.0; len];
            for k in 0..len {
                if fixed[k] {
                    ud[k] = u[k];
                }
            }
            self.apply(&ud, &mut lifted);
        }
        let mut scale = 0.0f64;
        for k in 0..len {
            if !fixed[k] {
                scale = scale.max((rhs[k] - lifted[k]).abs());
            }
        }

        let mut r = vec![0.0; len];
        self.apply(u, &mut r);
        for k in 0..len {
            r[k] = if fixed[k] { 0.0 } else { rhs[k] - r[k] };
        }
        if scale == 0.0 {
            // Zero data: the solution on the free nodes is zero.
            for k in 0..len {
                if !fixed[k] {
                    u[k] = 0.0;
                }
            }
            return Ok(CgStats {
                iterations: 0,
                residual: 0.0,
            });
        }
        let threshold = tol * scale;
        let mut res = sup(&r);
        if res <= threshold {
            return Ok(CgStats {
                iterations: 0,
                residual: res / scale,
            });
        }
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; len];
        let mut rz: f64 = dot(&r, &z);
        for it in 1..=max_iter {
            self.apply(&p, &mut ap);
            for k in 0..len {
                if fixed[k] {
                    ap[k] = 0.0;
                }
            }
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                return Err(Error::Domain(
                    "operator is not positive definite on the free nodes".into(),
                ));
            }
            let a = rz / pap;
            for k in 0..len {
                u[k] += a * p[k];
                r[k] -= a * ap[k];
            }
            res = sup(&r);
            if res <= threshold {
                // Guard against drift of the recursive residual.
                let mut tr = vec![0.0; len];
                self.apply(u, &mut tr);
                let mut true_res = 0.0f64;
                for k in 0..len {
                    if !fixed[k] {
                        true_res = true_res.max((rhs[k] - tr[k]).abs());
                    }
                }
                if true_res <= threshold {
                    return Ok(CgStats {
                        iterations: it,
                        residual: true_res / scale,
                    });
                }
                for k in 0..len {
                    r[k] = if fixed[k] { 0.0 } else { rhs[k] - tr[k] };
                }
            }
            for k in 0..len {
                z[k] = r[k] * inv_diag[k];
            }
            let rz_new = dot(&r, &z);
            let b = rz_new / rz;
            rz = rz_new;
            for k in 0..len {
                p[k] = z[k] + b * p[k];
            }
        }
        Err(Error::IterationLimit {
            iterations: max_iter,
            residual: res / scale,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CgStats {
    #[allow(dead_code)]
    pub iterations: usize,
    #[allow(dead_code)]
    pub residual: f64,
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
