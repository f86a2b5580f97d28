//! Dense SVD-based regularization: pseudo-inverse, truncated SVD,
//! Tikhonov–Phillips and Picard diagnostics.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::fmt17;

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("matrix needs at least one entry".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}×{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "matrix entry ({}, {}) is not finite",
                k / cols,
                k % cols
            )));
        }
        Ok(DenseMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("rows differ in length".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut entries = vec![0.0; n * n];
        for (i, &v) in d.iter().enumerate() {
            entries[i * n + i] = v;
        }
        DenseMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut entries = vec![0.0; self.entries.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                entries[j * self.rows + i] = self.get(i, j);
            }
        }
        DenseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("x", x, self.cols)?;
        Ok(self
            .entries
            .chunks_exact(self.cols)
            .map(|row| dot(row, x))
            .collect())
    }

    /// `Aᵀ y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("y", y, self.rows)?;
        let mut out = vec![0.0; self.cols];
        for (row, &yi) in self.entries.chunks_exact(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
        Ok(out)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn check_len(name: &str, v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Dimension(format!(
            "{name} has length {}, expected {n}",
            v.len()
        )));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Rank-truncated singular system `A = Σ σ_n φ_n ψ_nᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors {
    rows: usize,
    cols: usize,
    /// Nonincreasing, strictly positive.
    pub singular_values: Vec<f64>,
    /// Left vectors `φ_n` (length `rows`).
    pub left: Vec<Vec<f64>>,
    /// Right vectors `ψ_n` (length `cols`).
    pub right: Vec<Vec<f64>>,
}

impl SvdFactors {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `Σ σ_n φ_n ψ_nᵀ` as a dense matrix.
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut entries = vec![0.0; self.rows * self.cols];
        for ((s, u), v) in self.singular_values.iter().zip(&self.left).zip(&self.right) {
            for i in 0..self.rows {
                let su = s * u[i];
                for j in 0..self.cols {
                    entries[i * self.cols + j] += su * v[j];
                }
            }
        }
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }
}

const MAX_SWEEPS: usize = 80;

/// Singular value decomposition by one-sided Jacobi rotations.
///
/// Singular values not exceeding `max(rows, cols) · ε · σ₁` are dropped.
pub fn svd(a: &DenseMatrix) -> Result<SvdFactors> {
    if a.entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    // Orthogonalize the columns of the taller orientation.
    let transposed = a.rows < a.cols;
    let work = if transposed { a.transpose() } else { a.clone() };
    let (m, n) = (work.rows, work.cols);
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..m).map(|i| work.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let eps = f64::EPSILON;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut cols, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: MAX_SWEEPS,
            residual: f64::NAN,
        });
    }
    let mut order: Vec<(f64, usize)> = cols.iter().map(|c| norm(c)).zip(0..).collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let sigma1 = order.first().map_or(0.0, |o| o.0);
    let threshold = m.max(n) as f64 * eps * sigma1;
    let mut singular_values = Vec::new();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for &(s, j) in &order {
        if !(s > threshold) {
            break;
        }
        singular_values.push(s);
        us.push(cols[j].iter().map(|x| x / s).collect::<Vec<_>>());
        vs.push(v[j].clone());
    }
    let (left, right) = if transposed { (vs, us) } else { (us, vs) };
    Ok(SvdFactors {
        rows: a.rows,
        cols: a.cols,
        singular_values,
        left,
        right,
    })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

fn filtered_inverse(f: &SvdFactors, g: &[f64], keep: impl Fn(f64) -> bool) -> Result<Vec<f64>> {
    check_len("g", g, f.rows)?;
    let mut out = vec![0.0; f.cols];
    for ((&s, u), v) in f.singular_values.iter().zip(&f.left).zip(&f.right) {
        if !keep(s) {
            continue;
        }
        let c = dot(g, u) / s;
        for (o, vi) in out.iter_mut().zip(v) {
            *o += c * vi;
        }
    }
    Ok(out)
}

/// Minimum-norm least-squares solution `A† g = Σ σ_n⁻¹ (g|φ_n) ψ_n`.
pub fn pinv_apply(f: &SvdFactors, g: &[f64]) -> Result<Vec<f64>> {
    filtered_inverse(f, g, |_| true)
}

/// Truncated SVD: the pseudo-inverse sum restricted to `σ_n ≥ α`.
pub fn tsvd_apply(f: &SvdFactors, g: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    filtered_inverse(f, g, |s| s >= alpha)
}

/// Tikhonov–Phillips: solves `(AᵀA + α I) f = Aᵀ g` by Cholesky.
pub fn tikhonov_apply(a: &DenseMatrix, g: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let n = a.cols;
    let rhs = a.apply_transpose(g)?;
    let mut m = vec![0.0; n * n];
    for row in a.entries.chunks_exact(n) {
        for i in 0..n {
            for j in 0..=i {
                m[i * n + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..n {
        m[i * n + i] += alpha;
    }
    // Lower Cholesky factor in place.
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= m[j * n + k] * m[j * n + k];
        }
        if !(d > 0.0) {
            return Err(Error::Domain(
                "normal matrix is not positive definite".into(),
            ));
        }
        let d = d.sqrt();
        m[j * n + j] = d;
        for i in j + 1..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= m[i * n + k] * m[j * n + k];
            }
            m[i * n + j] = s / d;
        }
    }
    let mut y = rhs;
    for i in 0..n {
        for k in 0..i {
            y[i] -= m[i * n + k] * y[k];
        }
        y[i] /= m[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= m[k * n + i] * y[k];
        }
        y[i] /= m[i * n + i];
    }
    Ok(y)
}

/// `σ₁ / σ_r` when the numerical rank is `min(rows, cols)`, infinity otherwise.
pub fn condition_number(f: &SvdFactors) -> f64 {
    if f.rank() < f.rows.min(f.cols) || f.rank() == 0 {
        f64::INFINITY
    } else {
        f.singular_values[0] / f.singular_values[f.rank() - 1]
    }
}

/// One line of the Picard diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardTerm {
    pub index: usize,
    pub sigma: f64,
    /// `|(g|φ_n)|`.
    pub coefficient: f64,
    /// `Σ_{k≤n} σ_k⁻² |(g|φ_k)|²`.
    pub partial_sum: f64,
}

pub fn picard_coefficients(f: &SvdFactors, g: &[f64]) -> Result<Vec<PicardTerm>> {
    check_len("g", g, f.rows)?;
    let mut sum = 0.0;
    Ok(f.singular_values
        .iter()
        .zip(&f.left)
        .enumerate()
        .map(|(index, (&sigma, u))| {
            let coefficient = dot(g, u).abs();
            sum += (coefficient / sigma).powi(2);
            PicardTerm {
                index,
                sigma,
                coefficient,
                partial_sum: sum,
            }
        })
        .collect())
}

/// CSV with columns `index,sigma,coefficient,partial_sum`.
pub fn picard_csv(terms: &[PicardTerm]) -> String {
    let mut out = String::from("index,sigma,coefficient,partial_sum\n");
    for t in terms {
        writeln!(
            out,
            "{},{},{},{}",
            t.index,
            fmt17(t.sigma),
            fmt17(t.coefficient),
            fmt17(t.partial_sum)
        )
        .unwrap();
    }
    out
}

pub fn write_picard_csv(terms: &[PicardTerm], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, picard_csv(terms)).map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_and_diagonal() {
        let f = svd(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(f.singular_values, vec![1.0, 1.0, 1.0]);
        assert_eq!(condition_number(&f), 1.0);
        let f = svd(&DenseMatrix::diag(&[3.0, 2.0, 0.0])).unwrap();
        assert_eq!(f.singular_values, vec![3.0, 2.0]);
        assert_eq!(condition_number(&f), f64::INFINITY);
        let x = pinv_apply(&f, &[3.0, 2.0, 5.0]).unwrap();
        assert!(close(&x, &[1.0, 1.0, 0.0], 1e-15));
        let f = svd(&DenseMatrix::diag(&[10.0, 1.0])).unwrap();
        assert_eq!(condition_number(&f), 10.0);
    }

    #[test]
    fn golden_ratio_matrix() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let f = svd(&a).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(close(&f.singular_values, &[phi, 1.0 / phi], 1e-14));
    }

    #[test]
    fn tsvd_componentwise() {
        let f = svd(&DenseMatrix::diag(&[3.0, 2.0, 1.0])).unwrap();
        let g = [3.0, 2.0, 1.0];
        assert!(close(
            &tsvd_apply(&f, &g, 1.5).unwrap(),
            &[1.0, 1.0, 0.0],
            1e-15
        ));
        assert_eq!(tsvd_apply(&f, &g, 4.0).unwrap(), vec![0.0; 3]);
        assert_eq!(
            tsvd_apply(&f, &g, 1.0).unwrap(),
            pinv_apply(&f, &g).unwrap()
        );
        assert!(tsvd_apply(&f, &g, 0.0).is_err());
    }

    #[test]
    fn tikhonov_identity() {
        let g = [1.0, -2.0, 0.5];
        let f = tikhonov_apply(&DenseMatrix::identity(3), &g, 0.25).unwrap();
        assert!(close(&f, &[0.8, -1.6, 0.4], 1e-15));
    }

    #[test]
    fn picard_of_first_left_vector() {
        let f = svd(&DenseMatrix::diag(&[2.0, 0.5])).unwrap();
        let terms = picard_coefficients(&f, &f.left[0].clone()).unwrap();
        assert_eq!(terms[0].coefficient, 1.0);
        assert_eq!(terms[0].partial_sum, 0.25);
        assert_eq!(terms[1].coefficient, 0.0);
        assert_eq!(terms[1].partial_sum, 0.25);
        let csv = picard_csv(&terms);
        assert!(csv.starts_with("index,sigma,coefficient,partial_sum\n0,"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn wide_matrix_factors() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.5]]).unwrap();
        let f = svd(&a).unwrap();
        assert_eq!(f.rank(), 2);
        let r = f.reconstruct();
        let diff: f64 = r
            .entries()
            .iter()
            .zip(a.entries())
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= 1e-13 * a.frobenius_norm());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(DenseMatrix::new(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0]).is_err());
        let f = svd(&DenseMatrix::identity(2)).unwrap();
        assert!(pinv_apply(&f, &[1.0]).is_err());
    }
}
