//! Uniform node lattice on the unit square.
//!
//! Node `(i, j)` sits at `(i h, j h)` and is stored at index `j * n + i`, so
//! consecutive storage runs along `x` and each block of `n` values is one
//! `y`-level. The bottom row `y = 0` is the contact Γ₀, the top row `y = 1` is
//! the contact Γ₁; the vertical sides are insulating (homogeneous Neumann).
//! Corners belong to the contacts.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Boundary label of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Segment {
    /// `y = 0`, including both corners.
    Gamma0,
    /// `y = 1`, including both corners.
    Gamma1,
    /// `x = 0`, `0 < y < 1`.
    NeumannLeft,
    /// `x = 1`, `0 < y < 1`.
    NeumannRight,
    Interior,
}

impl Segment {
    pub fn is_dirichlet(self) -> bool {
        matches!(self, Segment::Gamma0 | Segment::Gamma1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    h: f64,
}

/// Builds the `n × n` grid; `n` must be at least 3.
pub fn build_grid(n: usize) -> Result<Grid> {
    Grid::new(n)
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per side, got {n}"
            )));
        }
        Ok(Grid {
            n,
            h: 1.0 / (n - 1) as f64,
        })
    }

    /// Nodes per side.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    /// `(i, j)` of a storage index.
    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.n, k / self.n)
    }

    /// Coordinate of lattice line `i`; exact division so that the end points
    /// are exactly 0 and 1.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 / (self.n - 1) as f64
    }

    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.ij(k);
        (self.coord(i), self.coord(j))
    }

    pub fn segment_of(&self, k: usize) -> Segment {
        let (i, j) = self.ij(k);
        let last = self.n - 1;
        if j == 0 {
            Segment::Gamma0
        } else if j == last {
            Segment::Gamma1
        } else if i == 0 {
            Segment::NeumannLeft
        } else if i == last {
            Segment::NeumannRight
        } else {
            Segment::Interior
        }
    }

    /// Storage indices of a boundary segment, ordered by increasing `x`
    /// (contacts) or increasing `y` (Neumann sides).
    pub fn segment_nodes(&self, seg: Segment) -> Vec<usize> {
        let n = self.n;
        match seg {
            Segment::Gamma0 => (0..n).map(|i| self.idx(i, 0)).collect(),
            Segment::Gamma1 => (0..n).map(|i| self.idx(i, n - 1)).collect(),
            Segment::NeumannLeft => (1..n - 1).map(|j| self.idx(0, j)).collect(),
            Segment::NeumannRight => (1..n - 1).map(|j| self.idx(n - 1, j)).collect(),
            Segment::Interior => (0..self.len())
                .filter(|&k| self.segment_of(k) == Segment::Interior)
                .collect(),
        }
    }

    pub fn segment_len(&self, seg: Segment) -> usize {
        match seg {
            Segment::Gamma0 | Segment::Gamma1 => self.n,
            Segment::NeumannLeft | Segment::NeumannRight => self.n - 2,
            Segment::Interior => (self.n - 2) * (self.n - 2),
        }
    }

    /// Quadrature weights along a boundary segment.
    ///
    /// Contacts use the trapezoid rule. Neumann sides carry only their
    /// interior nodes, so the half cells next to the corners are lumped onto
    /// the first and last node; the weights still sum to the side length.
    pub fn segment_weights(&self, seg: Segment) -> Vec<f64> {
        let h = self.h;
        let m = self.segment_len(seg);
        match seg {
            Segment::Gamma0 | Segment::Gamma1 => {
                let mut w = vec![h; m];
                w[0] = 0.5 * h;
                w[m - 1] = 0.5 * h;
                w
            }
            Segment::NeumannLeft | Segment::NeumannRight => {
                let mut w = vec![h; m];
                if m == 1 {
                    w[0] = 2.0 * h;
                } else {
                    w[0] = 1.5 * h;
                    w[m - 1] = 1.5 * h;
                }
                w
            }
            Segment::Interior => vec![h * h; m],
        }
    }

    /// One-dimensional trapezoid weight of lattice line `i`.
    #[inline]
    pub fn line_weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n - 1 {
            0.5 * self.h
        } else {
            self.h
        }
    }

    /// Two-dimensional trapezoid weight (dual-cell area) of every node.
    pub fn mass(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let (i, j) = self.ij(k);
                self.line_weight(i) * self.line_weight(j)
            })
            .collect()
    }
}

/// One real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value at node {k}")));
        }
        Ok(ScalarField { grid, values })
    }

    /// Wraps values that are known to be finite and correctly sized.
    pub(crate) fn from_vec(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        ScalarField::from_vec(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: Grid) -> Self {
        ScalarField::constant(grid, 0.0)
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|k| {
                let (x, y) = grid.point(k);
                f(x, y)
            })
            .collect();
        ScalarField::from_vec(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.idx(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::from_vec(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        debug_assert_eq!(self.grid, other.grid);
        ScalarField::from_vec(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// L²(Ω) inner product with the 2D trapezoid rule.
    pub fn dot(&self, other: &ScalarField) -> f64 {
        let g = self.grid;
        let mut s = 0.0;
        for k in 0..g.len() {
            let (i, j) = g.ij(k);
            s += g.line_weight(i) * g.line_weight(j) * self.values[k] * other.values[k];
        }
        s
    }

    pub fn norm_l2(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Restriction to a boundary segment.
    pub fn trace(&self, seg: Segment) -> BoundaryTrace {
        BoundaryTrace {
            segment: seg,
            values: self
                .grid
                .segment_nodes(seg)
                .into_iter()
                .map(|k| self.values[k])
                .collect(),
        }
    }

    /// CSV text: `n` rows of `n` values, row `j` is the `y`-level `j`.
    pub fn to_csv(&self) -> String {
        let n = self.grid.n;
        let mut out = String::with_capacity(self.values.len() * 25);
        for j in 0..n {
            for i in 0..n {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{}", fmt17(self.values[j * n + i])).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_csv().as_bytes())?;
        f.flush()?;
        Ok(())
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|e| {
                        Error::Parse(format!("line {}: bad number {s:?}: {e}", line_no + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if let Some((j, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Parse(format!(
                "row {} has {} columns, expected {n}",
                j + 1,
                r.len()
            )));
        }
        let grid = Grid::new(n)?;
        ScalarField::new(grid, rows.into_iter().flatten().collect())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut text = String::new();
        for line in f.lines() {
            text.push_str(&line?);
            text.push('\n');
        }
        ScalarField::from_csv(&text)
    }
}

/// Values on the nodes of one boundary segment.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub segment: Segment,
    pub values: Vec<f64>,
}

impl BoundaryTrace {
    pub fn new(grid: &Grid, segment: Segment, values: Vec<f64>) -> Result<Self> {
        let m = grid.segment_len(segment);
        if values.len() != m {
            return Err(Error::Dimension(format!(
                "trace on {segment:?} needs {m} values, got {}",
                values.len()
            )));
        }
        Ok(BoundaryTrace { segment, values })
    }

    pub fn constant(grid: &Grid, segment: Segment, c: f64) -> Self {
        BoundaryTrace {
            segment,
            values: vec![c; grid.segment_len(segment)],
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Partial derivatives: central differences inside, second-order one-sided
/// differences on the boundary lines. Exact on quadratics.
pub fn gradient(f: &ScalarField) -> (ScalarField, ScalarField) {
    let g = f.grid;
    let n = g.n;
    let v = &f.values;
    let mut dx = vec![0.0; g.len()];
    let mut dy = vec![0.0; g.len()];
    for j in 0..n {
        for i in 0..n {
            let k = g.idx(i, j);
            dx[k] = diff(|m| v[g.idx(m, j)], i, n, g.h);
            dy[k] = diff(|m| v[g.idx(i, m)], j, n, g.h);
        }
    }
    (ScalarField::from_vec(g, dx), ScalarField::from_vec(g, dy))
}

#[inline]
fn diff(at: impl Fn(usize) -> f64, m: usize, n: usize, h: f64) -> f64 {
    if m == 0 {
        (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
    } else if m == n - 1 {
        (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h)
    } else {
        (at(m + 1) - at(m - 1)) / (2.0 * h)
    }
}

/// Five-point Laplacian matching the elliptic solvers.
///
/// Along `x` the Neumann sides use the mirrored stencil (the half-cell flux
/// balance of the solvers). Along `y`, the contact rows use a second-order
/// one-sided stencil because no equation is imposed there.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let g = f.grid;
    let n = g.n;
    let h2 = g.h * g.h;
    let v = &f.values;
    let mut out = vec![0.0; g.len()];
    for j in 0..n {
        for i in 0..n {
            let k = g.idx(i, j);
            let c = v[k];
            let xx = if i == 0 {
                2.0 * (v[g.idx(1, j)] - c)
            } else if i == n - 1 {
                2.0 * (v[g.idx(n - 2, j)] - c)
            } else {
                v[g.idx(i - 1, j)] - 2.0 * c + v[g.idx(i + 1, j)]
            };
            let yy = if j == 0 || j == n - 1 {
                let s = |m: usize| {
                    if j == 0 {
                        v[g.idx(i, m)]
                    } else {
                        v[g.idx(i, n - 1 - m)]
                    }
                };
                if n >= 4 {
                    2.0 * s(0) - 5.0 * s(1) + 4.0 * s(2) - s(3)
                } else {
                    s(0) - 2.0 * s(1) + s(2)
                }
            } else {
                v[g.idx(i, j - 1)] - 2.0 * c + v[g.idx(i, j + 1)]
            };
            out[k] = (xx + yy) / h2;
        }
    }
    ScalarField::from_vec(g, out)
}

/// Outward normal derivative on a contact (second-order one-sided stencil).
pub fn normal_derivative(f: &ScalarField, seg: Segment) -> Result<BoundaryTrace> {
    let g = f.grid;
    let n = g.n;
    let h = g.h;
    let values = match seg {
        Segment::Gamma1 => (0..n)
            .map(|i| (3.0 * f.at(i, n - 1) - 4.0 * f.at(i, n - 2) + f.at(i, n - 3)) / (2.0 * h))
            .collect(),
        Segment::Gamma0 => (0..n)
            .map(|i| (3.0 * f.at(i, 0) - 4.0 * f.at(i, 1) + f.at(i, 2)) / (2.0 * h))
            .collect(),
        other => return Err(Error::UnsupportedSegment(other)),
    };
    Ok(BoundaryTrace {
        segment: seg,
        values,
    })
}

/// Quadrature of a trace over its segment (trapezoid rule on the contacts).
pub fn boundary_integral(grid: &Grid, t: &BoundaryTrace) -> f64 {
    let n = t.values.len();
    match t.segment {
        Segment::Gamma0 | Segment::Gamma1 => {
            let inner: f64 = t.values[1..n - 1].iter().sum();
            grid.h * (inner + 0.5 * (t.values[0] + t.values[n - 1]))
        }
        _ => grid
            .segment_weights(t.segment)
            .iter()
            .zip(&t.values)
            .map(|(w, v)| w * v)
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_grid() {
        let g = build_grid(3).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.h(), 0.5);
        let top = (0..9)
            .filter(|&k| g.segment_of(k) == Segment::Gamma1)
            .count();
        assert_eq!(top, 3);
        assert!(matches!(build_grid(2), Err(Error::InvalidGrid(_))));
        assert_eq!(build_grid(101).unwrap().h(), 0.01);
    }

    #[test]
    fn every_boundary_node_has_one_label() {
        let g = build_grid(7).unwrap();
        let mut counts = std::collections::HashMap::new();
        for k in 0..g.len() {
            *counts.entry(g.segment_of(k)).or_insert(0) += 1;
        }
        assert_eq!(counts[&Segment::Gamma0], 7);
        assert_eq!(counts[&Segment::Gamma1], 7);
        assert_eq!(counts[&Segment::NeumannLeft], 5);
        assert_eq!(counts[&Segment::NeumannRight], 5);
        assert_eq!(counts[&Segment::Interior], 25);
        assert_eq!(g.segment_of(g.idx(0, 0)), Segment::Gamma0);
        assert_eq!(g.segment_of(g.idx(6, 6)), Segment::Gamma1);
    }

    #[test]
    fn gradient_of_constant_and_affine() {
        let g = build_grid(9).unwrap();
        let (dx, dy) = gradient(&ScalarField::constant(g, 4.2));
        assert!(dx.max_abs() < 1e-12 && dy.max_abs() < 1e-12);
        let (dx, dy) = gradient(&ScalarField::from_fn(g, |x, y| 2.0 * x + 3.0 * y));
        assert!(dx.values().iter().all(|v| (v - 2.0).abs() < 1e-12));
        assert!(dy.values().iter().all(|v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn gradient_second_order_on_cubic() {
        // x³ is not reproduced exactly, so the error is pure truncation.
        let mut errs = Vec::new();
        for n in [21, 41, 81] {
            let g = build_grid(n).unwrap();
            let f = ScalarField::from_fn(g, |x, _| x * x * x);
            let (dx, _) = gradient(&f);
            let e = (0..g.len())
                .map(|k| (dx.values()[k] - 3.0 * g.point(k).0.powi(2)).abs())
                .fold(0.0, f64::max);
            errs.push((e, g.h()));
        }
        for w in errs.windows(2) {
            let p = (w[0].0 / w[1].0).ln() / (w[0].1 / w[1].1).ln();
            assert!(p >= 1.9, "observed order {p}");
        }
        // x² is captured exactly by both the central and one-sided stencils.
        let g = build_grid(41).unwrap();
        let (dx, _) = gradient(&ScalarField::from_fn(g, |x, _| x * x));
        let e = (0..g.len())
            .map(|k| (dx.values()[k] - 2.0 * g.point(k).0).abs())
            .fold(0.0, f64::max);
        assert!(e < 1e-12);
    }

    #[test]
    fn normal_derivative_examples() {
        let g = build_grid(11).unwrap();
        let t = normal_derivative(&ScalarField::from_fn(g, |_, y| y), Segment::Gamma1).unwrap();
        assert!(t.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let t = normal_derivative(&ScalarField::from_fn(g, |_, y| y), Segment::Gamma0).unwrap();
        assert!(t.values.iter().all(|v| (v + 1.0).abs() < 1e-12));
        let t = normal_derivative(&ScalarField::constant(g, 3.0), Segment::Gamma1).unwrap();
        assert!(t.values.iter().all(|v| v.abs() < 1e-12));
        assert!(matches!(
            normal_derivative(&ScalarField::constant(g, 3.0), Segment::NeumannLeft),
            Err(Error::UnsupportedSegment(Segment::NeumannLeft))
        ));
    }

    #[test]
    fn normal_derivative_of_harmonic_function() {
        use std::f64::consts::PI;
        let mut prev: Option<f64> = None;
        for n in [21, 41, 81] {
            let g = build_grid(n).unwrap();
            let f = ScalarField::from_fn(g, |x, y| (PI * x).sin() * (PI * y).sinh() / PI.sinh());
            let t = normal_derivative(&f, Segment::Gamma1).unwrap();
            let e = (0..n)
                .map(|i| {
                    let x = g.coord(i);
                    (t.values[i] - PI * (PI * x).sin() / PI.tanh()).abs()
                })
                .fold(0.0, f64::max);
            // Leading error term is h²/3 · ∂³f/∂y³ ≈ 10.4 h².
            assert!(e < 11.0 * g.h() * g.h(), "n={n} err={e}");
            if let Some(p) = prev {
                assert!((p / e).log2() > 1.9);
            }
            prev = Some(e);
        }
    }

    #[test]
    fn boundary_integrals() {
        let g = build_grid(101).unwrap();
        let one = BoundaryTrace::constant(&g, Segment::Gamma1, 1.0);
        assert_eq!(boundary_integral(&g, &one), 1.0);
        let x = BoundaryTrace::new(&g, Segment::Gamma1, (0..101).map(|i| g.coord(i)).collect())
            .unwrap();
        assert!((boundary_integral(&g, &x) - 0.5).abs() < 1e-15);
        let s = BoundaryTrace::new(
            &g,
            Segment::Gamma1,
            (0..101)
                .map(|i| (std::f64::consts::PI * g.coord(i)).sin())
                .collect(),
        )
        .unwrap();
        assert!((boundary_integral(&g, &s) - 2.0 / std::f64::consts::PI).abs() < 1e-4);
        let side = BoundaryTrace::constant(&g, Segment::NeumannLeft, 1.0);
        assert!((boundary_integral(&g, &side) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mass_integrates_one() {
        for n in [3, 21, 41, 81] {
            let g = build_grid(n).unwrap();
            let one = ScalarField::constant(g, 1.0);
            assert!((one.norm_l2() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_matches_quadratic() {
        let g = build_grid(17).unwrap();
        // ∂x vanishes on both sides so the mirrored stencil is consistent.
        let f = ScalarField::from_fn(g, |x, y| x * x * (1.0 - 2.0 * x / 3.0) + y * y);
        let l = laplacian(&f);
        for k in 0..g.len() {
            let (x, _) = g.point(k);
            let (i, _) = g.ij(k);
            let exact = 2.0 - 4.0 * x + 2.0;
            let tol = if i == 0 || i == g.n() - 1 { 0.5 } else { 1e-9 };
            assert!((l.values()[k] - exact).abs() < tol, "k={k}");
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let g = build_grid(5).unwrap();
        let f = ScalarField::from_fn(g, |x, y| (x * 7.3).sin() / (1.0 + y) * 1e-7);
        let back = ScalarField::from_csv(&f.to_csv()).unwrap();
        assert_eq!(back, f);
        assert_eq!(f.to_csv().lines().count(), 5);
        assert!(ScalarField::from_csv("1,2\n3\n").is_err());
    }
}
