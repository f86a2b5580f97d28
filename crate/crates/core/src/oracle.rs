//! Reference computations that share no solver code with the production
//! path: their own matrix assembly, direct factorizations and analytic
//! solutions. Used by the verification tests and `dopinv oracle`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elliptic::{
    solve_diffusion, solve_equilibrium_potential, solve_equilibrium_with_bc, DirichletData,
    SolverOptions,
};
use crate::error::{Error, Result};
use crate::forward::{
    builtin_value, default_half_width, doping_from_gamma, make_voltage_profiles, DeviceModel,
    ForwardModel, MeasurementKind, ModelParams, Outputs, VoltageProfile,
};
use crate::grid::{BoundaryTrace, Grid, ScalarField, Segment};
use crate::harness::{make_phantom, Phantom};

/// Face conductances of the node-centred finite-volume stiffness matrix,
/// assembled independently of [`crate::elliptic`].
struct Assembly {
    /// `(k, l, c)`: face between nodes `k < l` with conductance `c`.
    faces: Vec<(usize, usize, f64)>,
}

impl Assembly {
    fn new(grid: &Grid, kappa: &[f64]) -> Self {
        let n = grid.n();
        let mut faces = Vec::with_capacity(2 * n * n);
        // Faces along the boundary of Ω border only half a dual cell.
        let len = |on_edge: bool| if on_edge { 0.5 } else { 1.0 };
        for j in 0..n {
            for i in 0..n {
                let k = j * n + i;
                if i + 1 < n {
                    let (a, b) = (kappa[k], kappa[k + 1]);
                    faces.push((k, k + 1, len(j == 0 || j == n - 1) * 2.0 * a * b / (a + b)));
                }
                if j + 1 < n {
                    let (a, b) = (kappa[k], kappa[k + n]);
                    faces.push((k, k + n, len(i == 0 || i == n - 1) * 2.0 * a * b / (a + b)));
                }
            }
        }
        Assembly { faces }
    }

    /// `K u` with `K` the assembled stiffness.
    fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for &(k, l, c) in &self.faces {
            let d = c * (u[k] - u[l]);
            out[k] += d;
            out[l] -= d;
        }
        out
    }
}

fn is_contact(n: usize, k: usize) -> bool {
    let j = k / n;
    j == 0 || j == n - 1
}

fn trapezoid_mass(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    let w = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { h };
    (0..n * n).map(|k| w(k % n) * w(k / n)).collect()
}

/// Symmetric positive definite band matrix, lower half stored row-wise.
struct BandCholesky {
    m: usize,
    p: usize,
    /// `l[r * (p + 1) + (p - d)]` holds entry `(r, r - d)`.
    l: Vec<f64>,
}

impl BandCholesky {
    fn zeros(m: usize, p: usize) -> Self {
        BandCholesky {
            m,
            p,
            l: vec![0.0; m * (p + 1)],
        }
    }

    fn add(&mut self, r: usize, c: usize, v: f64) {
        let (r, c) = if r >= c { (r, c) } else { (c, r) };
        debug_assert!(r - c <= self.p);
        self.l[r * (self.p + 1) + self.p - (r - c)] += v;
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        if r < c || r - c > self.p {
            0.0
        } else {
            self.l[r * (self.p + 1) + self.p - (r - c)]
        }
    }

    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.l[r * (self.p + 1) + self.p - (r - c)] = v;
    }

    fn factor(mut self) -> Result<Self> {
        let p = self.p;
        for r in 0..self.m {
            let lo = r.saturating_sub(p);
            for c in lo..=r {
                let mut s = self.at(r, c);
                for q in lo.max(c.saturating_sub(p))..c {
                    s -= self.at(r, q) * self.at(c, q);
                }
                if c == r {
                    if !(s > 0.0) {
                        return Err(Error::Domain(format!(
                            "band matrix is not positive definite at row {r}"
                        )));
                    }
                    self.set(r, r, s.sqrt());
                } else {
                    let d = self.at(c, c);
                    self.set(r, c, s / d);
                }
            }
        }
        Ok(self)
    }

    fn solve(&self, b: &mut [f64]) {
        let p = self.p;
        for r in 0..self.m {
            let mut s = b[r];
            for (c, bc) in b.iter().enumerate().take(r).skip(r.saturating_sub(p)) {
                s -= self.at(r, c) * bc;
            }
            b[r] = s / self.at(r, r);
        }
        for r in (0..self.m).rev() {
            let mut s = b[r];
            for (q, bq) in b.iter().enumerate().take(r + p + 1).skip(r + 1) {
                s -= self.at(q, r) * bq;
            }
            b[r] = s / self.at(r, r);
        }
    }
}

/// Result of the fixed-point equilibrium solve.
#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub potential: ScalarField,
    pub iterations: usize,
    /// Sup-norm of the last update.
    pub last_update: f64,
}

fn space_charge(v: f64, n_i: f64, model: DeviceModel) -> (f64, f64) {
    match model {
        DeviceModel::Unipolar => (n_i * v.exp(), n_i * v.exp()),
        DeviceModel::Bipolar => (2.0 * n_i * v.sinh(), 2.0 * n_i * v.cosh()),
    }
}

/// Equilibrium potential by the shifted fixed point
/// `(λ²K + sM) V⁺ = M (C − g(V) + sV)`, relaxed with `damping ∈ (0, 1]`.
///
/// The shift `s` bounds `g′` over the contact and charge-neutral values, so
/// the map contracts whenever the iterates stay in that range. The matrix
/// is factored once by band Cholesky.
pub fn picard_equilibrium(
    c: &ScalarField,
    params: &ModelParams,
    model: DeviceModel,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PicardSolution> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::Domain(format!(
            "damping must lie in (0, 1], got {damping}"
        )));
    }
    let grid = c.grid();
    let n = grid.n();
    let len = grid.len();
    let mass = trapezoid_mass(n);
    let l2 = params.lambda * params.lambda;
    let laplace = Assembly::new(&grid, &vec![1.0; len]);

    let neutral: Vec<f64> = c
        .values()
        .iter()
        .map(|&ck| builtin_value(ck, params.n_i))
        .collect();
    let shift = neutral
        .iter()
        .map(|&v| space_charge(v, params.n_i, model).1)
        .fold(0.0, f64::max);

    // Free nodes are rows 1..n-1, numbered contiguously from row 1.
    let m = len - 2 * n;
    let free = |k: usize| k - n;
    let mut a = BandCholesky::zeros(m, n);
    for (k, mk) in mass.iter().enumerate().take(len - n).skip(n) {
        a.add(free(k), free(k), shift * mk);
    }
    for &(k, l, cond) in &laplace.faces {
        let (fk, fl) = (!is_contact(n, k), !is_contact(n, l));
        if fk {
            a.add(free(k), free(k), l2 * cond);
        }
        if fl {
            a.add(free(l), free(l), l2 * cond);
        }
        if fk && fl {
            a.add(free(k), free(l), -l2 * cond);
        }
    }
    let a = a.factor()?;

    let mut v = neutral;
    let mut iterations = 0;
    let mut last_update = f64::INFINITY;
    while last_update > tol {
        if iterations == max_iter {
            return Err(Error::NonConvergence {
                iterations,
                residual: last_update,
            });
        }
        iterations += 1;
        let mut rhs = vec![0.0; m];
        for k in n..len - n {
            let g = space_charge(v[k], params.n_i, model).0;
            rhs[free(k)] = mass[k] * (c.values()[k] - g + shift * v[k]);
        }
        for &(k, l, cond) in &laplace.faces {
            match (is_contact(n, k), is_contact(n, l)) {
                (false, true) => rhs[free(k)] += l2 * cond * v[l],
                (true, false) => rhs[free(l)] += l2 * cond * v[k],
                _ => {}
            }
        }
        a.solve(&mut rhs);
        last_update = 0.0;
        for k in n..len - n {
            let next = (1.0 - damping) * v[k] + damping * rhs[free(k)];
            last_update = last_update.max((next - v[k]).abs());
            v[k] = next;
        }
        if !last_update.is_finite() {
            return Err(Error::Aborted {
                step: iterations,
                reason: "fixed-point iterate is not finite".into(),
            });
        }
    }
    Ok(PicardSolution {
        potential: ScalarField::new(grid, v)?,
        iterations,
        last_update,
    })
}

/// Dense Gaussian elimination with partial pivoting; `a` is row-major `m × m`.
fn dense_solve(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&r, &s| a[r * m + col].abs().total_cmp(&a[s * m + col].abs()))
            .unwrap_or(col);
        if a[piv * m + col] == 0.0 {
            return Err(Error::Domain("dense system is singular".into()));
        }
        if piv != col {
            for q in 0..m {
                a.swap(piv * m + q, col * m + q);
            }
            b.swap(piv, col);
        }
        let d = a[col * m + col];
        for r in col + 1..m {
            let f = a[r * m + col] / d;
            if f != 0.0 {
                for q in col..m {
                    a[r * m + q] -= f * a[col * m + q];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for r in (0..m).rev() {
        let mut s = b[r];
        for q in r + 1..m {
            s -= a[r * m + q] * b[q];
        }
        b[r] = s / a[r * m + r];
    }
    Ok(b)
}

/// Γ₁ flux of `div(κ∇u) = 0`, `u = U` on Γ₀, `u = 0` on Γ₁, obtained from a
/// fully assembled dense system: pointwise trace `(K u)_b / w_b`, or its
/// total `Σ_b (K u)_b` when `averaged`.
fn dense_flux(grid: &Grid, kappa: &[f64], bottom: &[f64], averaged: bool) -> Result<Vec<f64>> {
    let n = grid.n();
    let len = grid.len();
    let asm = Assembly::new(grid, kappa);
    let mut u = vec![0.0; len];
    u[..n].copy_from_slice(bottom);
    let m = len - 2 * n;
    let mut a = vec![0.0; m * m];
    let mut b = vec![0.0; m];
    for &(k, l, c) in &asm.faces {
        let (fk, fl) = (!is_contact(n, k), !is_contact(n, l));
        if fk {
            a[(k - n) * m + (k - n)] += c;
        }
        if fl {
            a[(l - n) * m + (l - n)] += c;
        }
        match (fk, fl) {
            (true, true) => {
                a[(k - n) * m + (l - n)] -= c;
                a[(l - n) * m + (k - n)] -= c;
            }
            (true, false) => b[k - n] += c * u[l],
            (false, true) => b[l - n] += c * u[k],
            _ => {}
        }
    }
    let x = dense_solve(a, b)?;
    u[n..len - n].copy_from_slice(&x);
    let ku = asm.apply(&u);
    let top = &ku[len - n..];
    if averaged {
        Ok(vec![top.iter().sum()])
    } else {
        let h = grid.h();
        Ok(top
            .iter()
            .enumerate()
            .map(|(i, f)| f / if i == 0 || i == n - 1 { 0.5 * h } else { h })
            .collect())
    }
}

/// Measured output of one profile by dense direct elimination. The bipolar
/// output is assembled as `μ_n Φ_γ(−U) − μ_p Φ_{1/γ}(U)` from two separate
/// unipolar solves.
pub fn dense_measure(
    gamma: &ScalarField,
    profile: &VoltageProfile,
    kind: MeasurementKind,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    let grid = gamma.grid();
    let u = &profile.values().values;
    let averaged = !kind.is_pointwise();
    match kind {
        MeasurementKind::PointwiseUnipolar | MeasurementKind::AveragedUnipolar => {
            dense_flux(&grid, gamma.values(), u, averaged)
        }
        MeasurementKind::PointwiseBipolar => {
            let neg: Vec<f64> = u.iter().map(|v| -v).collect();
            let inv: Vec<f64> = gamma.values().iter().map(|g| 1.0 / g).collect();
            let electrons = dense_flux(&grid, gamma.values(), &neg, false)?;
            let holes = dense_flux(&grid, &inv, u, false)?;
            Ok(electrons
                .iter()
                .zip(&holes)
                .map(|(e, h)| params.mu_n * e - params.mu_p * h)
                .collect())
        }
    }
}

/// Largest relative gap `|⟨F′h, r⟩ − ⟨h, F′*r⟩| / (‖h‖ ‖r‖)`.
pub fn adjoint_gap(
    model: &ForwardModel,
    gamma: &ScalarField,
    h: &ScalarField,
    r: &Outputs,
) -> Result<f64> {
    let lin = model.linearize(gamma)?;
    let lhs = lin.derivative(h)?.dot(r);
    let rhs = h.dot(&lin.adjoint(r)?);
    Ok((lhs - rhs).abs() / (h.norm_l2() * r.norm()))
}

/// Relative error of the central difference `(F(γ + t h) − F(γ − t h)) / 2t`
/// against the linearized derivative.
pub fn derivative_gap(
    model: &ForwardModel,
    gamma: &ScalarField,
    h: &ScalarField,
    t: f64,
) -> Result<f64> {
    let plus = model.apply(&gamma.zip_map(h, |g, d| g + t * d))?;
    let minus = model.apply(&gamma.zip_map(h, |g, d| g - t * d))?;
    let fd = plus.sub(&minus)?.scaled(0.5 / t);
    let exact = model.derivative(gamma, h)?;
    Ok(fd.sub(&exact)?.norm() / exact.norm())
}

/// Observed orders `log₂(e_{k} / e_{k+1})` between consecutive errors of a
/// grid sequence that halves `h`.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Sup-norm nodal error of `solve_diffusion` for `γ = 1 + x` against
/// `u* = cos(πx) eʸ`, which satisfies the insulating side conditions.
pub fn manufactured_diffusion_error(n: usize, opts: &SolverOptions) -> Result<f64> {
    let grid = Grid::new(n)?;
    let gamma = ScalarField::from_fn(grid, |x, _| 1.0 + x);
    let exact = |x: f64, y: f64| (PI * x).cos() * y.exp();
    let source = ScalarField::from_fn(grid, |x, y| {
        let (s, c, e) = ((PI * x).sin(), (PI * x).cos(), y.exp());
        (-PI * s - (1.0 + x) * PI * PI * c + (1.0 + x) * c) * e
    });
    let bc = DirichletData::from_traces(
        &grid,
        contact_trace(&grid, Segment::Gamma0, |x| exact(x, 0.0)),
        contact_trace(&grid, Segment::Gamma1, |x| exact(x, 1.0)),
    )?;
    let u = solve_diffusion(&gamma, &bc, &source, opts)?;
    let want = ScalarField::from_fn(grid, exact);
    Ok(u.zip_map(&want, |a, b| a - b).max_abs())
}

fn contact_trace(grid: &Grid, seg: Segment, f: impl Fn(f64) -> f64) -> BoundaryTrace {
    BoundaryTrace {
        segment: seg,
        values: (0..grid.n()).map(|i| f(grid.coord(i))).collect(),
    }
}

/// Smooth equilibrium potential used by the γ ↔ C round trip. It is
/// harmonic on the contacts and has zero normal derivative on the sides.
fn smooth_potential(x: f64, y: f64) -> (f64, f64) {
    let v = 0.3 + 0.4 * y + 0.5 * (PI * x).cos() * (PI * y).sin();
    let lap = -PI * PI * (PI * x).cos() * (PI * y).sin();
    (v, lap)
}

/// Sup-norm errors `(γ, C)` of the two conversions against an analytic pair
/// `(γ*, C*)`: `γ` is the equilibrium γ of the sampled `C*`, `C` is
/// [`doping_from_gamma`] of the sampled `γ*`.
pub fn roundtrip_errors(
    n: usize,
    params: &ModelParams,
    model: DeviceModel,
    opts: &SolverOptions,
) -> Result<(f64, f64)> {
    let grid = Grid::new(n)?;
    let l2 = params.lambda * params.lambda;
    let ni = params.n_i;
    let gamma_of = |v: f64| match model {
        DeviceModel::Unipolar => params.mu_n * v.exp(),
        DeviceModel::Bipolar => v.exp(),
    };
    let doping_of = |v: f64, lap: f64| match model {
        DeviceModel::Unipolar => ni * v.exp() - l2 * lap,
        DeviceModel::Bipolar => 2.0 * ni * v.sinh() - l2 * lap,
    };
    let c_star = ScalarField::from_fn(grid, |x, y| {
        let (v, lap) = smooth_potential(x, y);
        doping_of(v, lap)
    });
    let gamma_star = ScalarField::from_fn(grid, |x, y| gamma_of(smooth_potential(x, y).0));
    let bc = DirichletData::from_traces(
        &grid,
        contact_trace(&grid, Segment::Gamma0, |x| smooth_potential(x, 0.0).0),
        contact_trace(&grid, Segment::Gamma1, |x| smooth_potential(x, 1.0).0),
    )?;
    let v = solve_equilibrium_with_bc(&c_star, &bc, params, model, opts)?.potential;
    let gamma = v.map(gamma_of);
    let e_gamma = gamma.zip_map(&gamma_star, |a, b| a - b).max_abs();
    let c = doping_from_gamma(&gamma_star, params, model)?;
    let e_c = c.zip_map(&c_star, |a, b| a - b).max_abs();
    Ok((e_gamma, e_c))
}

/// Smooth, strictly positive coefficient used by the derivative checks.
pub fn test_coefficient(grid: Grid) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| {
        1.5 + 0.4 * (2.0 * PI * x).sin() * (PI * y).cos() + 0.3 * x * y
    })
}

/// Nodal values drawn uniformly from `[-1, 1]`.
pub fn random_field(grid: Grid, rng: &mut ChaCha8Rng) -> ScalarField {
    let values = (0..grid.len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    ScalarField::new(grid, values).expect("one value per node")
}

/// Output-space element with entries drawn uniformly from `[-1, 1]`.
pub fn random_outputs(model: &ForwardModel, rng: &mut ChaCha8Rng) -> Outputs {
    let mut r = model.zero_outputs();
    for v in r.components_mut().iter_mut().flatten() {
        *v = rng.gen_range(-1.0..=1.0);
    }
    r
}

/// Forward model of the derivative checks: one profile for the pointwise
/// kinds, three contact windows for the total-current kind.
pub fn check_model(n: usize, kind: MeasurementKind, opts: SolverOptions) -> Result<ForwardModel> {
    let grid = Grid::new(n)?;
    let count = if kind.is_pointwise() { 1 } else { 3 };
    let profiles = make_voltage_profiles(count, default_half_width(count), &grid)?;
    ForwardModel::new(grid, kind, profiles, ModelParams::default(), opts)
}

/// Largest [`adjoint_gap`] over `pairs` random `(h, r)`.
pub fn adjoint_check(n: usize, kind: MeasurementKind, pairs: usize, seed: u64) -> Result<f64> {
    let model = check_model(n, kind, tight_options())?;
    let gamma = test_coefficient(model.grid());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let h = random_field(model.grid(), &mut rng);
        let r = random_outputs(&model, &mut rng);
        worst = worst.max(adjoint_gap(&model, &gamma, &h, &r)?);
    }
    Ok(worst)
}

/// Largest [`derivative_gap`] over `directions` random directions.
pub fn derivative_check(
    n: usize,
    kind: MeasurementKind,
    directions: usize,
    t: f64,
    seed: u64,
) -> Result<f64> {
    let model = check_model(n, kind, tight_options())?;
    let gamma = test_coefficient(model.grid());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..directions {
        let h = random_field(model.grid(), &mut rng);
        worst = worst.max(derivative_gap(&model, &gamma, &h, t)?);
    }
    Ok(worst)
}

/// Linear solves converged to near round-off, for comparisons with direct
/// factorizations.
pub fn tight_options() -> SolverOptions {
    SolverOptions {
        linear_tol: 1e-12,
        ..SolverOptions::default()
    }
}

/// Sup-norm gap between Newton and the fixed-point equilibrium potential
/// for the bipolar rectangle phantom.
pub fn equilibrium_check(n: usize, params: &ModelParams) -> Result<f64> {
    let grid = Grid::new(n)?;
    let c = make_phantom(&Phantom::rect_inclusion(0.2, 0.5, 0.4, 0.8), grid)?;
    let opts = SolverOptions {
        newton_tol: 1e-12,
        ..SolverOptions::default()
    };
    let newton = solve_equilibrium_potential(&c, params, DeviceModel::Bipolar, &opts)?;
    let picard = picard_equilibrium(&c, params, DeviceModel::Bipolar, 1.0, 1e-14, 10_000)?;
    Ok(newton.zip_map(&picard.potential, |a, b| a - b).max_abs())
}

/// Largest gap between the production measurement and [`dense_measure`]
/// for `γ = 1 + χ` of a square inclusion, over the three kinds.
pub fn dense_measure_check(n: usize) -> Result<f64> {
    let grid = Grid::new(n)?;
    let gamma = ScalarField::from_fn(grid, |x, y| {
        if (0.3..=0.7).contains(&x) && (0.3..=0.7).contains(&y) {
            2.0
        } else {
            1.0
        }
    });
    let params = ModelParams::default();
    let profile = VoltageProfile::indicator(&grid, 0.5, default_half_width(1));
    let mut worst = 0.0f64;
    for kind in MeasurementKind::ALL {
        let model = ForwardModel::new(grid, kind, vec![profile.clone()], params, tight_options())?;
        let got = model.apply(&gamma)?;
        let want = dense_measure(&gamma, &profile, kind, &params)?;
        for (a, b) in got.component(0).iter().zip(&want) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_cholesky_matches_dense_solve() {
        let m = 7;
        let mut band = BandCholesky::zeros(m, 2);
        let mut dense = vec![0.0; m * m];
        for r in 0..m {
            band.add(r, r, 4.0 + r as f64);
            dense[r * m + r] = 4.0 + r as f64;
            for d in 1..=2 {
                if r + d < m {
                    let v = -1.0 / d as f64;
                    band.add(r + d, r, v);
                    dense[r * m + r + d] = v;
                    dense[(r + d) * m + r] = v;
                }
            }
        }
        let b: Vec<f64> = (0..m).map(|r| (r as f64).sin()).collect();
        let want = dense_solve(dense, b.clone()).unwrap();
        let mut got = b;
        band.factor().unwrap().solve(&mut got);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-13);
        }
    }

    #[test]
    fn picard_zero_doping_bipolar_is_zero() {
        let g = Grid::new(9).unwrap();
        let c = ScalarField::zeros(g);
        let s = picard_equilibrium(
            &c,
            &ModelParams::default(),
            DeviceModel::Bipolar,
            1.0,
            1e-14,
            100,
        )
        .unwrap();
        assert!(s.potential.max_abs() < 1e-14);
    }

    #[test]
    fn homogeneous_slab_flux_is_gamma() {
        let g = Grid::new(7).unwrap();
        let gamma = ScalarField::constant(g, 2.5);
        let p = VoltageProfile::full(&g);
        let t = dense_measure(
            &gamma,
            &p,
            MeasurementKind::PointwiseUnipolar,
            &ModelParams::default(),
        )
        .unwrap();
        // u = 1 − y, so the outward flux γ ∂u/∂y is −γ at every node.
        for v in t {
            assert!((v + 2.5).abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn orders_of_exact_halving() {
        let o = observed_orders(&[4.0, 1.0, 0.25]);
        assert_eq!(o, vec![2.0, 2.0]);
    }
}
