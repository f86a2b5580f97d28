//! Mixed Dirichlet/Neumann elliptic solves on the unit square.
//!
//! Contacts Γ₀ (`y = 0`) and Γ₁ (`y = 1`) carry Dirichlet data, the sides
//! `x = 0, 1` are insulating. All operators are node-centred finite volumes
//! with harmonic-mean face coefficients; see [`operator`].

pub(crate) mod operator;

use crate::error::{Error, Result};
use crate::forward::params::{builtin_potential, builtin_value, DeviceModel, ModelParams};
use crate::grid::{BoundaryTrace, Grid, ScalarField, Segment};

use operator::FaceOperator;

/// Tolerances and iteration caps shared by every solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Sup-norm of the pointwise Newton residual.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Relative sup-norm residual of each linear solve.
    pub linear_tol: f64,
    pub linear_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            newton_tol: 1e-10,
            newton_max_iter: 50,
            linear_tol: 1e-10,
            linear_max_iter: 20_000,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0 && self.linear_tol > 0.0)
            || self.newton_max_iter == 0
            || self.linear_max_iter == 0
        {
            return Err(Error::Config(
                "solver tolerances and iteration limits must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Dirichlet values on the two contacts.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletData {
    on_gamma0: BoundaryTrace,
    on_gamma1: BoundaryTrace,
}

impl DirichletData {
    pub fn from_traces(
        grid: &Grid,
        on_gamma0: BoundaryTrace,
        on_gamma1: BoundaryTrace,
    ) -> Result<Self> {
        if on_gamma0.segment != Segment::Gamma0 || on_gamma1.segment != Segment::Gamma1 {
            return Err(Error::Dimension(
                "Dirichlet data must live on Γ₀ and Γ₁".into(),
            ));
        }
        if on_gamma0.values.len() != grid.n() || on_gamma1.values.len() != grid.n() {
            return Err(Error::Dimension(format!(
                "contact traces need {} values each",
                grid.n()
            )));
        }
        Ok(DirichletData {
            on_gamma0,
            on_gamma1,
        })
    }

    pub fn constant(grid: &Grid, on_gamma0: f64, on_gamma1: f64) -> Self {
        DirichletData {
            on_gamma0: BoundaryTrace::constant(grid, Segment::Gamma0, on_gamma0),
            on_gamma1: BoundaryTrace::constant(grid, Segment::Gamma1, on_gamma1),
        }
    }

    pub fn on_gamma0(&self) -> &BoundaryTrace {
        &self.on_gamma0
    }

    pub fn on_gamma1(&self) -> &BoundaryTrace {
        &self.on_gamma1
    }

    /// Writes the boundary values into a full nodal vector.
    pub(crate) fn fill(&self, grid: &Grid, u: &mut [f64]) {
        let n = grid.n();
        u[..n].copy_from_slice(&self.on_gamma0.values);
        u[n * (n - 1)..].copy_from_slice(&self.on_gamma1.values);
    }
}

/// `true` on the contact rows.
pub(crate) fn dirichlet_mask(grid: &Grid) -> Vec<bool> {
    (0..grid.len())
        .map(|k| grid.segment_of(k).is_dirichlet())
        .collect()
}

pub(crate) fn check_coefficient(kappa: &[f64]) -> Result<()> {
    match kappa.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        Some(k) => Err(Error::CoefficientBound {
            node: k,
            value: kappa[k],
        }),
        None => Ok(()),
    }
}

/// Solves `div(γ ∇u) = source` with `u = bc` on the contacts and zero flux on
/// the sides.
pub fn solve_diffusion(
    gamma: &ScalarField,
    bc: &DirichletData,
    source: &ScalarField,
    opts: &SolverOptions,
) -> Result<ScalarField> {
    let grid = gamma.grid();
    if source.grid() != grid {
        return Err(Error::Dimension(
            "source and coefficient grids differ".into(),
        ));
    }
    check_coefficient(gamma.values())?;
    let op = FaceOperator::stiffness(grid, gamma.values());
    let mass = grid.mass();
    let rhs: Vec<f64> = source
        .values()
        .iter()
        .zip(&mass)
        .map(|(s, m)| -s * m)
        .collect();
    let mut u = vec![0.0; grid.len()];
    bc.fill(&grid, &mut u);
    op.solve(
        &dirichlet_mask(&grid),
        &rhs,
        &mut u,
        opts.linear_tol,
        opts.linear_max_iter,
    )?;
    Ok(ScalarField::from_vec(grid, u))
}

/// Solves `α (I − Δ) w = rhs` with homogeneous Neumann data on all of ∂Ω.
pub fn solve_neumann_helmholtz(
    rhs: &ScalarField,
    alpha: f64,
    opts: &SolverOptions,
) -> Result<ScalarField> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let grid = rhs.grid();
    let mass = grid.mass();
    let op = FaceOperator::laplace(grid).with_diag(&mass).scale(alpha);
    let b: Vec<f64> = rhs.values().iter().zip(&mass).map(|(r, m)| r * m).collect();
    let mut w = vec![0.0; grid.len()];
    op.solve(
        &vec![false; grid.len()],
        &b,
        &mut w,
        opts.linear_tol,
        opts.linear_max_iter,
    )?;
    Ok(ScalarField::from_vec(grid, w))
}

/// Applies `α (I − Δ)` with the same discretization as
/// [`solve_neumann_helmholtz`], returned in pointwise (divided by cell area)
/// form.
pub fn apply_neumann_helmholtz(w: &ScalarField, alpha: f64) -> ScalarField {
    let grid = w.grid();
    let mass = grid.mass();
    let op = FaceOperator::laplace(grid).with_diag(&mass).scale(alpha);
    let mut out = vec![0.0; grid.len()];
    op.apply(w.values(), &mut out);
    for (o, m) in out.iter_mut().zip(&mass) {
        *o /= m;
    }
    ScalarField::from_vec(grid, out)
}

/// Argument bound for the exponentials of the Poisson nonlinearity.
pub const EXP_CLAMP: f64 = 80.0;

#[inline]
fn clamped_exp(v: f64, clamped: &mut bool) -> f64 {
    if v.abs() > EXP_CLAMP {
        *clamped = true;
    }
    v.clamp(-EXP_CLAMP, EXP_CLAMP).exp()
}

/// The space-charge nonlinearity `g(V)` and its derivative.
#[inline]
pub(crate) fn nonlinearity(v: f64, n_i: f64, model: DeviceModel, clamped: &mut bool) -> (f64, f64) {
    match model {
        DeviceModel::Unipolar => {
            let e = n_i * clamped_exp(v, clamped);
            (e, e)
        }
        DeviceModel::Bipolar => {
            let ep = clamped_exp(v, clamped);
            let em = clamped_exp(-v, clamped);
            (n_i * (ep - em), n_i * (ep + em))
        }
    }
}

/// Result of the equilibrium Newton solve.
#[derive(Debug, Clone)]
pub struct EquilibriumSolution {
    pub potential: ScalarField,
    /// Sup-norm residual before every Newton step and after the last one.
    pub residuals: Vec<f64>,
    /// Set if any exponential argument left `[-80, 80]`.
    pub clamped: bool,
}

/// Equilibrium potential `V⁰`: `λ² ΔV⁰ = g(V⁰) − C` with `V⁰ = V_bi` on the
/// contacts, where `g(v) = n_i(eᵛ − e⁻ᵛ)` (bipolar) or `n_i eᵛ` (unipolar).
pub fn solve_equilibrium_potential(
    c: &ScalarField,
    params: &ModelParams,
    model: DeviceModel,
    opts: &SolverOptions,
) -> Result<ScalarField> {
    solve_equilibrium(c, params, model, opts).map(|s| s.potential)
}

/// Damped Newton for the equilibrium potential, keeping the residual history.
pub fn solve_equilibrium(
    c: &ScalarField,
    params: &ModelParams,
    model: DeviceModel,
    opts: &SolverOptions,
) -> Result<EquilibriumSolution> {
    let bc = builtin_potential(c, params);
    solve_equilibrium_with_bc(c, &bc, params, model, opts)
}

/// As [`solve_equilibrium`] with explicit contact values.
pub fn solve_equilibrium_with_bc(
    c: &ScalarField,
    bc: &DirichletData,
    params: &ModelParams,
    model: DeviceModel,
    opts: &SolverOptions,
) -> Result<EquilibriumSolution> {
    if !c.is_finite() {
        return Err(Error::Domain("doping profile has non-finite values".into()));
    }
    if !(params.lambda > 0.0) {
        return Err(Error::Domain("lambda must be positive".into()));
    }
    let grid = c.grid();
    let len = grid.len();
    let mass = grid.mass();
    let fixed = dirichlet_mask(&grid);
    let l2 = params.lambda * params.lambda;
    let laplace = FaceOperator::laplace(grid).scale(l2);

    // Start from local charge neutrality.
    let mut v: Vec<f64> = c
        .values()
        .iter()
        .map(|&ck| builtin_value(ck, params.n_i))
        .collect();
    bc.fill(&grid, &mut v);

    let mut clamped = false;
    let mut kv = vec![0.0; len];
    // Pointwise residual λ² M⁻¹ K V + g(V) − C on the free nodes.
    let mut residual = |v: &[f64], out: &mut Vec<f64>, clamped: &mut bool| -> f64 {
        laplace.apply(v, &mut kv);
        let mut sup = 0.0f64;
        for k in 0..len {
            out[k] = if fixed[k] {
                0.0
            } else {
                let (g, _) = nonlinearity(v[k], params.n_i, model, clamped);
                kv[k] / mass[k] + g - c.values()[k]
            };
            sup = sup.max(out[k].abs());
        }
        sup
    };

    let mut r = vec![0.0; len];
    let mut trial_r = vec![0.0; len];
    let mut res = residual(&v, &mut r, &mut clamped);
    let mut history = vec![res];
    let mut iter = 0;
    while res > opts.newton_tol {
        if iter == opts.newton_max_iter {
            return Err(Error::NonConvergence {
                iterations: history.len(),
                residual: res,
            });
        }
        iter += 1;
        let gprime: Vec<f64> = (0..len)
            .map(|k| {
                if fixed[k] {
                    0.0
                } else {
                    let (_, d) = nonlinearity(v[k], params.n_i, model, &mut clamped);
                    mass[k] * d
                }
            })
            .collect();
        let jac = laplace.clone().with_diag(&gprime);
        let rhs: Vec<f64> = (0..len).map(|k| -mass[k] * r[k]).collect();
        let mut step = vec![0.0; len];
        // A forcing term far below one keeps the convergence quadratic; it
        // stays above the round-off floor of CG on fine grids.
        let lin_tol = (opts.linear_tol * 0.1).max(1e-14);
        jac.solve(&fixed, &rhs, &mut step, lin_tol, opts.linear_max_iter)?;

        let mut t = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = v.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let trial_res = residual(&trial, &mut trial_r, &mut clamped);
            if trial_res.is_finite() && trial_res <= (1.0 - 1e-4 * t) * res {
                v = trial;
                std::mem::swap(&mut r, &mut trial_r);
                res = trial_res;
                break true;
            }
            t *= 0.5;
            if t < 1e-4 {
                break false;
            }
        };
        if !accepted {
            // A full step may fail only because the residual already sits at
            // the round-off floor of the discrete operator.
            if res <= opts.newton_tol.max(1e-13 * (1.0 + c.max_abs())) {
                break;
            }
            return Err(Error::NonConvergence {
                iterations: history.len(),
                residual: res,
            });
        }
        history.push(res);
    }
    Ok(EquilibriumSolution {
        potential: ScalarField::from_vec(grid, v),
        residuals: history,
        clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn affine_solution_is_exact() {
        let g = Grid::new(11).unwrap();
        let bc = DirichletData::constant(&g, 1.0, 0.0);
        let u = solve_diffusion(
            &ScalarField::constant(g, 1.0),
            &bc,
            &ScalarField::zeros(g),
            &opts(),
        )
        .unwrap();
        for k in 0..g.len() {
            let (_, y) = g.point(k);
            assert!((u.values()[k] - (1.0 - y)).abs() < 1e-9);
        }
        let u3 = solve_diffusion(
            &ScalarField::constant(g, 3.7),
            &bc,
            &ScalarField::zeros(g),
            &opts(),
        )
        .unwrap();
        for (a, b) in u.values().iter().zip(u3.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_nonpositive_coefficient() {
        let g = Grid::new(5).unwrap();
        let mut gamma = ScalarField::constant(g, 1.0);
        gamma.values_mut()[7] = 0.0;
        let err = solve_diffusion(
            &gamma,
            &DirichletData::constant(&g, 0.0, 1.0),
            &ScalarField::zeros(g),
            &opts(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::CoefficientBound { node: 7, .. }));
    }

    #[test]
    fn iteration_limit_carries_residual() {
        let g = Grid::new(21).unwrap();
        let o = SolverOptions {
            linear_max_iter: 2,
            ..opts()
        };
        let err = solve_diffusion(
            &ScalarField::from_fn(g, |x, _| 1.0 + x),
            &DirichletData::constant(&g, 1.0, 0.0),
            &ScalarField::from_fn(g, |x, y| x * y),
            &o,
        )
        .unwrap_err();
        match err {
            Error::IterationLimit {
                iterations,
                residual,
            } => {
                assert_eq!(iterations, 2);
                assert!(residual > 0.0);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn maximum_principle_and_conservation() {
        let g = Grid::new(21).unwrap();
        let gamma = ScalarField::from_fn(g, |x, y| {
            if (x - 0.5).abs() < 0.2 && (y - 0.4).abs() < 0.15 {
                5.0
            } else {
                1.0
            }
        });
        let b0: Vec<f64> = (0..21).map(|i| (i as f64 * 0.3).sin()).collect();
        let b1: Vec<f64> = (0..21).map(|i| 0.5 * (i as f64 * 0.2).cos()).collect();
        let lo = b0.iter().chain(&b1).copied().fold(f64::INFINITY, f64::min);
        let hi = b0
            .iter()
            .chain(&b1)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let bc = DirichletData::from_traces(
            &g,
            BoundaryTrace::new(&g, Segment::Gamma0, b0).unwrap(),
            BoundaryTrace::new(&g, Segment::Gamma1, b1).unwrap(),
        )
        .unwrap();
        let u = solve_diffusion(&gamma, &bc, &ScalarField::zeros(g), &opts()).unwrap();
        assert!(u.values().iter().all(|&v| v >= lo - 1e-9 && v <= hi + 1e-9));

        // Contact fluxes balance: the residual of the full stiffness system.
        let op = FaceOperator::stiffness(g, gamma.values());
        let mut ku = vec![0.0; g.len()];
        op.apply(u.values(), &mut ku);
        let top: f64 = g
            .segment_nodes(Segment::Gamma1)
            .iter()
            .map(|&k| ku[k])
            .sum();
        let bottom: f64 = g
            .segment_nodes(Segment::Gamma0)
            .iter()
            .map(|&k| ku[k])
            .sum();
        let max_flux = ku.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((top + bottom).abs() <= 1e-8 * max_flux);
    }

    #[test]
    fn equilibrium_trivial_cases() {
        let g = Grid::new(11).unwrap();
        let p = ModelParams::default();
        let v =
            solve_equilibrium_potential(&ScalarField::zeros(g), &p, DeviceModel::Bipolar, &opts())
                .unwrap();
        assert!(v.max_abs() < 1e-12);

        let c = ScalarField::constant(g, std::f64::consts::E);
        let bc = DirichletData::constant(&g, 1.0, 1.0);
        let s = solve_equilibrium_with_bc(&c, &bc, &p, DeviceModel::Unipolar, &opts()).unwrap();
        assert!(s.potential.values().iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn newton_converges_quadratically() {
        let g = Grid::new(41).unwrap();
        let p = ModelParams::default();
        let c = ScalarField::from_fn(g, |x, y| {
            if (0.3..=0.7).contains(&x) && (0.3..=0.7).contains(&y) {
                1.0
            } else {
                -1.0
            }
        });
        let s = solve_equilibrium(&c, &p, DeviceModel::Bipolar, &opts()).unwrap();
        assert!(!s.clamped);
        let r = &s.residuals;
        assert!(*r.last().unwrap() <= 1e-10);
        for w in r.windows(2) {
            if w[0] <= 1e-3 && w[1] > 1e-13 {
                assert!(w[1] <= 10.0 * w[0] * w[0], "{r:?}");
            }
        }
        // g' > 0 at the solution, so every Jacobian is diagonally dominant.
        let mut flag = false;
        for &v in s.potential.values() {
            assert!(nonlinearity(v, p.n_i, DeviceModel::Bipolar, &mut flag).1 > 0.0);
        }
    }

    #[test]
    fn unipolar_depletion_stays_finite() {
        let g = Grid::new(21).unwrap();
        let p = ModelParams::default();
        let c = ScalarField::from_fn(g, |_, y| if y > 0.5 { 1.0 } else { -1.0 });
        let s = solve_equilibrium(&c, &p, DeviceModel::Unipolar, &opts()).unwrap();
        assert!(s.potential.is_finite());
        assert!(s.potential.min() < -2.0);
    }

    #[test]
    fn helmholtz_constant_rhs() {
        let g = Grid::new(9).unwrap();
        let w = solve_neumann_helmholtz(&ScalarField::constant(g, 2.0), 0.5, &opts()).unwrap();
        assert!(w.values().iter().all(|v| (v - 4.0).abs() < 1e-9));
    }
}
