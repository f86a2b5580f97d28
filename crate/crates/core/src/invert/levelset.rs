//! Level-set reconstruction of a two-valued coefficient.
//!
//! The coefficient is `P_ε(φ) = γ_int + (γ_ext − γ_int) H_ε(φ)`, so the
//! inclusion is the region `φ < 0`. Each step solves the Neumann problem
//! `α (I − Δ) w = P_ε′(φ) (−F′(χ)* r + ρ div(∇χ / |∇χ|_β))` and moves
//! `φ ← φ + w / α`, with the step optionally capped at a multiple of `ε`.

use std::f64::consts::PI;
use std::time::Instant;

use super::log::{IterationLog, StepRecord, StopReason};
use super::{discrepancy_stop, RunFailure, StoppingRule};
use crate::elliptic::{solve_neumann_helmholtz, SolverOptions};
use crate::error::{Error, Result};
use crate::forward::{ForwardModel, MeasurementSet};
use crate::grid::{gradient, Grid, ScalarField};

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetState {
    pub phi: ScalarField,
    pub gamma_int: f64,
    pub gamma_ext: f64,
    /// Half width of the transition band of `H_ε`.
    pub epsilon: f64,
    /// Floor of the curvature denominator.
    pub beta: f64,
    pub alpha: f64,
    /// Weight `ρ` of the curvature term in the velocity equation. Tying it
    /// to `α` lets mean-curvature shrinkage swamp the data term at any `α`
    /// that keeps the step stable, so it is a separate knob.
    pub curvature_weight: f64,
}

pub const DEFAULT_CURVATURE_WEIGHT: f64 = 1e-4;

impl LevelSetState {
    /// State with the default curvature weight.
    pub fn new(
        phi: ScalarField,
        gamma_int: f64,
        gamma_ext: f64,
        epsilon: f64,
        beta: f64,
        alpha: f64,
    ) -> Result<Self> {
        let s = LevelSetState {
            phi,
            gamma_int,
            gamma_ext,
            epsilon,
            beta,
            alpha,
            curvature_weight: DEFAULT_CURVATURE_WEIGHT,
        };
        s.validate()?;
        Ok(s)
    }

    /// Default smoothing `ε = 2h`, `β = 10⁻³`, `α = 10⁻²`.
    pub fn with_defaults(phi: ScalarField, gamma_int: f64, gamma_ext: f64) -> Result<Self> {
        let eps = 2.0 * phi.grid().h();
        Self::new(phi, gamma_int, gamma_ext, eps, 1e-3, 1e-2)
    }

    pub fn with_curvature_weight(mut self, rho: f64) -> Result<Self> {
        self.curvature_weight = rho;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be positive, got {v}")))
            }
        };
        positive("gamma_int", self.gamma_int)?;
        positive("gamma_ext", self.gamma_ext)?;
        positive("epsilon", self.epsilon)?;
        positive("beta", self.beta)?;
        positive("alpha", self.alpha)?;
        if !(self.curvature_weight >= 0.0 && self.curvature_weight.is_finite()) {
            return Err(Error::Domain(format!(
                "curvature weight must be nonnegative, got {}",
                self.curvature_weight
            )));
        }
        if self.gamma_int == self.gamma_ext {
            return Err(Error::Domain("gamma_int and gamma_ext must differ".into()));
        }
        if !self.phi.is_finite() {
            return Err(Error::Domain("level-set function must be finite".into()));
        }
        Ok(())
    }
}

/// `φ = |x − c| − r`: negative inside the circle.
pub fn signed_distance_circle(grid: Grid, center: (f64, f64), radius: f64) -> ScalarField {
    ScalarField::from_fn(grid, |x, y| (x - center.0).hypot(y - center.1) - radius)
}

/// C¹ smoothed Heaviside with transition band `|t| < ε`.
pub fn smoothed_heaviside(t: f64, eps: f64) -> f64 {
    if t <= -eps {
        0.0
    } else if t >= eps {
        1.0
    } else {
        0.5 * (1.0 + t / eps + (PI * t / eps).sin() / PI)
    }
}

pub fn smoothed_heaviside_derivative(t: f64, eps: f64) -> f64 {
    if t.abs() >= eps {
        0.0
    } else {
        (1.0 + (PI * t / eps).cos()) / (2.0 * eps)
    }
}

/// `P_ε(φ)`, confined to the interval spanned by the two levels.
pub fn project_levelset(state: &LevelSetState) -> ScalarField {
    let (lo, hi) = ordered(state.gamma_int, state.gamma_ext);
    let jump = state.gamma_ext - state.gamma_int;
    state
        .phi
        .map(|p| (state.gamma_int + jump * smoothed_heaviside(p, state.epsilon)).clamp(lo, hi))
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `div(∇f / √(|∇f|² + β²))` computed with [`gradient`].
pub fn curvature_term(f: &ScalarField, beta: f64) -> ScalarField {
    let (fx, fy) = gradient(f);
    let norm = fx.zip_map(&fy, |a, b| (a * a + b * b + beta * beta).sqrt());
    let nx = fx.zip_map(&norm, |a, m| a / m);
    let ny = fy.zip_map(&norm, |b, m| b / m);
    let (nxx, _) = gradient(&nx);
    let (_, nyy) = gradient(&ny);
    nxx.zip_map(&nyy, |a, b| a + b)
}

/// The update field `w` of one level-set step for a given sensitivity
/// `F′(χ)* r`, `χ = P_ε(φ)`.
pub fn levelset_velocity(
    state: &LevelSetState,
    sensitivity: &ScalarField,
    opts: &SolverOptions,
) -> Result<ScalarField> {
    if sensitivity.grid() != state.phi.grid() {
        return Err(Error::Dimension("sensitivity lives on another grid".into()));
    }
    let jump = state.gamma_ext - state.gamma_int;
    let dp = state
        .phi
        .map(|p| jump * smoothed_heaviside_derivative(p, state.epsilon));
    let curv = if state.curvature_weight > 0.0 {
        curvature_term(&project_levelset(state), state.beta)
    } else {
        ScalarField::zeros(state.phi.grid())
    };
    let mut rhs = sensitivity.clone();
    for ((r, &d), &c) in rhs
        .values_mut()
        .iter_mut()
        .zip(dp.values())
        .zip(curv.values())
    {
        *r = if d == 0.0 {
            0.0
        } else {
            d * (-*r + state.curvature_weight * c)
        };
    }
    solve_neumann_helmholtz(&rhs, state.alpha, opts)
}

/// Area of the symmetric difference between the reconstructed inclusion
/// `{φ < 0}` and the inclusion of `truth` (nodes closer to `γ_int` than to
/// `γ_ext`), integrated with the trapezoid weights.
pub fn sym_diff_area(state: &LevelSetState, truth: &ScalarField) -> Result<f64> {
    let grid = state.phi.grid();
    if truth.grid() != grid {
        return Err(Error::Dimension(
            "ground truth lives on another grid".into(),
        ));
    }
    let mass = grid.mass();
    Ok(state
        .phi
        .values()
        .iter()
        .zip(truth.values())
        .zip(&mass)
        .filter(|((&p, &t), _)| {
            let inside_true = (t - state.gamma_int).abs() < (t - state.gamma_ext).abs();
            (p < 0.0) != inside_true
        })
        .map(|(_, m)| m)
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetOptions {
    /// Rescale `φ` to unit sup-norm after every this many steps.
    pub rescale_every: Option<usize>,
    /// Cap on `max |w / α|` in units of `ε`; larger updates are scaled down
    /// uniformly. `None` applies `φ + w / α` unchanged.
    pub max_step: Option<f64>,
}

impl Default for LevelSetOptions {
    fn default() -> Self {
        LevelSetOptions {
            rescale_every: Some(50),
            max_step: Some(0.5),
        }
    }
}

/// Runs the level-set iteration until the discrepancy principle holds or
/// `rule.max_iter` updates have been made.
pub fn levelset_run(
    state0: &LevelSetState,
    data: &MeasurementSet,
    model: &ForwardModel,
    rule: &StoppingRule,
    opts: &LevelSetOptions,
    truth: Option<&ScalarField>,
) -> std::result::Result<(LevelSetState, IterationLog), RunFailure> {
    let mut log = IterationLog::default();
    let fail = |step: usize, e: Error, log: &IterationLog| RunFailure::new(step, e, log.clone());
    state0.validate().map_err(|e| fail(0, e, &log))?;
    rule.validate().map_err(|e| fail(0, e, &log))?;
    if data.kind() != model.kind() || data.len() != model.profiles().len() {
        let e = Error::Dimension("measurement set does not match the forward model".into());
        return Err(fail(0, e, &log));
    }
    let started = Instant::now();
    let mut state = state0.clone();
    for k in 0..=rule.max_iter {
        let chi = project_levelset(&state);
        let lin = model.linearize(&chi).map_err(|e| fail(k, e, &log))?;
        let r = lin
            .outputs()
            .sub(&data.outputs)
            .map_err(|e| fail(k, e, &log))?;
        let res = r.norm();
        if !res.is_finite() {
            let e = Error::Aborted {
                step: k,
                reason: "residual is not finite".into(),
            };
            return Err(fail(k, e, &log));
        }
        let (param_error, area) = match truth {
            Some(t) => (
                Some(chi.zip_map(t, |a, b| a - b).norm_l2()),
                Some(sym_diff_area(&state, t).map_err(|e| fail(k, e, &log))?),
            ),
            None => (None, None),
        };
        log.push(StepRecord {
            step: k,
            residual: res,
            component: None,
            param_error,
            sym_diff_area: area,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        if discrepancy_stop(res, rule) {
            log.stop = Some(StopReason::Discrepancy);
            return Ok((state, log));
        }
        if k == rule.max_iter {
            break;
        }
        let sens = lin.adjoint(&r).map_err(|e| fail(k, e, &log))?;
        let w = levelset_velocity(&state, &sens, model.options()).map_err(|e| fail(k, e, &log))?;
        let mut inv_alpha = 1.0 / state.alpha;
        if let Some(cap) = opts.max_step {
            let largest = w.max_abs() * inv_alpha;
            let limit = cap * state.epsilon;
            if largest > limit {
                inv_alpha *= limit / largest;
            }
        }
        for (p, d) in state.phi.values_mut().iter_mut().zip(w.values()) {
            *p += inv_alpha * d;
        }
        if !state.phi.is_finite() {
            let e = Error::Aborted {
                step: k,
                reason: "level-set function became non-finite".into(),
            };
            return Err(fail(k, e, &log));
        }
        if let Some(every) = opts.rescale_every.filter(|&e| e > 0) {
            if (k + 1) % every == 0 {
                let m = state.phi.max_abs();
                if m > 0.0 {
                    let s = 1.0 / m;
                    for p in state.phi.values_mut() {
                        *p *= s;
                    }
                }
            }
        }
    }
    log.stop = Some(StopReason::MaxIter);
    Ok((state, log))
}
