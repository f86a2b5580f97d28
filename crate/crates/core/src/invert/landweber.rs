//! Landweber and cyclic Landweber–Kaczmarz iterations on γ.

use std::time::Instant;

use super::log::{IterationLog, StepRecord, StopReason};
use super::{discrepancy_stop, RunFailure, StoppingRule};
use crate::error::Error;
use crate::forward::{ForwardModel, MeasurementSet, Outputs};
use crate::grid::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandweberOptions {
    /// Multiplier of the adjoint update; `None` picks `0.9 / ν²` with ν the
    /// power-method estimate of `‖F′(γ₀)‖`.
    pub step_scale: Option<f64>,
    /// Admissible range `[γ₋, γ₊]`; iterates are clipped into it.
    pub gamma_bounds: (f64, f64),
    pub power_iterations: usize,
}

impl Default for LandweberOptions {
    fn default() -> Self {
        LandweberOptions {
            step_scale: None,
            gamma_bounds: (1e-3, 1e3),
            power_iterations: 20,
        }
    }
}

/// Power-method estimate of `‖F′(γ)‖` (square root of the top eigenvalue of
/// `F′* F′`).
pub fn estimate_operator_norm(
    model: &ForwardModel,
    gamma: &ScalarField,
    iterations: usize,
) -> crate::Result<f64> {
    let lin = model.linearize(gamma)?;
    let grid = gamma.grid();
    // Smooth, strictly positive start so that no eigenvector is missed by symmetry.
    let mut x = ScalarField::from_fn(grid, |x, y| 1.0 + 0.3 * x + 0.2 * y * y);
    let mut eig = 0.0;
    for _ in 0..iterations.max(1) {
        let nx = x.norm_l2();
        if nx == 0.0 {
            return Ok(0.0);
        }
        x = x.map(|v| v / nx);
        let y = lin.adjoint(&lin.derivative(&x)?)?;
        eig = x.dot(&y);
        x = y;
    }
    Ok(eig.max(0.0).sqrt())
}

fn clip(gamma: &mut ScalarField, (lo, hi): (f64, f64)) {
    for v in gamma.values_mut() {
        *v = v.clamp(lo, hi);
    }
}

fn param_error(gamma: &ScalarField, truth: Option<&ScalarField>) -> Option<f64> {
    truth.map(|t| gamma.zip_map(t, |a, b| a - b).norm_l2())
}

fn resolve_step(
    model: &ForwardModel,
    gamma0: &ScalarField,
    opts: &LandweberOptions,
) -> crate::Result<f64> {
    match opts.step_scale {
        Some(s) => Ok(s),
        None => {
            let nu = estimate_operator_norm(model, gamma0, opts.power_iterations)?;
            if nu > 0.0 {
                Ok(0.9 / (nu * nu))
            } else {
                Ok(0.0)
            }
        }
    }
}

/// Landweber step from `gamma` against the data of `model`'s components.
/// Returns the residual at `gamma` and the updated iterate.
fn landweber_step(
    model: &ForwardModel,
    gamma: &ScalarField,
    data: &Outputs,
    step: f64,
    bounds: (f64, f64),
) -> crate::Result<(Outputs, ScalarField)> {
    let lin = model.linearize(gamma)?;
    let r = lin.outputs().sub(data)?;
    let grad = lin.adjoint(&r)?;
    let mut next = gamma.zip_map(&grad, |g, d| g - step * d);
    clip(&mut next, bounds);
    Ok((r, next))
}

fn check_data(model: &ForwardModel, data: &MeasurementSet) -> crate::Result<()> {
    if data.kind() != model.kind() || data.len() != model.profiles().len() {
        return Err(Error::Dimension(
            "measurement set does not match the forward model".into(),
        ));
    }
    Ok(())
}

/// Landweber iteration `γ_{k+1} = γ_k − s F′(γ_k)* (F(γ_k) − Y^δ)`.
pub fn landweber_run(
    gamma0: &ScalarField,
    data: &MeasurementSet,
    model: &ForwardModel,
    rule: &StoppingRule,
    opts: &LandweberOptions,
    truth: Option<&ScalarField>,
) -> Result<(ScalarField, IterationLog), RunFailure> {
    let mut log = IterationLog::default();
    let fail = |step: usize, e: Error, log: &IterationLog| RunFailure::new(step, e, log.clone());
    check_data(model, data).map_err(|e| fail(0, e, &log))?;
    let step = resolve_step(model, gamma0, opts).map_err(|e| fail(0, e, &log))?;
    let started = Instant::now();
    let mut gamma = gamma0.clone();
    clip(&mut gamma, opts.gamma_bounds);
    let mut previous: Option<f64> = None;
    for k in 0..=rule.max_iter {
        let (r, next) = landweber_step(model, &gamma, &data.outputs, step, opts.gamma_bounds)
            .map_err(|e| fail(k, e, &log))?;
        let res = r.norm();
        log.push(StepRecord {
            step: k,
            residual: res,
            component: None,
            param_error: param_error(&gamma, truth),
            sym_diff_area: None,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        if discrepancy_stop(res, rule) {
            log.stop = Some(StopReason::Discrepancy);
            return Ok((gamma, log));
        }
        if k == rule.max_iter {
            break;
        }
        if previous.is_some_and(|p| (p - res).abs() <= 1e-15 * p) {
            log.stop = Some(StopReason::Stagnation);
            return Ok((gamma, log));
        }
        previous = Some(res);
        if !next.is_finite() {
            return Err(fail(
                k,
                Error::Domain("iterate became non-finite".into()),
                &log,
            ));
        }
        gamma = next;
    }
    log.stop = Some(StopReason::MaxIter);
    Ok((gamma, log))
}

/// Cyclic Landweber–Kaczmarz: one Landweber step per data component,
/// `k = iN + j`. The stopping rule is checked on the full residual at the
/// start of every cycle; `rule.max_iter` counts cycles.
pub fn landweber_kaczmarz_run(
    gamma0: &ScalarField,
    data: &MeasurementSet,
    model: &ForwardModel,
    rule: &StoppingRule,
    opts: &LandweberOptions,
    truth: Option<&ScalarField>,
) -> Result<(ScalarField, IterationLog), RunFailure> {
    let mut log = IterationLog::default();
    let fail = |step: usize, e: Error, log: &IterationLog| RunFailure::new(step, e, log.clone());
    check_data(model, data).map_err(|e| fail(0, e, &log))?;
    let step = resolve_step(model, gamma0, opts).map_err(|e| fail(0, e, &log))?;
    let count = data.len();
    let components: Vec<ForwardModel> = (0..count).map(|j| model.component(j)).collect();
    let targets: Vec<Outputs> = (0..count).map(|j| data.outputs.select(j)).collect();
    let started = Instant::now();
    let mut gamma = gamma0.clone();
    clip(&mut gamma, opts.gamma_bounds);
    let mut previous: Option<f64> = None;
    for cycle in 0..=rule.max_iter {
        let k0 = cycle * count;
        // With a single component the cycle residual is the step residual,
        // so both engines follow the same arithmetic path.
        let (res, first) = if count == 1 {
            let (r, next) =
                landweber_step(&components[0], &gamma, &targets[0], step, opts.gamma_bounds)
                    .map_err(|e| fail(k0, e, &log))?;
            (r.norm(), Some(next))
        } else {
            let y = model.apply(&gamma).map_err(|e| fail(k0, e, &log))?;
            let r = y.sub(&data.outputs).map_err(|e| fail(k0, e, &log))?;
            (r.norm(), None)
        };
        log.push(StepRecord {
            step: k0,
            residual: res,
            component: None,
            param_error: param_error(&gamma, truth),
            sym_diff_area: None,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        if discrepancy_stop(res, rule) {
            log.stop = Some(StopReason::Discrepancy);
            return Ok((gamma, log));
        }
        if cycle == rule.max_iter {
            break;
        }
        if previous.is_some_and(|p| (p - res).abs() <= 1e-15 * p) {
            log.stop = Some(StopReason::Stagnation);
            return Ok((gamma, log));
        }
        previous = Some(res);
        if let Some(next) = first {
            gamma = next;
        } else {
            for j in 0..count {
                let (r, next) =
                    landweber_step(&components[j], &gamma, &targets[j], step, opts.gamma_bounds)
                        .map_err(|e| fail(k0 + j, e, &log))?;
                log.push(StepRecord {
                    step: k0 + j,
                    residual: r.norm(),
                    component: Some(j),
                    param_error: None,
                    sym_diff_area: None,
                    wall_ms: started.elapsed().as_secs_f64() * 1e3,
                });
                gamma = next;
            }
        }
        if !gamma.is_finite() {
            return Err(fail(
                k0,
                Error::Domain("iterate became non-finite".into()),
                &log,
            ));
        }
    }
    log.stop = Some(StopReason::MaxIter);
    Ok((gamma, log))
}
