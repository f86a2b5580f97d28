//! Iterative reconstruction engines and their stopping rule.

mod landweber;
mod levelset;
mod log;

use std::fmt;

use crate::error::{Error, Result};

pub use landweber::{
    estimate_operator_norm, landweber_kaczmarz_run, landweber_run, LandweberOptions,
};
pub use levelset::{
    curvature_term, levelset_run, levelset_velocity, project_levelset, signed_distance_circle,
    smoothed_heaviside, smoothed_heaviside_derivative, sym_diff_area, LevelSetOptions,
    LevelSetState, DEFAULT_CURVATURE_WEIGHT,
};
pub use log::{IterationLog, StepRecord, StopReason};

/// Discrepancy principle `‖F(γ_k) − Y^δ‖ ≤ τ δ` with an iteration cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRule {
    pub tau: f64,
    pub delta: f64,
    pub max_iter: usize,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            tau: 1.2,
            delta: 0.0,
            max_iter: 500,
        }
    }
}

impl StoppingRule {
    pub fn new(tau: f64, delta: f64, max_iter: usize) -> Result<Self> {
        let rule = StoppingRule {
            tau,
            delta,
            max_iter,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 1.0) || !self.tau.is_finite() {
            return Err(Error::Domain(format!(
                "tau must exceed 1, got {}",
                self.tau
            )));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::Domain(format!(
                "delta must be nonnegative, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// `true` iff `residual_norm ≤ τ δ`.
pub fn discrepancy_stop(residual_norm: f64, rule: &StoppingRule) -> bool {
    residual_norm <= rule.tau * rule.delta
}

/// An engine abort, carrying the log recorded up to the failing step.
#[derive(Debug)]
pub struct RunFailure {
    pub step: usize,
    pub error: Error,
    pub partial: IterationLog,
}

impl RunFailure {
    pub fn new(step: usize, error: Error, partial: IterationLog) -> Self {
        RunFailure {
            step,
            error,
            partial,
        }
    }
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: {}", self.step, self.error)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<RunFailure> for Error {
    fn from(f: RunFailure) -> Self {
        match f.error {
            e @ (Error::IterationLimit { .. }
            | Error::NonConvergence { .. }
            | Error::Aborted { .. }) => e,
            e => Error::Aborted {
                step: f.step,
                reason: e.to_string(),
            },
        }
    }
}
