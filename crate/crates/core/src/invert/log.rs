use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::fmt17;

/// Why an engine stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Discrepancy,
    MaxIter,
    Stagnation,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::Discrepancy => "discrepancy",
            StopReason::MaxIter => "max_iter",
            StopReason::Stagnation => "stagnation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Output-space residual norm; for Kaczmarz inner steps the norm of the
    /// active component only.
    pub residual: f64,
    /// Active component of a Kaczmarz inner step; `None` for full residuals.
    pub component: Option<usize>,
    /// `‖γ_k − γ_true‖_{L²}` when a ground truth is known.
    pub param_error: Option<f64>,
    /// Area of the symmetric difference between reconstructed and true
    /// inclusion (level-set runs with ground truth).
    pub sym_diff_area: Option<f64>,
    pub wall_ms: f64,
}

/// Per-step history of an engine run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationLog {
    pub records: Vec<StepRecord>,
    pub stop: Option<StopReason>,
}

impl IterationLog {
    pub fn push(&mut self, record: StepRecord) {
        debug_assert!(record.residual >= 0.0);
        debug_assert!(self.records.last().is_none_or(|r| r.step <= record.step));
        self.records.push(record);
    }

    /// Records of full residual evaluations (the ones the stopping rule sees).
    pub fn full_records(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter().filter(|r| r.component.is_none())
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.full_records().map(|r| r.residual).collect()
    }

    pub fn last_residual(&self) -> Option<f64> {
        self.full_records().last().map(|r| r.residual)
    }

    /// JSON lines, one record per step. Wall time is only written when
    /// `with_time` is set so that untimed logs are reproducible byte for byte.
    pub fn to_jsonl(&self, with_time: bool) -> String {
        let mut out = String::new();
        for r in &self.records {
            write!(
                out,
                "{{\"step\":{},\"residual\":{}",
                r.step,
                fmt17(r.residual)
            )
            .unwrap();
            if let Some(j) = r.component {
                write!(out, ",\"component\":{j}").unwrap();
            }
            if let Some(e) = r.param_error {
                write!(out, ",\"param_error\":{}", fmt17(e)).unwrap();
            }
            if let Some(a) = r.sym_diff_area {
                write!(out, ",\"sym_diff_area\":{}", fmt17(a)).unwrap();
            }
            if with_time {
                write!(out, ",\"wall_ms\":{:.3}", r.wall_ms).unwrap();
            }
            out.push_str("}\n");
        }
        out
    }

    pub fn write_jsonl(&self, path: impl AsRef<Path>, with_time: bool) -> Result<()> {
        std::fs::write(path, self.to_jsonl(with_time)).map_err(Error::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_lines_parse() {
        let mut log = IterationLog::default();
        log.push(StepRecord {
            step: 0,
            residual: 0.5,
            component: None,
            param_error: None,
            sym_diff_area: Some(0.25),
            wall_ms: 1.5,
        });
        log.push(StepRecord {
            step: 1,
            residual: 0.25,
            component: Some(2),
            param_error: Some(1.0),
            sym_diff_area: None,
            wall_ms: 2.0,
        });
        let text = log.to_jsonl(true);
        let lines: Vec<serde_json::Value> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0]["sym_diff_area"].as_f64(), Some(0.25));
        assert_eq!(lines[1]["component"].as_u64(), Some(2));
        assert!(!log.to_jsonl(false).contains("wall_ms"));
        assert_eq!(log.residuals(), vec![0.5]);
    }
}
