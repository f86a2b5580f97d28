//! End-to-end synthetic experiment: phantom, data, reconstruction, files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{Map, Number, Value};

use super::config::{Alpha, EngineConfig, ExperimentConfig, TruthMode};
use super::noise::add_noise;
use super::phantom::make_phantom;
use crate::error::Error;
use crate::forward::{
    doping_from_gamma, gamma_from_doping, junction_gamma, make_voltage_profiles, ForwardModel,
    MeasurementSet,
};
use crate::grid::{fmt17, Grid, ScalarField};
use crate::invert::{
    landweber_kaczmarz_run, landweber_run, levelset_run, project_levelset, signed_distance_circle,
    sym_diff_area, IterationLog, LandweberOptions, LevelSetOptions, LevelSetState, RunFailure,
};

/// Pipeline stage at which an experiment failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Phantom,
    Equilibrium,
    Forward,
    Noise,
    Engine,
    Output,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Phantom => "phantom",
            Stage::Equilibrium => "equilibrium",
            Stage::Forward => "forward",
            Stage::Noise => "noise",
            Stage::Engine => "engine",
            Stage::Output => "output",
        }
    }
}

#[derive(Debug)]
pub struct ExperimentError {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for ExperimentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.stage.name(), self.error)
    }
}

impl std::error::Error for ExperimentError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl ExperimentError {
    /// Process exit status: 2 configuration, 4 nonconvergence, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        exit_code(&self.error)
    }
}

/// Exit status of the command-line driver for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Geometry(_) | Error::Phantom(_) => 2,
        Error::NonConvergence { .. } | Error::IterationLimit { .. } => 4,
        _ => 3,
    }
}

/// Headline numbers of a finished run, also written to `summary.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub engine: &'static str,
    pub steps: usize,
    pub stop: &'static str,
    /// Realized absolute noise level.
    pub delta: f64,
    pub final_residual: f64,
    /// `‖γ_rec − γ_true‖ / ‖γ_true‖` in the trapezoid L² norm.
    pub relative_l2_error: f64,
    /// Area of the symmetric difference of reconstructed and true N-regions.
    pub sym_diff_area: f64,
    pub wall_seconds: Option<f64>,
}

impl ExperimentSummary {
    pub fn to_json(&self) -> String {
        let num = |v: f64| {
            fmt17(v)
                .parse::<Number>()
                .map_or(Value::Null, Value::Number)
        };
        let mut m = Map::new();
        m.insert("engine".into(), Value::String(self.engine.into()));
        m.insert("steps".into(), Value::from(self.steps));
        m.insert("stop".into(), Value::String(self.stop.into()));
        m.insert("delta".into(), num(self.delta));
        m.insert("final_residual".into(), num(self.final_residual));
        m.insert("relative_l2_error".into(), num(self.relative_l2_error));
        m.insert("sym_diff_area".into(), num(self.sym_diff_area));
        if let Some(t) = self.wall_seconds {
            m.insert("wall_seconds".into(), num(t));
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
        s.push('\n');
        s
    }
}

/// Everything a run produces, before it is written out.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub c_true: ScalarField,
    pub gamma_true: ScalarField,
    pub gamma_rec: ScalarField,
    pub c_rec: ScalarField,
    pub data: MeasurementSet,
    pub log: IterationLog,
    pub summary: ExperimentSummary,
}

fn at(stage: Stage) -> impl Fn(Error) -> ExperimentError {
    move |error| ExperimentError { stage, error }
}

/// Runs the pipeline without touching the filesystem (except to read a
/// custom phantom). On an engine failure the partial log is returned with
/// the error.
pub fn compute_experiment(
    cfg: &ExperimentConfig,
) -> Result<ExperimentResult, (ExperimentError, Option<IterationLog>)> {
    let plain = |e: ExperimentError| (e, None);
    cfg.validate().map_err(at(Stage::Config)).map_err(plain)?;
    let started = Instant::now();
    let grid = Grid::new(cfg.n).map_err(at(Stage::Config)).map_err(plain)?;
    let params = cfg.params;
    let device = cfg.kind.model();

    let c_true = make_phantom(&cfg.phantom, grid)
        .map_err(at(Stage::Phantom))
        .map_err(plain)?;
    let gamma_true = match cfg.truth {
        TruthMode::Sharp => c_true.map(|c| junction_gamma(c, &params, device)),
        TruthMode::Equilibrium => gamma_from_doping(&c_true, &params, device, &cfg.solver)
            .map_err(at(Stage::Equilibrium))
            .map_err(plain)?,
    };

    let forward = |e| plain(at(Stage::Forward)(e));
    let profiles = make_voltage_profiles(cfg.count, cfg.half_width, &grid)
        .map_err(at(Stage::Config))
        .map_err(plain)?;
    let model =
        ForwardModel::new(grid, cfg.kind, profiles.clone(), params, cfg.solver).map_err(forward)?;
    let exact = model.apply(&gamma_true).map_err(forward)?;
    let (noisy, delta) = add_noise(&exact, cfg.noise, cfg.seed)
        .map_err(at(Stage::Noise))
        .map_err(plain)?;
    let data = MeasurementSet::new(cfg.half_width, profiles, noisy).map_err(forward)?;
    let rule = cfg
        .stopping_rule(delta)
        .map_err(at(Stage::Config))
        .map_err(plain)?;

    let gamma_int = junction_gamma(cfg.phantom.c_n, &params, device);
    let gamma_ext = junction_gamma(cfg.phantom.c_p, &params, device);
    let phi0 = signed_distance_circle(grid, cfg.initial.center, cfg.initial.radius);
    let engine_err = |f: RunFailure| {
        let partial = f.partial.clone();
        (at(Stage::Engine)(Error::from(f)), Some(partial))
    };

    let (gamma_rec, log, area) = match &cfg.engine {
        EngineConfig::LevelSet(ls) => {
            let alpha = match ls.alpha {
                Alpha::Absolute(a) => a,
                Alpha::Relative(r) => r * data.outputs.norm(),
            };
            let state0 = LevelSetState::new(
                phi0,
                gamma_int,
                gamma_ext,
                ls.epsilon_h * grid.h(),
                ls.beta,
                alpha,
            )
            .and_then(|s| s.with_curvature_weight(ls.curvature_weight))
            .map_err(at(Stage::Config))
            .map_err(plain)?;
            let opts = LevelSetOptions {
                rescale_every: ls.rescale_every,
                max_step: ls.max_step,
            };
            let (state, log) =
                levelset_run(&state0, &data, &model, &rule, &opts, Some(&gamma_true))
                    .map_err(engine_err)?;
            let area = sym_diff_area(&state, &gamma_true)
                .map_err(at(Stage::Engine))
                .map_err(plain)?;
            (project_levelset(&state), log, area)
        }
        EngineConfig::Landweber(lw) | EngineConfig::Kaczmarz(lw) => {
            // Same starting geometry as the level-set engine.
            let start = LevelSetState::new(phi0, gamma_int, gamma_ext, 2.0 * grid.h(), 1e-3, 1.0)
                .map_err(at(Stage::Config))
                .map_err(plain)?;
            let gamma0 = project_levelset(&start);
            let opts = LandweberOptions {
                step_scale: lw.step_scale,
                gamma_bounds: params.gamma_bounds(device),
                power_iterations: lw.power_iterations,
            };
            let run = if matches!(cfg.engine, EngineConfig::Kaczmarz(_)) {
                landweber_kaczmarz_run
            } else {
                landweber_run
            };
            let (gamma, log) =
                run(&gamma0, &data, &model, &rule, &opts, Some(&gamma_true)).map_err(engine_err)?;
            let area = classified_sym_diff(&gamma, &gamma_true, gamma_int, gamma_ext);
            (gamma, log, area)
        }
    };

    let c_rec = doping_from_gamma(&gamma_rec, &params, device)
        .map_err(at(Stage::Engine))
        .map_err(plain)?
        .map(|c| c.clamp(params.c_min, params.c_max));
    let last = log.full_records().last().cloned();
    let summary = ExperimentSummary {
        engine: cfg.engine.name(),
        steps: last.as_ref().map_or(0, |r| r.step),
        stop: log.stop.map_or("none", |s| s.name()),
        delta,
        final_residual: last.map_or(f64::NAN, |r| r.residual),
        relative_l2_error: gamma_rec.zip_map(&gamma_true, |a, b| a - b).norm_l2()
            / gamma_true.norm_l2(),
        sym_diff_area: area,
        wall_seconds: cfg.timing.then(|| started.elapsed().as_secs_f64()),
    };
    Ok(ExperimentResult {
        c_true,
        gamma_true,
        gamma_rec,
        c_rec,
        data,
        log,
        summary,
    })
}

/// Symmetric-difference area when every node is assigned to the nearer of
/// the two levels.
pub fn classified_sym_diff(
    gamma: &ScalarField,
    truth: &ScalarField,
    gamma_int: f64,
    gamma_ext: f64,
) -> f64 {
    let inside = |v: f64| (v - gamma_int).abs() < (v - gamma_ext).abs();
    gamma
        .values()
        .iter()
        .zip(truth.values())
        .zip(gamma.grid().mass())
        .filter(|((&a, &b), _)| inside(a) != inside(b))
        .map(|(_, m)| m)
        .sum()
}

/// Names of the files [`run_experiment`] writes.
pub const OUTPUT_FILES: [&str; 8] = [
    "config.toml",
    "c_true.csv",
    "gamma_true.csv",
    "gamma_rec.csv",
    "c_rec.csv",
    "data.json",
    "log.jsonl",
    "summary.json",
];

/// Runs the experiment and writes its artifacts into `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary, ExperimentError> {
    let dir = cfg.output_dir.clone();
    let out = at(Stage::Output);
    std::fs::create_dir_all(&dir).map_err(|e| out(e.into()))?;
    write(&dir, "config.toml", &cfg.to_toml()).map_err(&out)?;
    match compute_experiment(cfg) {
        Ok(res) => {
            write_result(&dir, &res, cfg.timing).map_err(&out)?;
            Ok(res.summary)
        }
        Err((err, partial)) => {
            if let Some(log) = partial {
                // Keep the history up to the failure for diagnosis.
                let _ = log.write_jsonl(dir.join("log.jsonl"), cfg.timing);
            }
            Err(err)
        }
    }
}

fn write(dir: &Path, name: &str, text: &str) -> crate::Result<()> {
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_result(dir: &Path, res: &ExperimentResult, timing: bool) -> crate::Result<()> {
    let path = |name: &str| -> PathBuf { dir.join(name) };
    res.c_true.write_csv(path("c_true.csv"))?;
    res.gamma_true.write_csv(path("gamma_true.csv"))?;
    res.gamma_rec.write_csv(path("gamma_rec.csv"))?;
    res.c_rec.write_csv(path("c_rec.csv"))?;
    write(dir, "data.json", &res.data.to_json())?;
    res.log.write_jsonl(path("log.jsonl"), timing)?;
    write(dir, "summary.json", &res.summary.to_json())
}
