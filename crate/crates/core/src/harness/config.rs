//! Experiment configuration: a TOML file with one table per concern.
//!
//! Every key is optional. Unknown or inapplicable keys are rejected, and all
//! range violations are reported together.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use super::phantom::{Phantom, PhantomKind};
use crate::elliptic::SolverOptions;
use crate::error::{Error, Result};
use crate::forward::{default_half_width, MeasurementKind, ModelParams};
use crate::grid::Grid;
use crate::invert::{StoppingRule, DEFAULT_CURVATURE_WEIGHT};

/// How the true coefficient is derived from the phantom doping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruthMode {
    /// Two-level γ of the charge-neutral regions.
    Sharp,
    /// γ of the full equilibrium potential.
    Equilibrium,
}

impl TruthMode {
    pub fn name(self) -> &'static str {
        match self {
            TruthMode::Sharp => "sharp",
            TruthMode::Equilibrium => "equilibrium",
        }
    }
}

/// Circle whose signed distance is the initial level-set function; the
/// Landweber engines start from its two-level projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialGuess {
    pub center: (f64, f64),
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Absolute(f64),
    /// Multiple of the noisy data norm `‖Y^δ‖`.
    Relative(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetConfig {
    pub alpha: Alpha,
    /// Band half width `ε` in units of the mesh size.
    pub epsilon_h: f64,
    pub beta: f64,
    pub curvature_weight: f64,
    pub max_step: Option<f64>,
    pub rescale_every: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandweberConfig {
    pub step_scale: Option<f64>,
    pub power_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EngineConfig {
    Landweber(LandweberConfig),
    Kaczmarz(LandweberConfig),
    LevelSet(LevelSetConfig),
}

impl EngineConfig {
    pub fn name(&self) -> &'static str {
        match self {
            EngineConfig::Landweber(_) => "landweber",
            EngineConfig::Kaczmarz(_) => "kaczmarz",
            EngineConfig::LevelSet(_) => "levelset",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub params: ModelParams,
    pub phantom: Phantom,
    pub kind: MeasurementKind,
    pub count: usize,
    pub half_width: f64,
    pub noise: f64,
    pub seed: u64,
    pub truth: TruthMode,
    pub engine: EngineConfig,
    pub tau: f64,
    pub max_iter: usize,
    pub initial: InitialGuess,
    pub solver: SolverOptions,
    pub output_dir: PathBuf,
    /// Record wall time in the log and summary (breaks bitwise reproducibility).
    pub timing: bool,
}

/// Every accepted key, as `table.key`.
pub const KNOWN_KEYS: &[&str] = &[
    "grid.n",
    "model.lambda",
    "model.n_i",
    "model.mu_n",
    "model.mu_p",
    "model.c_min",
    "model.c_max",
    "phantom.kind",
    "phantom.c_n",
    "phantom.c_p",
    "phantom.x0",
    "phantom.x1",
    "phantom.y0",
    "phantom.y1",
    "phantom.amplitude",
    "phantom.frequency",
    "phantom.path",
    "measurement.kind",
    "measurement.count",
    "measurement.half_width",
    "measurement.noise",
    "measurement.seed",
    "measurement.truth",
    "engine.name",
    "engine.tau",
    "engine.max_iter",
    "engine.init_x",
    "engine.init_y",
    "engine.init_radius",
    "engine.step_scale",
    "engine.power_iterations",
    "engine.alpha",
    "engine.alpha_rel",
    "engine.epsilon_h",
    "engine.beta",
    "engine.curvature_weight",
    "engine.max_step",
    "engine.rescale_every",
    "solver.newton_tol",
    "solver.newton_max_iter",
    "solver.linear_tol",
    "solver.linear_max_iter",
    "output.dir",
    "output.timing",
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 41,
            params: ModelParams::default(),
            phantom: Phantom::rect_inclusion(0.2, 0.5, 0.4, 0.8),
            kind: MeasurementKind::PointwiseUnipolar,
            count: 1,
            half_width: default_half_width(1),
            noise: 0.0,
            seed: 1,
            truth: TruthMode::Sharp,
            engine: EngineConfig::LevelSet(LevelSetConfig::default()),
            tau: StoppingRule::default().tau,
            max_iter: StoppingRule::default().max_iter,
            initial: InitialGuess {
                center: (0.5, 0.5),
                radius: 0.3,
            },
            solver: SolverOptions::default(),
            output_dir: PathBuf::from("dopinv-out"),
            timing: false,
        }
    }
}

impl Default for LevelSetConfig {
    fn default() -> Self {
        LevelSetConfig {
            alpha: Alpha::Relative(0.05),
            epsilon_h: 2.0,
            beta: 1e-3,
            curvature_weight: DEFAULT_CURVATURE_WEIGHT,
            max_step: Some(0.5),
            rescale_every: Some(50),
        }
    }
}

impl Default for LandweberConfig {
    fn default() -> Self {
        LandweberConfig {
            step_scale: None,
            power_iterations: 20,
        }
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        e => e,
    })
}

/// Parses configuration text; see [`load_config`].
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(format!("parse error: {e}")))?;
    let mut r = Reader::new(text, &table);
    let cfg = r.read();
    r.reject_leftovers();
    if !r.errors.is_empty() {
        return Err(Error::Config(r.errors.join("\n  ")));
    }
    let cfg = cfg.expect("no errors means every value was read");
    cfg.validate()?;
    Ok(cfg)
}

impl ExperimentConfig {
    /// Range checks across all fields; every violation is listed.
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if let Err(e) = Grid::new(self.n) {
            bad.push(format!("grid.n: {e}"));
        }
        for e in [
            self.params.validate().err(),
            self.phantom.validate().err(),
            self.solver.validate().err(),
        ]
        .into_iter()
        .flatten()
        {
            bad.push(strip_prefix(e));
        }
        if self.count == 0 {
            bad.push("measurement.count must be at least 1".into());
        }
        if !(self.half_width > 0.0 && self.half_width <= 0.5) {
            bad.push(format!(
                "measurement.half_width must lie in (0, 0.5], got {}",
                self.half_width
            ));
        } else if self.count > 1 && 2.0 * self.half_width >= 1.0 / (self.count + 1) as f64 {
            bad.push(format!(
                "measurement.half_width = {}: the {} contact windows are {:.4} apart and would overlap",
                self.half_width,
                self.count,
                1.0 / (self.count + 1) as f64
            ));
        }
        if !(self.noise >= 0.0 && self.noise < 1.0) {
            bad.push(format!(
                "measurement.noise must lie in [0, 1), got {}",
                self.noise
            ));
        }
        if !(self.tau > 1.0 && self.tau.is_finite()) {
            bad.push(format!("engine.tau must exceed 1, got {}", self.tau));
        }
        let InitialGuess { center, radius } = self.initial;
        if !(radius > 0.0 && radius.is_finite() && center.0.is_finite() && center.1.is_finite()) {
            bad.push(format!(
                "initial circle needs a finite centre and positive radius, got {center:?}, r = {radius}"
            ));
        }
        match &self.engine {
            EngineConfig::LevelSet(ls) => {
                let alpha = match ls.alpha {
                    Alpha::Absolute(a) | Alpha::Relative(a) => a,
                };
                let checks = [
                    ("alpha", alpha, alpha > 0.0),
                    ("epsilon_h", ls.epsilon_h, ls.epsilon_h > 0.0),
                    ("beta", ls.beta, ls.beta > 0.0),
                    (
                        "curvature_weight",
                        ls.curvature_weight,
                        ls.curvature_weight >= 0.0,
                    ),
                ];
                for (name, v, ok) in checks {
                    if !(ok && v.is_finite()) {
                        bad.push(format!("engine.{name} out of range: {v}"));
                    }
                }
                if let Some(s) = ls.max_step.filter(|s| !(s.is_finite() && *s > 0.0)) {
                    bad.push(format!("engine.max_step must be positive, got {s}"));
                }
            }
            EngineConfig::Landweber(lw) | EngineConfig::Kaczmarz(lw) => {
                if let Some(s) = lw.step_scale.filter(|s| !(s.is_finite() && *s > 0.0)) {
                    bad.push(format!("engine.step_scale must be positive, got {s}"));
                }
                if lw.power_iterations == 0 {
                    bad.push("engine.power_iterations must be at least 1".into());
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("\n  ")))
        }
    }

    /// Stopping rule for a realized noise level.
    pub fn stopping_rule(&self, delta: f64) -> Result<StoppingRule> {
        StoppingRule::new(self.tau, delta, self.max_iter)
    }

    /// The effective configuration as loadable TOML. The output directory is
    /// left out so that runs in different directories emit identical files.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let _ = writeln!(s, "[grid]\nn = {}\n", self.n);
        let _ = writeln!(
            s,
            "[model]\nlambda = {:?}\nn_i = {:?}\nmu_n = {:?}\nmu_p = {:?}\nc_min = {:?}\nc_max = {:?}\n",
            p.lambda, p.n_i, p.mu_n, p.mu_p, p.c_min, p.c_max
        );
        let _ = writeln!(s, "[phantom]\nkind = \"{}\"", self.phantom.name());
        let _ = writeln!(
            s,
            "c_n = {:?}\nc_p = {:?}",
            self.phantom.c_n, self.phantom.c_p
        );
        match &self.phantom.kind {
            PhantomKind::RectInclusion { x0, x1, y0, y1 } => {
                let _ = writeln!(s, "x0 = {x0:?}\nx1 = {x1:?}\ny0 = {y0:?}\ny1 = {y1:?}");
            }
            PhantomKind::OscillatingJunction {
                y0,
                amplitude,
                frequency,
            } => {
                let _ = writeln!(
                    s,
                    "y0 = {y0:?}\namplitude = {amplitude:?}\nfrequency = {frequency:?}"
                );
            }
            PhantomKind::CustomCsv { path } => {
                let _ = writeln!(s, "path = {}", Value::String(path.display().to_string()));
            }
        }
        let _ = writeln!(
            s,
            "\n[measurement]\nkind = \"{}\"\ncount = {}\nhalf_width = {:?}\nnoise = {:?}\nseed = {}\ntruth = \"{}\"\n",
            self.kind.name(),
            self.count,
            self.half_width,
            self.noise,
            self.seed,
            self.truth.name()
        );
        let _ = writeln!(
            s,
            "[engine]\nname = \"{}\"\ntau = {:?}\nmax_iter = {}\ninit_x = {:?}\ninit_y = {:?}\ninit_radius = {:?}",
            self.engine.name(),
            self.tau,
            self.max_iter,
            self.initial.center.0,
            self.initial.center.1,
            self.initial.radius
        );
        match &self.engine {
            EngineConfig::LevelSet(ls) => {
                match ls.alpha {
                    Alpha::Absolute(a) => writeln!(s, "alpha = {a:?}"),
                    Alpha::Relative(a) => writeln!(s, "alpha_rel = {a:?}"),
                }
                .ok();
                let _ = writeln!(
                    s,
                    "epsilon_h = {:?}\nbeta = {:?}\ncurvature_weight = {:?}\nmax_step = {:?}\nrescale_every = {}",
                    ls.epsilon_h,
                    ls.beta,
                    ls.curvature_weight,
                    ls.max_step.unwrap_or(0.0),
                    ls.rescale_every.unwrap_or(0)
                );
            }
            EngineConfig::Landweber(lw) | EngineConfig::Kaczmarz(lw) => {
                if let Some(step) = lw.step_scale {
                    let _ = writeln!(s, "step_scale = {step:?}");
                }
                let _ = writeln!(s, "power_iterations = {}", lw.power_iterations);
            }
        }
        let o = &self.solver;
        let _ = writeln!(
            s,
            "\n[solver]\nnewton_tol = {:?}\nnewton_max_iter = {}\nlinear_tol = {:?}\nlinear_max_iter = {}\n",
            o.newton_tol, o.newton_max_iter, o.linear_tol, o.linear_max_iter
        );
        let _ = writeln!(s, "[output]\ntiming = {}", self.timing);
        s
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(m) | Error::Geometry(m) | Error::Phantom(m) => m,
        e => e.to_string(),
    }
}

/// Flattened `table.key → value` view that remembers which keys were read.
struct Reader<'a> {
    text: &'a str,
    values: BTreeMap<String, Value>,
    used: BTreeSet<String>,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, table: &Table) -> Self {
        let mut values = BTreeMap::new();
        let mut errors = Vec::new();
        for (k, v) in table {
            match (k.as_str(), v) {
                (_, Value::Table(t)) => {
                    for (kk, vv) in t {
                        if vv.is_table() {
                            errors.push(format!("[{k}.{kk}]: nested tables are not supported"));
                        } else {
                            values.insert(format!("{k}.{kk}"), vv.clone());
                        }
                    }
                }
                // `phantom = "…"` and `engine = "…"` are shorthands.
                ("phantom", Value::String(_)) => {
                    values.insert("phantom.kind".into(), v.clone());
                }
                ("engine", Value::String(_)) => {
                    values.insert("engine.name".into(), v.clone());
                }
                _ => {
                    values.insert(k.clone(), v.clone());
                }
            }
        }
        Reader {
            text,
            values,
            used: BTreeSet::new(),
            errors,
        }
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        debug_assert!(KNOWN_KEYS.contains(&key), "{key}");
        let v = self.values.get(key).cloned();
        if v.is_some() {
            self.used.insert(key.to_string());
        }
        v
    }

    fn type_error(&mut self, key: &str, want: &str, got: &Value) {
        let line = self.line_of(key);
        self.errors.push(format!(
            "{key}{line}: expected {want}, found {} `{got}`",
            got.type_str()
        ));
    }

    fn float(&mut self, key: &str, default: f64) -> f64 {
        self.opt_float(key).unwrap_or(default)
    }

    fn opt_float(&mut self, key: &str) -> Option<f64> {
        match self.take(key)? {
            Value::Float(f) => Some(f),
            Value::Integer(i) => Some(i as f64),
            v => {
                self.type_error(key, "a number", &v);
                None
            }
        }
    }

    fn int(&mut self, key: &str, default: u64) -> u64 {
        match self.take(key) {
            None => default,
            Some(Value::Integer(i)) if i >= 0 => i as u64,
            Some(v) => {
                self.type_error(key, "a nonnegative integer", &v);
                default
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.take(key)? {
            Value::String(s) => Some(s),
            v => {
                self.type_error(key, "a string", &v);
                None
            }
        }
    }

    fn boolean(&mut self, key: &str, default: bool) -> bool {
        match self.take(key) {
            None => default,
            Some(Value::Boolean(b)) => b,
            Some(v) => {
                self.type_error(key, "true or false", &v);
                default
            }
        }
    }

    fn choice<T: Copy>(&mut self, key: &str, options: &[(&str, T)], default: T) -> T {
        let Some(s) = self.string(key) else {
            return default;
        };
        if let Some(&(_, t)) = options.iter().find(|(name, _)| *name == s) {
            return t;
        }
        let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
        let line = self.line_of(key);
        let hint = suggest(&s, &names)
            .map(|m| format!("; did you mean \"{m}\"?"))
            .unwrap_or_default();
        self.errors.push(format!(
            "{key}{line}: unknown value \"{s}\" (expected one of {}){hint}",
            names.join(", ")
        ));
        default
    }

    fn read(&mut self) -> Option<ExperimentConfig> {
        let d = ExperimentConfig::default();
        let n = self.int("grid.n", d.n as u64) as usize;

        let dp = d.params;
        let params = ModelParams {
            lambda: self.float("model.lambda", dp.lambda),
            n_i: self.float("model.n_i", dp.n_i),
            mu_n: self.float("model.mu_n", dp.mu_n),
            mu_p: self.float("model.mu_p", dp.mu_p),
            u_t: dp.u_t,
            c_min: self.float("model.c_min", dp.c_min),
            c_max: self.float("model.c_max", dp.c_max),
        };

        #[derive(Clone, Copy)]
        enum Shape {
            Rect,
            Junction,
            Csv,
        }
        let shape = self.choice(
            "phantom.kind",
            &[
                ("rect_inclusion", Shape::Rect),
                ("oscillating_junction", Shape::Junction),
                ("custom_csv", Shape::Csv),
            ],
            Shape::Rect,
        );
        let kind = match shape {
            Shape::Rect => PhantomKind::RectInclusion {
                x0: self.float("phantom.x0", 0.2),
                x1: self.float("phantom.x1", 0.5),
                y0: self.float("phantom.y0", 0.4),
                y1: self.float("phantom.y1", 0.8),
            },
            Shape::Junction => PhantomKind::OscillatingJunction {
                y0: self.float("phantom.y0", 0.5),
                amplitude: self.float("phantom.amplitude", 0.2),
                frequency: self.float("phantom.frequency", 2.0),
            },
            Shape::Csv => match self.string("phantom.path") {
                Some(p) => PhantomKind::CustomCsv { path: p.into() },
                None => {
                    self.errors
                        .push("phantom.path is required for kind \"custom_csv\"".into());
                    PhantomKind::CustomCsv {
                        path: PathBuf::new(),
                    }
                }
            },
        };
        let phantom = Phantom {
            kind,
            c_n: self.float("phantom.c_n", d.phantom.c_n),
            c_p: self.float("phantom.c_p", d.phantom.c_p),
        };

        let kinds: Vec<(&str, MeasurementKind)> = MeasurementKind::ALL
            .iter()
            .map(|k| (k.name(), *k))
            .collect();
        let mkind = self.choice("measurement.kind", &kinds, d.kind);
        let count = self.int("measurement.count", d.count as u64) as usize;
        let half_width = self.float("measurement.half_width", default_half_width(count.max(1)));
        let noise = self.float("measurement.noise", d.noise);
        let seed = self.int("measurement.seed", d.seed);
        let truth = self.choice(
            "measurement.truth",
            &[
                ("sharp", TruthMode::Sharp),
                ("equilibrium", TruthMode::Equilibrium),
            ],
            d.truth,
        );

        #[derive(Clone, Copy)]
        enum Engine {
            Landweber,
            Kaczmarz,
            LevelSet,
        }
        let engine_kind = self.choice(
            "engine.name",
            &[
                ("landweber", Engine::Landweber),
                ("kaczmarz", Engine::Kaczmarz),
                ("levelset", Engine::LevelSet),
            ],
            Engine::LevelSet,
        );
        let tau = self.float("engine.tau", d.tau);
        let max_iter = self.int("engine.max_iter", d.max_iter as u64) as usize;
        let initial = InitialGuess {
            center: (
                self.float("engine.init_x", d.initial.center.0),
                self.float("engine.init_y", d.initial.center.1),
            ),
            radius: self.float("engine.init_radius", d.initial.radius),
        };
        let engine = match engine_kind {
            Engine::LevelSet => {
                let dl = LevelSetConfig::default();
                let abs = self.opt_float("engine.alpha");
                let rel = self.opt_float("engine.alpha_rel");
                let alpha = match (abs, rel) {
                    (Some(_), Some(_)) => {
                        self.errors.push(
                            "engine.alpha and engine.alpha_rel are mutually exclusive".into(),
                        );
                        dl.alpha
                    }
                    (Some(a), None) => Alpha::Absolute(a),
                    (None, Some(r)) => Alpha::Relative(r),
                    (None, None) => dl.alpha,
                };
                let max_step = self.float("engine.max_step", dl.max_step.unwrap_or(0.0));
                let rescale =
                    self.int("engine.rescale_every", dl.rescale_every.unwrap_or(0) as u64);
                EngineConfig::LevelSet(LevelSetConfig {
                    alpha,
                    epsilon_h: self.float("engine.epsilon_h", dl.epsilon_h),
                    beta: self.float("engine.beta", dl.beta),
                    curvature_weight: self.float("engine.curvature_weight", dl.curvature_weight),
                    max_step: (max_step != 0.0).then_some(max_step),
                    rescale_every: (rescale != 0).then_some(rescale as usize),
                })
            }
            Engine::Landweber | Engine::Kaczmarz => {
                let lw = LandweberConfig {
                    step_scale: self.opt_float("engine.step_scale"),
                    power_iterations: self.int(
                        "engine.power_iterations",
                        LandweberConfig::default().power_iterations as u64,
                    ) as usize,
                };
                if let Engine::Landweber = engine_kind {
                    EngineConfig::Landweber(lw)
                } else {
                    EngineConfig::Kaczmarz(lw)
                }
            }
        };

        let ds = d.solver;
        let solver = SolverOptions {
            newton_tol: self.float("solver.newton_tol", ds.newton_tol),
            newton_max_iter: self.int("solver.newton_max_iter", ds.newton_max_iter as u64) as usize,
            linear_tol: self.float("solver.linear_tol", ds.linear_tol),
            linear_max_iter: self.int("solver.linear_max_iter", ds.linear_max_iter as u64) as usize,
        };
        let output_dir = self
            .string("output.dir")
            .map(PathBuf::from)
            .unwrap_or(d.output_dir);
        let timing = self.boolean("output.timing", d.timing);

        if !self.errors.is_empty() {
            return None;
        }
        Some(ExperimentConfig {
            n,
            params,
            phantom,
            kind: mkind,
            count,
            half_width,
            noise,
            seed,
            truth,
            engine,
            tau,
            max_iter,
            initial,
            solver,
            output_dir,
            timing,
        })
    }

    fn reject_leftovers(&mut self) {
        let leftovers: Vec<String> = self
            .values
            .keys()
            .filter(|k| !self.used.contains(*k))
            .cloned()
            .collect();
        for key in leftovers {
            let line = self.line_of(&key);
            if KNOWN_KEYS.contains(&key.as_str()) {
                self.errors.push(format!(
                    "{key}{line}: not used with the selected phantom kind or engine"
                ));
                continue;
            }
            let hint = suggest(&key, KNOWN_KEYS)
                .or_else(|| {
                    // A bare or misplaced key: match on the last segment.
                    let last = key.rsplit('.').next().unwrap_or(&key);
                    let tails: Vec<&str> = KNOWN_KEYS
                        .iter()
                        .map(|k| k.rsplit('.').next().unwrap_or(k))
                        .collect();
                    suggest(last, &tails).and_then(|t| {
                        KNOWN_KEYS
                            .iter()
                            .find(|k| k.ends_with(&format!(".{t}")))
                            .copied()
                    })
                })
                .map(|m| format!("; did you mean \"{m}\"?"))
                .unwrap_or_default();
            self.errors
                .push(format!("unknown key \"{key}\"{line}{hint}"));
        }
    }

    /// ` (line N)` for the first line defining `table.key`, if found.
    fn line_of(&self, key: &str) -> String {
        let (table, name) = key.rsplit_once('.').unwrap_or(("", key));
        let mut current = String::new();
        for (no, line) in self.text.lines().enumerate() {
            let t = line.trim();
            if let Some(h) = t.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
                current = h.trim().to_string();
                continue;
            }
            let Some((lhs, _)) = t.split_once('=') else {
                continue;
            };
            let lhs = lhs.trim();
            let hit = (current == table && lhs == name)
                || (current.is_empty() && (lhs == key || lhs == table));
            if hit {
                return format!(" (line {})", no + 1);
            }
        }
        String::new()
    }
}

/// Closest candidate by edit distance, if it is plausibly a typo.
fn suggest<'a>(word: &str, candidates: &[&'a str]) -> Option<&'a str> {
    candidates
        .iter()
        .map(|c| (strsim::levenshtein(word, c), *c))
        .filter(|&(d, c)| d <= 2.max(c.len() / 4) && d < c.len())
        .min_by_key(|&(d, _)| d)
        .map(|(_, c)| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_config("phantom = \"rect_inclusion\"\nengine = \"levelset\"\n").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn overlapping_profiles_are_rejected() {
        let err = parse_config("[measurement]\ncount = 3\nhalf_width = 0.2\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Config(_)));
        assert!(msg.contains("overlap"), "{msg}");
    }

    #[test]
    fn typo_gets_suggestion() {
        let msg = parse_config("[model]\nlamda = 0.2\n")
            .unwrap_err()
            .to_string();
        assert!(
            msg.contains("model.lamda") && msg.contains("model.lambda"),
            "{msg}"
        );
        assert!(msg.contains("line 2"), "{msg}");
        let bare = parse_config("lamda = 0.2\n").unwrap_err().to_string();
        assert!(bare.contains("\"model.lambda\""), "{bare}");
    }

    #[test]
    fn range_errors_are_listed_together() {
        let msg =
            parse_config("[model]\nlambda = -1\n[engine]\ntau = 0.5\n[measurement]\nnoise = 2\n")
                .unwrap_err()
                .to_string();
        for k in ["lambda", "tau", "noise"] {
            assert!(msg.contains(k), "{k} missing from {msg}");
        }
    }

    #[test]
    fn inapplicable_key_is_rejected() {
        let msg = parse_config("[phantom]\nkind = \"oscillating_junction\"\nx0 = 0.1\n")
            .unwrap_err()
            .to_string();
        assert!(msg.contains("phantom.x0"), "{msg}");
    }

    #[test]
    fn wrong_type_and_value() {
        let msg = parse_config("[grid]\nn = \"big\"\n[engine]\nname = \"levelsett\"\n")
            .unwrap_err()
            .to_string();
        assert!(
            msg.contains("grid.n") && msg.contains("\"levelset\""),
            "{msg}"
        );
    }

    #[test]
    fn effective_config_round_trips() {
        let src = "[phantom]\nkind = \"oscillating_junction\"\namplitude = 0.1\n\
                   [measurement]\nkind = \"averaged_unipolar\"\ncount = 3\nnoise = 0.01\n\
                   [engine]\nname = \"kaczmarz\"\nstep_scale = 0.5\n";
        let cfg = parse_config(src).unwrap();
        let again = parse_config(&cfg.to_toml()).unwrap();
        assert_eq!(
            ExperimentConfig {
                output_dir: cfg.output_dir.clone(),
                ..again
            },
            cfg
        );
        let ls = ExperimentConfig::default();
        assert_eq!(parse_config(&ls.to_toml()).unwrap(), ls);
    }

    #[test]
    fn syntax_error_reports_position() {
        let msg = parse_config("[grid]\nn = = 3\n").unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }
}
