//! `dopinv`: runs synthetic doping-reconstruction experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dopinv_core::forward::{DeviceModel, MeasurementKind, ModelParams};
use dopinv_core::harness::{
    exit_code, load_config, preset, run_experiment, ExperimentConfig, PRESETS,
};
use dopinv_core::oracle;
use dopinv_core::{Error, SolverOptions};

// Writes to stdout, ignoring a closed pipe (`dopinv ... | head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

macro_rules! put {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "dopinv",
    version,
    about = "Doping-profile reconstruction experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a configuration file or a preset.
    Run {
        /// Configuration file (TOML).
        config: Option<PathBuf>,
        /// Use a named preset instead of a file.
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the iteration cap.
        #[arg(long)]
        max_iter: Option<usize>,
        /// Record wall time in the log and summary.
        #[arg(long)]
        timing: bool,
    },
    /// List the presets, or print or export their configuration files.
    Presets {
        /// Print the configuration of one preset.
        #[arg(long)]
        show: Option<String>,
        /// Write every preset as `<name>.toml` into this directory.
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Check a configuration file and print the effective configuration.
    Validate { config: PathBuf },
    /// Run an independent reference computation.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Convergence order of the diffusion solver on a manufactured solution.
    Manufactured,
    /// Newton against the fixed-point equilibrium solve.
    Equilibrium {
        #[arg(long, default_value_t = 81)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
    },
    /// Production measurements against dense direct elimination.
    Dense {
        #[arg(long, default_value_t = 21)]
        n: usize,
    },
    /// Adjoint identity for random pairs, all measurement kinds.
    Adjoint {
        #[arg(long, default_value_t = 21)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Central differences against the linearized derivative.
    Derivative {
        #[arg(long, default_value_t = 21)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        directions: usize,
        #[arg(long, default_value_t = 1e-5)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Convergence order of the γ ↔ C conversions.
    Roundtrip,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(code) = configure_threads() {
        return code;
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("dopinv: {msg}");
            ExitCode::from(code)
        }
    }
}

/// Sizes the global thread pool from `DOPINV_THREADS`.
fn configure_threads() -> Result<(), ExitCode> {
    let Ok(v) = std::env::var("DOPINV_THREADS") else {
        return Ok(());
    };
    match v.trim().parse::<usize>() {
        Ok(t) if t > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| {
                eprintln!("dopinv: cannot size thread pool: {e}");
                ExitCode::from(3)
            }),
        _ => {
            eprintln!("dopinv: DOPINV_THREADS must be a positive integer, got {v:?}");
            Err(ExitCode::from(2))
        }
    }
}

type Outcome = Result<(), (u8, String)>;

fn fail(e: Error) -> (u8, String) {
    (exit_code(&e) as u8, e.to_string())
}

fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Run {
            config,
            preset: name,
            out,
            seed,
            max_iter,
            timing,
        } => {
            let mut cfg = match (config, name) {
                (Some(path), None) => load_config(&path).map_err(fail)?,
                (None, Some(name)) => preset(&name).map_err(fail)?,
                _ => return Err((2, "give a configuration file or --preset NAME".into())),
            };
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(m) = max_iter {
                cfg.max_iter = m;
            }
            cfg.timing |= timing;
            run(&cfg)
        }
        Command::Presets { show, write } => {
            if let Some(name) = show {
                let p = PRESETS
                    .iter()
                    .find(|p| p.name == name)
                    .ok_or_else(|| fail(preset(&name).unwrap_err()))?;
                put!("{}", p.toml);
                return Ok(());
            }
            if let Some(dir) = write {
                std::fs::create_dir_all(&dir).map_err(|e| fail(e.into()))?;
                for p in PRESETS {
                    std::fs::write(dir.join(format!("{}.toml", p.name)), p.toml)
                        .map_err(|e| fail(e.into()))?;
                }
            }
            for p in PRESETS {
                say!("{:<14} {}", p.name, p.description);
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load_config(&config).map_err(fail)?;
            say!("# output directory: {}", cfg.output_dir.display());
            put!("{}", cfg.to_toml());
            Ok(())
        }
        Command::Oracle { which } => run_oracle(which).map_err(fail),
    }
}

fn run(cfg: &ExperimentConfig) -> Outcome {
    let s = run_experiment(cfg).map_err(|e| (e.exit_code() as u8, e.to_string()))?;
    say!(
        "{} run: {} steps, stop {}, residual {:.4e} (delta {:.4e}), relative L2 error {:.4}, symmetric-difference area {:.4}",
        s.engine, s.steps, s.stop, s.final_residual, s.delta, s.relative_l2_error, s.sym_diff_area
    );
    say!("outputs in {}", cfg.output_dir.display());
    Ok(())
}

fn run_oracle(which: OracleCommand) -> dopinv_core::Result<()> {
    let opts = SolverOptions::default();
    match which {
        OracleCommand::Manufactured => {
            let ns = [21, 41, 81];
            let errs = ns
                .iter()
                .map(|&n| oracle::manufactured_diffusion_error(n, &opts))
                .collect::<dopinv_core::Result<Vec<_>>>()?;
            for (n, e) in ns.iter().zip(&errs) {
                say!("n = {n:>3}  sup error {e:.4e}");
            }
            say!("observed orders {:?}", oracle::observed_orders(&errs));
        }
        OracleCommand::Equilibrium { n, lambda } => {
            let params = ModelParams {
                lambda,
                ..ModelParams::default()
            };
            let gap = oracle::equilibrium_check(n, &params)?;
            say!("n = {n}, lambda = {lambda}: sup |V_newton - V_fixed_point| = {gap:.3e}");
        }
        OracleCommand::Dense { n } => {
            let gap = oracle::dense_measure_check(n)?;
            say!("n = {n}: max |measure - dense elimination| = {gap:.3e}");
        }
        OracleCommand::Adjoint { n, pairs, seed } => {
            for kind in MeasurementKind::ALL {
                let gap = oracle::adjoint_check(n, kind, pairs, seed)?;
                say!("{:<20} worst relative adjoint gap {gap:.3e}", kind.name());
            }
        }
        OracleCommand::Derivative {
            n,
            directions,
            t,
            seed,
        } => {
            for kind in MeasurementKind::ALL {
                let gap = oracle::derivative_check(n, kind, directions, t, seed)?;
                say!(
                    "{:<20} worst relative difference-quotient gap {gap:.3e}",
                    kind.name()
                );
            }
        }
        OracleCommand::Roundtrip => {
            let ns = [21, 41, 81];
            let params = ModelParams::default();
            for model in [DeviceModel::Unipolar, DeviceModel::Bipolar] {
                let errs = ns
                    .iter()
                    .map(|&n| oracle::roundtrip_errors(n, &params, model, &opts))
                    .collect::<dopinv_core::Result<Vec<_>>>()?;
                let g: Vec<f64> = errs.iter().map(|e| e.0).collect();
                let c: Vec<f64> = errs.iter().map(|e| e.1).collect();
                for (n, (eg, ec)) in ns.iter().zip(&errs) {
                    say!("{model:?} n = {n:>3}  gamma error {eg:.4e}  doping error {ec:.4e}");
                }
                say!(
                    "{model:?} observed orders: gamma {:.3?}, doping {:.3?}",
                    oracle::observed_orders(&g),
                    oracle::observed_orders(&c)
                );
            }
        }
    }
    Ok(())
}
