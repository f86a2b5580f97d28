//! Phantoms, noise, configuration and experiment orchestration.

mod config;
mod experiment;
mod noise;
mod phantom;
mod presets;

pub use config::{
    load_config, parse_config, Alpha, EngineConfig, ExperimentConfig, InitialGuess,
    LandweberConfig, LevelSetConfig, TruthMode, KNOWN_KEYS,
};
pub use experiment::{
    classified_sym_diff, compute_experiment, exit_code, run_experiment, ExperimentError,
    ExperimentResult, ExperimentSummary, Stage, OUTPUT_FILES,
};
pub use noise::add_noise;
pub use phantom::{make_phantom, n_region_area, Phantom, PhantomKind};
pub use presets::{preset, Preset, PRESETS};
