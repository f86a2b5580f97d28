//! Physical parameters, γ ↔ C conversions and the measurement operators.

mod io;
mod model;
pub mod params;
mod profiles;

pub use io::MeasurementSet;
pub use model::{
    forward_adjoint, forward_derivative, forward_map, measure, ForwardModel, Linearization,
    MeasurementKind, Observation, Outputs,
};
pub use params::{
    builtin_potential, builtin_value, doping_from_gamma, gamma_from_doping, junction_gamma,
    neutral_electron_density, neutral_hole_density, recombination_rate, slotboom_to_densities,
    DeviceModel, ModelParams, RecombinationConstants, RecombinationModel,
};
pub use profiles::{default_half_width, make_voltage_profiles, VoltageProfile};
