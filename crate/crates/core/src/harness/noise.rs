//! Norm-calibrated additive noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forward::Outputs;

/// Adds uniform noise rescaled so that `‖Y^δ − Y‖ = δ_rel ‖Y‖` in the
/// output-space norm. Returns the noisy data and the absolute level δ.
pub fn add_noise(y: &Outputs, delta_rel: f64, seed: u64) -> Result<(Outputs, f64)> {
    if !(delta_rel >= 0.0 && delta_rel.is_finite()) {
        return Err(Error::Domain(format!(
            "relative noise level must be nonnegative, got {delta_rel}"
        )));
    }
    if delta_rel == 0.0 {
        return Ok((y.clone(), 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eta = y.clone();
    for v in eta.components_mut().iter_mut().flatten() {
        *v = rng.gen_range(-1.0..=1.0);
    }
    let delta = delta_rel * y.norm();
    let raw = eta.norm();
    if raw == 0.0 || delta == 0.0 {
        return Ok((y.clone(), 0.0));
    }
    let noisy = y.add_scaled(delta / raw, &eta)?;
    Ok((noisy, delta))
}
