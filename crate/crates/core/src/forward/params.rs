//! Scaled model constants and the pointwise physics formulas.

use crate::elliptic::{self, DirichletData, SolverOptions};
use crate::error::{Error, Result};
use crate::grid::{laplacian, BoundaryTrace, ScalarField, Segment};

/// Physical constants in scaled units (potentials in multiples of `U_T`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Scaled Debye length λ.
    pub lambda: f64,
    /// Intrinsic density `n_i` (δ² in the scaled equations).
    pub n_i: f64,
    pub mu_n: f64,
    pub mu_p: f64,
    /// Thermal voltage, only used to report unscaled potentials.
    pub u_t: f64,
    /// Lower doping bound `C_m`.
    pub c_min: f64,
    /// Upper doping bound `C_M`.
    pub c_max: f64,
}

impl Default for ModelParams {
    /// Desk-scale values: unit intrinsic density, mobility ratio 1500:450.
    fn default() -> Self {
        ModelParams {
            lambda: 0.1,
            n_i: 1.0,
            mu_n: 1.0,
            mu_p: 0.3,
            u_t: 0.025_852,
            c_min: -5.0,
            c_max: 5.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        for (name, v) in [
            ("lambda", self.lambda),
            ("n_i", self.n_i),
            ("mu_n", self.mu_n),
            ("mu_p", self.mu_p),
            ("u_t", self.u_t),
        ] {
            if !(v.is_finite() && v > 0.0) {
                bad.push(format!("{name} must be a positive number, got {v}"));
            }
        }
        if !(self.c_min.is_finite() && self.c_max.is_finite() && self.c_min < self.c_max) {
            bad.push(format!(
                "doping bounds need c_min < c_max, got [{}, {}]",
                self.c_min, self.c_max
            ));
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }

    /// Admissible γ range matching the doping bounds `[C_m, C_M]`.
    pub fn gamma_bounds(&self, model: DeviceModel) -> (f64, f64) {
        (
            junction_gamma(self.c_min, self, model),
            junction_gamma(self.c_max, self, model),
        )
    }
}

/// Carrier model of the linearized device.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeviceModel {
    /// Electrons only (`p ≡ 0`).
    Unipolar,
    /// Electrons and holes.
    Bipolar,
}

/// Electron density `n_D = (C + √(C² + 4 n_i²)) / 2` of the charge-neutral
/// equilibrium, evaluated without cancellation for strongly negative `C`.
pub fn neutral_electron_density(c: f64, n_i: f64) -> f64 {
    let root = (c * c + 4.0 * n_i * n_i).sqrt();
    if c >= 0.0 {
        0.5 * (c + root)
    } else {
        2.0 * n_i * n_i / (root - c)
    }
}

/// Hole density `p_D = (−C + √(C² + 4 n_i²)) / 2`.
pub fn neutral_hole_density(c: f64, n_i: f64) -> f64 {
    neutral_electron_density(-c, n_i)
}

/// Scaled built-in potential `ln(n_D / n_i)`.
pub fn builtin_value(c: f64, n_i: f64) -> f64 {
    (neutral_electron_density(c, n_i) / n_i).ln()
}

/// Built-in potential restricted to the two contacts.
pub fn builtin_potential(c: &ScalarField, params: &ModelParams) -> DirichletData {
    let g = c.grid();
    let restrict = |seg: Segment| BoundaryTrace {
        segment: seg,
        values: c
            .trace(seg)
            .values
            .into_iter()
            .map(|v| builtin_value(v, params.n_i))
            .collect(),
    };
    DirichletData::from_traces(&g, restrict(Segment::Gamma0), restrict(Segment::Gamma1))
        .expect("traces built from the same grid")
}

/// γ of a region with doping `c` far from any junction (λ → 0 limit):
/// `μ_n e^{V_bi}` for the unipolar model, `e^{V_bi}` for the bipolar one.
pub fn junction_gamma(c: f64, params: &ModelParams, model: DeviceModel) -> f64 {
    let e = neutral_electron_density(c, params.n_i) / params.n_i;
    match model {
        DeviceModel::Unipolar => params.mu_n * e,
        DeviceModel::Bipolar => e,
    }
}

/// Carrier densities from Slotboom variables: `n = n_i e^V u`, `p = n_i e^{−V} v`.
pub fn slotboom_to_densities(
    potential: &ScalarField,
    u: &ScalarField,
    v: &ScalarField,
    params: &ModelParams,
) -> Result<(ScalarField, ScalarField)> {
    let g = potential.grid();
    if u.grid() != g || v.grid() != g {
        return Err(Error::Dimension(
            "Slotboom fields live on different grids".into(),
        ));
    }
    let n_i = params.n_i;
    let n = potential.zip_map(u, |pot, uu| n_i * pot.exp() * uu);
    let p = potential.zip_map(v, |pot, vv| n_i * (-pot).exp() * vv);
    if !(n.is_finite() && p.is_finite()) {
        return Err(Error::Domain("carrier densities overflow".into()));
    }
    Ok((n, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecombinationModel {
    ShockleyReadHall,
    Auger,
}

/// Constants of the recombination models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecombinationConstants {
    pub c_n: f64,
    pub c_p: f64,
    pub tau_n: f64,
    pub tau_p: f64,
    pub n_i: f64,
    /// Use `τ_p` in both terms of the SRH denominator instead of `τ_n` on the
    /// hole term. Off by default.
    pub srh_tau_p_twice: bool,
}

impl RecombinationConstants {
    /// Silicon at room temperature (cm⁶/s and s).
    pub fn silicon(n_i: f64) -> Self {
        RecombinationConstants {
            c_n: 2.8e-31,
            c_p: 9.9e-32,
            tau_n: 1e-6,
            tau_p: 1e-5,
            n_i,
            srh_tau_p_twice: false,
        }
    }
}

/// `R = 𝓡(n, p) (n p − n_i²)`.
pub fn recombination_rate(
    n: &ScalarField,
    p: &ScalarField,
    model: RecombinationModel,
    k: &RecombinationConstants,
) -> Result<ScalarField> {
    if n.grid() != p.grid() {
        return Err(Error::Dimension("densities live on different grids".into()));
    }
    if n.min() < 0.0 || p.min() < 0.0 {
        return Err(Error::Domain(
            "carrier densities must be nonnegative".into(),
        ));
    }
    let ni2 = k.n_i * k.n_i;
    let tau_second = if k.srh_tau_p_twice { k.tau_p } else { k.tau_n };
    Ok(n.zip_map(p, |n, p| {
        let rate = match model {
            RecombinationModel::ShockleyReadHall => {
                1.0 / (k.tau_p * (n + k.n_i) + tau_second * (p + k.n_i))
            }
            RecombinationModel::Auger => k.c_n * n + k.c_p * p,
        };
        rate * (n * p - ni2)
    }))
}

/// γ from a doping profile via the equilibrium potential:
/// `μ_n e^{V⁰}` (unipolar) or `e^{V⁰}` (bipolar).
pub fn gamma_from_doping(
    c: &ScalarField,
    params: &ModelParams,
    model: DeviceModel,
    opts: &SolverOptions,
) -> Result<ScalarField> {
    let v0 = elliptic::solve_equilibrium_potential(c, params, model, opts)?;
    Ok(potential_to_gamma(&v0, params, model))
}

pub(crate) fn potential_to_gamma(
    v0: &ScalarField,
    params: &ModelParams,
    model: DeviceModel,
) -> ScalarField {
    match model {
        DeviceModel::Unipolar => v0.map(|v| params.mu_n * v.exp()),
        DeviceModel::Bipolar => v0.map(f64::exp),
    }
}

/// Inverts [`gamma_from_doping`] with the discrete Laplacian:
/// `C = n_i γ/μ_n − λ² Δ ln(γ/μ_n)` (unipolar),
/// `C = n_i (γ − γ⁻¹) − λ² Δ ln γ` (bipolar).
pub fn doping_from_gamma(
    gamma: &ScalarField,
    params: &ModelParams,
    model: DeviceModel,
) -> Result<ScalarField> {
    if let Some(k) = gamma.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::CoefficientBound {
            node: k,
            value: gamma.values()[k],
        });
    }
    let l2 = params.lambda * params.lambda;
    let n_i = params.n_i;
    let c = match model {
        DeviceModel::Unipolar => {
            let ratio = gamma.map(|g| g / params.mu_n);
            let lap = laplacian(&ratio.map(f64::ln));
            ratio.zip_map(&lap, |r, l| n_i * r - l2 * l)
        }
        DeviceModel::Bipolar => {
            let lap = laplacian(&gamma.map(f64::ln));
            gamma.zip_map(&lap, |g, l| n_i * (g - 1.0 / g) - l2 * l)
        }
    };
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn builtin_potential_examples() {
        let g = Grid::new(5).unwrap();
        let p = ModelParams::default();
        let bc = builtin_potential(&ScalarField::zeros(g), &p);
        assert!(bc.on_gamma0().values.iter().all(|&v| v == 0.0));
        let two = builtin_value(2.0, 1.0);
        assert!((two - (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
        assert!((two - 0.8814).abs() < 1e-4);
        assert!((builtin_value(-2.0, 1.0) + two).abs() < 1e-15);
        // Strongly negative doping stays finite.
        assert!(builtin_value(-1e12, 1.0).is_finite());
    }

    #[test]
    fn slotboom_examples() {
        let g = Grid::new(4).unwrap();
        let p = ModelParams::default();
        let one = ScalarField::constant(g, 1.0);
        let (n, h) = slotboom_to_densities(&ScalarField::zeros(g), &one, &one, &p).unwrap();
        assert!(n.values().iter().chain(h.values()).all(|&v| v == 1.0));

        let pot = ScalarField::from_fn(g, |x, y| 3.0 * x - y);
        let (n, h) = slotboom_to_densities(&pot, &one, &one, &p).unwrap();
        for (a, b) in n.values().iter().zip(h.values()) {
            assert!((a * b - 1.0).abs() < 1e-12);
        }

        let (n, h) = slotboom_to_densities(
            &ScalarField::constant(g, 2f64.ln()),
            &ScalarField::constant(g, 3.0),
            &ScalarField::constant(g, 5.0),
            &p,
        )
        .unwrap();
        assert!((n.values()[0] - 6.0).abs() < 1e-12);
        assert!((h.values()[0] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn recombination_examples() {
        let g = Grid::new(3).unwrap();
        let k = RecombinationConstants::silicon(1.0);
        let n = ScalarField::constant(g, 4.0);
        let p = ScalarField::constant(g, 0.25);
        for model in [
            RecombinationModel::ShockleyReadHall,
            RecombinationModel::Auger,
        ] {
            let r = recombination_rate(&n, &p, model, &k).unwrap();
            assert_eq!(r.max_abs(), 0.0);
        }

        let k = RecombinationConstants {
            c_n: 0.7,
            c_p: 0.2,
            tau_n: 1.0,
            tau_p: 1.0,
            n_i: 0.0,
            srh_tau_p_twice: false,
        };
        let r = recombination_rate(
            &ScalarField::constant(g, 1.0),
            &ScalarField::zeros(g),
            RecombinationModel::Auger,
            &k,
        )
        .unwrap();
        assert_eq!(r.max_abs(), 0.0);
        let k = RecombinationConstants { n_i: 1.0, ..k };
        let r = recombination_rate(
            &ScalarField::constant(g, 1.0),
            &ScalarField::constant(g, 2.0),
            RecombinationModel::Auger,
            &k,
        )
        .unwrap();
        assert!((r.values()[0] - (0.7 + 2.0 * 0.2)).abs() < 1e-15);
    }

    #[test]
    fn srh_uses_both_lifetimes_unless_switched() {
        let g = Grid::new(3).unwrap();
        let k = RecombinationConstants::silicon(1.0);
        assert_eq!(k.tau_n, 1e-6);
        assert_eq!(k.tau_p, 1e-5);
        let n = ScalarField::constant(g, 3.0);
        let p = ScalarField::constant(g, 2.0);
        let r = recombination_rate(&n, &p, RecombinationModel::ShockleyReadHall, &k).unwrap();
        let expect = 5.0 / (1e-5 * 4.0 + 1e-6 * 3.0);
        assert!((r.values()[0] / expect - 1.0).abs() < 1e-14);
        let literal = RecombinationConstants {
            srh_tau_p_twice: true,
            ..k
        };
        let r = recombination_rate(&n, &p, RecombinationModel::ShockleyReadHall, &literal).unwrap();
        let expect = 5.0 / (1e-5 * 4.0 + 1e-5 * 3.0);
        assert!((r.values()[0] / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn doping_from_constant_gamma() {
        let g = Grid::new(9).unwrap();
        let p = ModelParams {
            mu_n: 3.0,
            ..ModelParams::default()
        };
        let c = doping_from_gamma(
            &ScalarField::constant(g, 3.0 * 0.7),
            &p,
            DeviceModel::Unipolar,
        )
        .unwrap();
        assert!(c.values().iter().all(|v| (v - 0.7).abs() < 1e-12));
        let c =
            doping_from_gamma(&ScalarField::constant(g, 1.0), &p, DeviceModel::Bipolar).unwrap();
        assert!(c.max_abs() < 1e-12);
        assert!(matches!(
            doping_from_gamma(&ScalarField::constant(g, 0.0), &p, DeviceModel::Bipolar),
            Err(Error::CoefficientBound { .. })
        ));
    }

    #[test]
    fn gamma_bounds_are_ordered() {
        let p = ModelParams::default();
        for m in [DeviceModel::Unipolar, DeviceModel::Bipolar] {
            let (lo, hi) = p.gamma_bounds(m);
            assert!(0.0 < lo && lo < hi);
        }
    }
}
