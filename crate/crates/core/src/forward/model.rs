//! Parameter-to-output map, its derivative and its adjoint.
//!
//! Each carrier solves `div(κ ∇u) = 0` with contact data and the current it
//! delivers to Γ₁ is read off the discrete flux balance of the contact dual
//! cells, `(K(κ) u)_b`. The measured trace is that flux divided by the dual
//! edge length, so the trapezoid integral over Γ₁ is the exact discrete
//! total current. Derivative and adjoint are differentiated from the same
//! discrete expressions, which makes the adjoint the exact transpose.

use rayon::prelude::*;

use super::params::{DeviceModel, ModelParams};
use super::profiles::VoltageProfile;
use crate::elliptic::operator::{harmonic_grad, x_face_factor, y_face_factor, FaceOperator};
use crate::elliptic::{check_coefficient, dirichlet_mask, SolverOptions};
use crate::error::{Error, Result};
use crate::grid::{BoundaryTrace, Grid, ScalarField, Segment};

/// Which current is recorded on Γ₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    /// Trace `γ û_ν` (unipolar).
    PointwiseUnipolar,
    /// Total current `∫_Γ₁ γ û_ν ds` (unipolar).
    AveragedUnipolar,
    /// Trace `μ_n γ û_ν − μ_p γ⁻¹ v̂_ν` (bipolar).
    PointwiseBipolar,
}

impl MeasurementKind {
    pub const ALL: [MeasurementKind; 3] = [
        MeasurementKind::PointwiseUnipolar,
        MeasurementKind::AveragedUnipolar,
        MeasurementKind::PointwiseBipolar,
    ];

    pub fn model(self) -> DeviceModel {
        match self {
            MeasurementKind::PointwiseBipolar => DeviceModel::Bipolar,
            _ => DeviceModel::Unipolar,
        }
    }

    pub fn is_pointwise(self) -> bool {
        !matches!(self, MeasurementKind::AveragedUnipolar)
    }

    pub fn name(self) -> &'static str {
        match self {
            MeasurementKind::PointwiseUnipolar => "pointwise_unipolar",
            MeasurementKind::AveragedUnipolar => "averaged_unipolar",
            MeasurementKind::PointwiseBipolar => "pointwise_bipolar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        MeasurementKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// One measured output: a Γ₁ trace or a scalar current.
#[derive(Debug, Clone, PartialEq)]
pub enum Observation {
    Trace(BoundaryTrace),
    Current(f64),
}

/// Element of the output space: one component per voltage profile.
///
/// Pointwise components hold the Γ₁ trace and use the trapezoid inner
/// product; averaged components hold a single current.
#[derive(Debug, Clone, PartialEq)]
pub struct Outputs {
    kind: MeasurementKind,
    components: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl Outputs {
    pub fn new(grid: &Grid, kind: MeasurementKind, components: Vec<Vec<f64>>) -> Result<Self> {
        let weights = output_weights(grid, kind);
        if let Some(c) = components.iter().find(|c| c.len() != weights.len()) {
            return Err(Error::Dimension(format!(
                "{} components need {} values, got {}",
                kind.name(),
                weights.len(),
                c.len()
            )));
        }
        Ok(Outputs {
            kind,
            components,
            weights,
        })
    }

    pub fn zeros(grid: &Grid, kind: MeasurementKind, count: usize) -> Self {
        let weights = output_weights(grid, kind);
        Outputs {
            kind,
            components: vec![vec![0.0; weights.len()]; count],
            weights,
        }
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    /// Number of components `N`.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component(&self, j: usize) -> &[f64] {
        &self.components[j]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.components
    }

    /// Output-space weights of one component.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn observation(&self, j: usize) -> Observation {
        if self.kind.is_pointwise() {
            Observation::Trace(BoundaryTrace {
                segment: Segment::Gamma1,
                values: self.components[j].clone(),
            })
        } else {
            Observation::Current(self.components[j][0])
        }
    }

    /// Single-component view of component `j`.
    pub fn select(&self, j: usize) -> Outputs {
        Outputs {
            kind: self.kind,
            components: vec![self.components[j].clone()],
            weights: self.weights.clone(),
        }
    }

    fn check_compatible(&self, other: &Outputs) -> Result<()> {
        if self.kind != other.kind
            || self.components.len() != other.components.len()
            || self.weights.len() != other.weights.len()
        {
            return Err(Error::Dimension(format!(
                "output spaces differ: {} × {} vs {} × {}",
                self.kind.name(),
                self.components.len(),
                other.kind.name(),
                other.components.len()
            )));
        }
        Ok(())
    }

    pub fn component_dot(&self, other: &Outputs, j: usize) -> f64 {
        self.components[j]
            .iter()
            .zip(&other.components[j])
            .zip(&self.weights)
            .map(|((a, b), w)| w * a * b)
            .sum()
    }

    pub fn dot(&self, other: &Outputs) -> f64 {
        (0..self.components.len())
            .map(|j| self.component_dot(other, j))
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn component_norm(&self, j: usize) -> f64 {
        self.component_dot(self, j).sqrt()
    }

    /// `self − other`.
    pub fn sub(&self, other: &Outputs) -> Result<Outputs> {
        self.check_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Outputs {
            kind: self.kind,
            components,
            weights: self.weights.clone(),
        })
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: f64, other: &Outputs) -> Result<Outputs> {
        self.check_compatible(other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + s * y).collect())
            .collect();
        Ok(Outputs {
            kind: self.kind,
            components,
            weights: self.weights.clone(),
        })
    }

    pub fn scaled(&self, s: f64) -> Outputs {
        Outputs {
            kind: self.kind,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|v| s * v).collect())
                .collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().flatten().all(|v| v.is_finite())
    }
}

fn output_weights(grid: &Grid, kind: MeasurementKind) -> Vec<f64> {
    if kind.is_pointwise() {
        grid.segment_weights(Segment::Gamma1)
    } else {
        vec![1.0]
    }
}

/// Forward operator `F`: γ ↦ measured currents for a fixed set of voltages.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    grid: Grid,
    kind: MeasurementKind,
    profiles: Vec<VoltageProfile>,
    params: ModelParams,
    opts: SolverOptions,
}

/// One diffusion problem `div(κ ∇u) = 0` per profile, sharing `κ`.
struct Carrier {
    kappa: Vec<f64>,
    op: FaceOperator,
    /// Sign applied to the profile data (−1 for electrons in the bipolar model).
    data_sign: f64,
    /// Weight of this carrier's current in the measured output.
    output_sign: f64,
    /// dκ/dγ per node.
    dkappa: Vec<f64>,
}

/// `F` and the states needed for `F′(γ)` and `F′(γ)*` at a fixed γ.
pub struct Linearization<'a> {
    model: &'a ForwardModel,
    carriers: Vec<Carrier>,
    /// `states[c][j]`: full nodal solution of carrier `c` for profile `j`.
    states: Vec<Vec<Vec<f64>>>,
    outputs: Outputs,
    fixed: Vec<bool>,
}

impl ForwardModel {
    pub fn new(
        grid: Grid,
        kind: MeasurementKind,
        profiles: Vec<VoltageProfile>,
        params: ModelParams,
        opts: SolverOptions,
    ) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::Config(
                "at least one voltage profile is required".into(),
            ));
        }
        if let Some(p) = profiles
            .iter()
            .find(|p| p.values().values.len() != grid.n())
        {
            return Err(Error::Dimension(format!(
                "profile has {} values on Γ₀, grid has {}",
                p.values().values.len(),
                grid.n()
            )));
        }
        Ok(ForwardModel {
            grid,
            kind,
            profiles,
            params,
            opts,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn profiles(&self) -> &[VoltageProfile] {
        &self.profiles
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    pub fn with_options(mut self, opts: SolverOptions) -> Self {
        self.opts = opts;
        self
    }

    /// The single-profile component `F_j`.
    pub fn component(&self, j: usize) -> ForwardModel {
        ForwardModel {
            profiles: vec![self.profiles[j].clone()],
            ..self.clone()
        }
    }

    pub fn zero_outputs(&self) -> Outputs {
        Outputs::zeros(&self.grid, self.kind, self.profiles.len())
    }

    /// `F(γ)`.
    pub fn apply(&self, gamma: &ScalarField) -> Result<Outputs> {
        Ok(self.linearize(gamma)?.outputs)
    }

    /// `F′(γ) h`.
    pub fn derivative(&self, gamma: &ScalarField, h: &ScalarField) -> Result<Outputs> {
        self.linearize(gamma)?.derivative(h)
    }

    /// `F′(γ)* r` with respect to the L²(Ω) trapezoid inner product.
    pub fn adjoint(&self, gamma: &ScalarField, r: &Outputs) -> Result<ScalarField> {
        self.linearize(gamma)?.adjoint(r)
    }

    /// Solves all forward problems at γ and keeps the states.
    pub fn linearize(&self, gamma: &ScalarField) -> Result<Linearization<'_>> {
        if gamma.grid() != self.grid {
            return Err(Error::Dimension(
                "coefficient lives on a different grid".into(),
            ));
        }
        check_coefficient(gamma.values())?;
        let p = &self.params;
        let carriers = match self.kind {
            MeasurementKind::PointwiseUnipolar | MeasurementKind::AveragedUnipolar => {
                vec![Carrier::new(
                    self.grid,
                    gamma.values().to_vec(),
                    vec![1.0; self.grid.len()],
                    1.0,
                    1.0,
                )]
            }
            MeasurementKind::PointwiseBipolar => {
                let g = gamma.values();
                vec![
                    Carrier::new(
                        self.grid,
                        g.iter().map(|v| p.mu_n * v).collect(),
                        vec![p.mu_n; g.len()],
                        -1.0,
                        1.0,
                    ),
                    Carrier::new(
                        self.grid,
                        g.iter().map(|v| p.mu_p / v).collect(),
                        g.iter().map(|v| -p.mu_p / (v * v)).collect(),
                        1.0,
                        -1.0,
                    ),
                ]
            }
        };
        let fixed = dirichlet_mask(&self.grid);
        let states = carriers
            .iter()
            .map(|c| {
                self.profiles
                    .par_iter()
                    .map(|prof| {
                        let mut u = vec![0.0; self.grid.len()];
                        prof.dirichlet(&self.grid, c.data_sign)
                            .fill(&self.grid, &mut u);
                        if !prof.is_zero() {
                            c.op.solve(
                                &fixed,
                                &vec![0.0; self.grid.len()],
                                &mut u,
                                self.opts.linear_tol,
                                self.opts.linear_max_iter,
                            )?;
                        }
                        Ok(u)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;

        let top = self.grid.segment_nodes(Segment::Gamma1);
        let weights = self.grid.segment_weights(Segment::Gamma1);
        let mut components = vec![vec![0.0; top.len()]; self.profiles.len()];
        let mut ku = vec![0.0; self.grid.len()];
        for (c, carrier) in carriers.iter().enumerate() {
            for (j, u) in states[c].iter().enumerate() {
                carrier.op.apply(u, &mut ku);
                for (b, &k) in top.iter().enumerate() {
                    components[j][b] += carrier.output_sign * ku[k];
                }
            }
        }
        let components = components
            .into_iter()
            .map(|flux| {
                if self.kind.is_pointwise() {
                    flux.iter().zip(&weights).map(|(f, w)| f / w).collect()
                } else {
                    vec![flux.iter().sum()]
                }
            })
            .collect();
        let outputs = Outputs::new(&self.grid, self.kind, components)?;
        Ok(Linearization {
            model: self,
            carriers,
            states,
            outputs,
            fixed,
        })
    }
}

impl Carrier {
    fn new(
        grid: Grid,
        kappa: Vec<f64>,
        dkappa: Vec<f64>,
        data_sign: f64,
        output_sign: f64,
    ) -> Self {
        let op = FaceOperator::stiffness(grid, &kappa);
        Carrier {
            kappa,
            op,
            data_sign,
            output_sign,
            dkappa,
        }
    }

    /// Applies `K′(κ)[dκ]` to `u`.
    fn apply_dk(&self, grid: &Grid, dk: &[f64], u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let n = grid.n();
        let kap = &self.kappa;
        for j in 0..n {
            for i in 0..n {
                let k = grid.idx(i, j);
                if i + 1 < n {
                    let (ga, gb) = harmonic_grad(kap[k], kap[k + 1]);
                    let dc = x_face_factor(grid, j) * (ga * dk[k] + gb * dk[k + 1]);
                    let d = dc * (u[k] - u[k + 1]);
                    out[k] += d;
                    out[k + 1] -= d;
                }
                if j + 1 < n {
                    let (ga, gb) = harmonic_grad(kap[k], kap[k + n]);
                    let dc = y_face_factor(grid, i) * (ga * dk[k] + gb * dk[k + n]);
                    let d = dc * (u[k] - u[k + n]);
                    out[k] += d;
                    out[k + n] -= d;
                }
            }
        }
    }

    /// Gradient with respect to nodal κ of `wᵀ K(κ) u`, accumulated into `g`.
    fn accumulate_bilinear(&self, grid: &Grid, w: &[f64], u: &[f64], g: &mut [f64]) {
        let n = grid.n();
        let kap = &self.kappa;
        for j in 0..n {
            for i in 0..n {
                let k = grid.idx(i, j);
                if i + 1 < n {
                    let (ga, gb) = harmonic_grad(kap[k], kap[k + 1]);
                    let s = x_face_factor(grid, j) * (w[k] - w[k + 1]) * (u[k] - u[k + 1]);
                    g[k] += ga * s;
                    g[k + 1] += gb * s;
                }
                if j + 1 < n {
                    let (ga, gb) = harmonic_grad(kap[k], kap[k + n]);
                    let s = y_face_factor(grid, i) * (w[k] - w[k + n]) * (u[k] - u[k + n]);
                    g[k] += ga * s;
                    g[k + n] += gb * s;
                }
            }
        }
    }
}

impl Linearization<'_> {
    pub fn outputs(&self) -> &Outputs {
        &self.outputs
    }

    pub fn into_outputs(self) -> Outputs {
        self.outputs
    }

    fn solve(&self, carrier: &Carrier, rhs: &[f64], u: &mut [f64]) -> Result<()> {
        let opts = &self.model.opts;
        carrier
            .op
            .solve(&self.fixed, rhs, u, opts.linear_tol, opts.linear_max_iter)
            .map(|_| ())
    }

    /// `F′(γ) h`.
    pub fn derivative(&self, h: &ScalarField) -> Result<Outputs> {
        let model = self.model;
        let grid = model.grid;
        if h.grid() != grid {
            return Err(Error::Dimension(
                "direction lives on a different grid".into(),
            ));
        }
        let top = grid.segment_nodes(Segment::Gamma1);
        let weights = grid.segment_weights(Segment::Gamma1);
        let count = model.profiles.len();
        let mut flux = vec![vec![0.0; top.len()]; count];
        for (c, carrier) in self.carriers.iter().enumerate() {
            let dk: Vec<f64> = h
                .values()
                .iter()
                .zip(&carrier.dkappa)
                .map(|(a, b)| a * b)
                .collect();
            let per_profile = self.states[c]
                .par_iter()
                .map(|u| {
                    // d(K u) = dK u + K du, with K du = −dK u on the free rows.
                    let mut dku = vec![0.0; grid.len()];
                    carrier.apply_dk(&grid, &dk, u, &mut dku);
                    let rhs: Vec<f64> = dku.iter().map(|v| -v).collect();
                    let mut du = vec![0.0; grid.len()];
                    self.solve(carrier, &rhs, &mut du)?;
                    let mut kdu = vec![0.0; grid.len()];
                    carrier.op.apply(&du, &mut kdu);
                    Ok(top.iter().map(|&k| dku[k] + kdu[k]).collect::<Vec<f64>>())
                })
                .collect::<Result<Vec<_>>>()?;
            for (j, f) in per_profile.into_iter().enumerate() {
                for (acc, v) in flux[j].iter_mut().zip(f) {
                    *acc += carrier.output_sign * v;
                }
            }
        }
        let components = flux
            .into_iter()
            .map(|f| {
                if model.kind.is_pointwise() {
                    f.iter().zip(&weights).map(|(a, w)| a / w).collect()
                } else {
                    vec![f.iter().sum()]
                }
            })
            .collect();
        Outputs::new(&grid, model.kind, components)
    }

    /// `F′(γ)* r`, the L²(Ω) (trapezoid) adjoint of [`Self::derivative`].
    pub fn adjoint(&self, r: &Outputs) -> Result<ScalarField> {
        let model = self.model;
        let grid = model.grid;
        if r.kind() != model.kind || r.len() != model.profiles.len() {
            return Err(Error::Dimension(format!(
                "residual has {} components of kind {}, model expects {} of kind {}",
                r.len(),
                r.kind().name(),
                model.profiles.len(),
                model.kind.name()
            )));
        }
        let top = grid.segment_nodes(Segment::Gamma1);
        let mut grad = vec![0.0; grid.len()];
        for (c, carrier) in self.carriers.iter().enumerate() {
            let mut g_kappa = vec![0.0; grid.len()];
            if model.kind.is_pointwise() {
                let parts = self.states[c]
                    .par_iter()
                    .enumerate()
                    .map(|(j, u)| {
                        let rj = r.component(j);
                        let mut part = vec![0.0; grid.len()];
                        if rj.iter().all(|&v| v == 0.0) {
                            return Ok(part);
                        }
                        // Discrete harmonic extension of r_j from Γ₁.
                        let mut w = vec![0.0; grid.len()];
                        for (&k, &v) in top.iter().zip(rj) {
                            w[k] = v;
                        }
                        self.solve(carrier, &vec![0.0; grid.len()], &mut w)?;
                        carrier.accumulate_bilinear(&grid, &w, u, &mut part);
                        Ok(part)
                    })
                    .collect::<Result<Vec<_>>>()?;
                for part in parts {
                    for (a, b) in g_kappa.iter_mut().zip(part) {
                        *a += b;
                    }
                }
            } else {
                // The extension of a constant on Γ₁ is shared by all
                // profiles, so the sum collapses to a single bilinear form.
                let mut w = vec![0.0; grid.len()];
                for &k in &top {
                    w[k] = 1.0;
                }
                self.solve(carrier, &vec![0.0; grid.len()], &mut w)?;
                let mut mix = vec![0.0; grid.len()];
                for (j, u) in self.states[c].iter().enumerate() {
                    let rj = r.component(j)[0];
                    for (m, v) in mix.iter_mut().zip(u) {
                        *m += rj * v;
                    }
                }
                carrier.accumulate_bilinear(&grid, &w, &mix, &mut g_kappa);
            }
            for k in 0..grid.len() {
                grad[k] += carrier.output_sign * carrier.dkappa[k] * g_kappa[k];
            }
        }
        let mass = grid.mass();
        for (g, m) in grad.iter_mut().zip(&mass) {
            *g /= m;
        }
        Ok(ScalarField::from_vec(grid, grad))
    }
}

/// Measured output of a single profile.
pub fn measure(
    gamma: &ScalarField,
    profile: &VoltageProfile,
    kind: MeasurementKind,
    params: &ModelParams,
    opts: &SolverOptions,
) -> Result<Observation> {
    let model = ForwardModel::new(gamma.grid(), kind, vec![profile.clone()], *params, *opts)?;
    Ok(model.apply(gamma)?.observation(0))
}

/// `F(γ)` over all profiles, ordered by profile index.
pub fn forward_map(
    gamma: &ScalarField,
    profiles: &[VoltageProfile],
    kind: MeasurementKind,
    params: &ModelParams,
    opts: &SolverOptions,
) -> Result<Outputs> {
    ForwardModel::new(gamma.grid(), kind, profiles.to_vec(), *params, *opts)?.apply(gamma)
}

pub fn forward_derivative(
    gamma: &ScalarField,
    h: &ScalarField,
    profiles: &[VoltageProfile],
    kind: MeasurementKind,
    params: &ModelParams,
    opts: &SolverOptions,
) -> Result<Outputs> {
    ForwardModel::new(gamma.grid(), kind, profiles.to_vec(), *params, *opts)?.derivative(gamma, h)
}

pub fn forward_adjoint(
    gamma: &ScalarField,
    residual: &Outputs,
    profiles: &[VoltageProfile],
    kind: MeasurementKind,
    params: &ModelParams,
    opts: &SolverOptions,
) -> Result<ScalarField> {
    ForwardModel::new(gamma.grid(), kind, profiles.to_vec(), *params, *opts)?
        .adjoint(gamma, residual)
}
