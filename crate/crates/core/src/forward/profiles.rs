use crate::elliptic::DirichletData;
use crate::error::{Error, Result};
use crate::grid::{BoundaryTrace, Grid, Segment};

/// Applied voltage: an indicator on Γ₀, identically zero on Γ₁.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageProfile {
    values: BoundaryTrace,
    center: f64,
    half_width: f64,
}

impl VoltageProfile {
    /// `U(x) = 1` for `|x − center| ≤ half_width` on Γ₀, zero elsewhere.
    pub fn indicator(grid: &Grid, center: f64, half_width: f64) -> Self {
        // Nodes exactly on the support edge count as inside.
        let slack = 1e-12 * grid.h();
        let values = (0..grid.n())
            .map(|i| {
                if (grid.coord(i) - center).abs() <= half_width + slack {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        VoltageProfile {
            values: BoundaryTrace {
                segment: Segment::Gamma0,
                values,
            },
            center,
            half_width,
        }
    }

    /// `U ≡ 1` on all of Γ₀.
    pub fn full(grid: &Grid) -> Self {
        VoltageProfile::indicator(grid, 0.5, 0.5)
    }

    pub fn zero(grid: &Grid) -> Self {
        VoltageProfile {
            values: BoundaryTrace::constant(grid, Segment::Gamma0, 0.0),
            center: 0.5,
            half_width: 0.0,
        }
    }

    /// The same profile with amplitude `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut p = self.clone();
        for v in &mut p.values.values {
            *v *= s;
        }
        p
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Values on Γ₀, ordered by increasing `x`.
    pub fn values(&self) -> &BoundaryTrace {
        &self.values
    }

    /// Contact data `s·U` on Γ₀ and zero on Γ₁.
    pub(crate) fn dirichlet(&self, grid: &Grid, sign: f64) -> DirichletData {
        let g0 = BoundaryTrace {
            segment: Segment::Gamma0,
            values: self.values.values.iter().map(|v| sign * v).collect(),
        };
        DirichletData::from_traces(
            grid,
            g0,
            BoundaryTrace::constant(grid, Segment::Gamma1, 0.0),
        )
        .expect("profile built on this grid")
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.values.values.iter().all(|&v| v == 0.0)
    }
}

/// Largest default support: 90% of half the spacing between centres.
pub fn default_half_width(count: usize) -> f64 {
    0.45 / (count + 1) as f64
}

/// `count` indicators centred at `x_j = j / (count + 1)`, `j = 1..=count`.
pub fn make_voltage_profiles(
    count: usize,
    half_width: f64,
    grid: &Grid,
) -> Result<Vec<VoltageProfile>> {
    if count == 0 {
        return Err(Error::Config("need at least one voltage profile".into()));
    }
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::Config(format!(
            "half_width must be positive, got {half_width}"
        )));
    }
    let spacing = 1.0 / (count + 1) as f64;
    if count > 1 && 2.0 * half_width >= spacing {
        return Err(Error::Config(format!(
            "voltage profiles overlap: {count} centres are {spacing:.4} apart but each support is {:.4} wide",
            2.0 * half_width
        )));
    }
    let profiles: Vec<_> = (1..=count)
        .map(|j| VoltageProfile::indicator(grid, j as f64 * spacing, half_width))
        .collect();
    if let Some((j, _)) = profiles.iter().enumerate().find(|(_, p)| p.is_zero()) {
        return Err(Error::Config(format!(
            "profile {} covers no node of Γ₀; widen half_width or refine the grid",
            j + 1
        )));
    }
    Ok(profiles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centres_and_supports() {
        let g = Grid::new(41).unwrap();
        let p = make_voltage_profiles(1, 0.1, &g).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].center(), 0.5);
        assert_eq!(
            p[0].values().values.iter().filter(|&&v| v == 1.0).count(),
            9
        );

        let p = make_voltage_profiles(3, default_half_width(3), &g).unwrap();
        let c: Vec<f64> = p.iter().map(|q| q.center()).collect();
        assert_eq!(c, vec![0.25, 0.5, 0.75]);

        let g = Grid::new(101).unwrap();
        let p = make_voltage_profiles(25, default_half_width(25), &g).unwrap();
        assert_eq!(p.len(), 25);
        for i in 0..g.n() {
            let covering = p.iter().filter(|q| q.values().values[i] != 0.0).count();
            assert!(covering <= 1);
        }
    }

    #[test]
    fn overlap_is_rejected() {
        let g = Grid::new(41).unwrap();
        assert!(matches!(
            make_voltage_profiles(3, 0.2, &g),
            Err(Error::Config(_))
        ));
        assert!(make_voltage_profiles(0, 0.1, &g).is_err());
    }

    #[test]
    fn zero_on_gamma1() {
        let g = Grid::new(9).unwrap();
        let bc = VoltageProfile::full(&g).dirichlet(&g, -1.0);
        assert!(bc.on_gamma1().values.iter().all(|&v| v == 0.0));
        assert!(bc.on_gamma0().values.iter().all(|&v| v == -1.0));
    }
}
