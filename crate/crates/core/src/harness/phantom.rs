//! Two-valued doping phantoms.

use std::f64::consts::PI;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};

#[derive(Debug, Clone, PartialEq)]
pub enum PhantomKind {
    /// N-type rectangle `[x0, x1] × [y0, y1]` in a P-type background.
    RectInclusion { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// Junction `y = y0 + a sin(2π k x)`, N-type above and P-type below.
    OscillatingJunction {
        y0: f64,
        amplitude: f64,
        frequency: f64,
    },
    /// Any two-valued field stored as a grid CSV.
    CustomCsv { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Phantom {
    pub kind: PhantomKind,
    /// Doping of the N-region, positive.
    pub c_n: f64,
    /// Doping of the P-region, negative.
    pub c_p: f64,
}

impl Phantom {
    pub fn rect_inclusion(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Phantom {
            kind: PhantomKind::RectInclusion { x0, x1, y0, y1 },
            c_n: 1.0,
            c_p: -1.0,
        }
    }

    pub fn oscillating_junction(y0: f64, amplitude: f64, frequency: f64) -> Self {
        Phantom {
            kind: PhantomKind::OscillatingJunction {
                y0,
                amplitude,
                frequency,
            },
            c_n: 1.0,
            c_p: -1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PhantomKind::RectInclusion { .. } => "rect_inclusion",
            PhantomKind::OscillatingJunction { .. } => "oscillating_junction",
            PhantomKind::CustomCsv { .. } => "custom_csv",
        }
    }

    /// Checks levels and geometry without touching the filesystem.
    pub fn validate(&self) -> Result<()> {
        if !(self.c_n > 0.0 && self.c_n.is_finite()) || !(self.c_p < 0.0 && self.c_p.is_finite()) {
            return Err(Error::Phantom(format!(
                "doping levels need C_N > 0 > C_P, got C_N = {}, C_P = {}",
                self.c_n, self.c_p
            )));
        }
        let inside = |v: f64| v > 0.0 && v < 1.0;
        match self.kind {
            PhantomKind::RectInclusion { x0, x1, y0, y1 } => {
                if !(inside(x0) && inside(x1) && inside(y0) && inside(y1) && x0 < x1 && y0 < y1) {
                    return Err(Error::Geometry(format!(
                        "rectangle [{x0}, {x1}] × [{y0}, {y1}] must lie strictly inside the unit square"
                    )));
                }
            }
            PhantomKind::OscillatingJunction {
                y0,
                amplitude,
                frequency,
            } => {
                if !(inside(y0 - amplitude.abs()) && inside(y0 + amplitude.abs())) {
                    return Err(Error::Geometry(format!(
                        "junction y = {y0} ± {amplitude} leaves the unit square"
                    )));
                }
                if !(frequency.is_finite() && frequency >= 0.0) {
                    return Err(Error::Geometry(format!(
                        "junction frequency must be nonnegative, got {frequency}"
                    )));
                }
            }
            PhantomKind::CustomCsv { .. } => {}
        }
        Ok(())
    }
}

/// Samples the doping profile `C` of a phantom at the grid nodes.
pub fn make_phantom(p: &Phantom, grid: Grid) -> Result<ScalarField> {
    p.validate()?;
    let (c_n, c_p) = (p.c_n, p.c_p);
    match &p.kind {
        &PhantomKind::RectInclusion { x0, x1, y0, y1 } => Ok(ScalarField::from_fn(grid, |x, y| {
            if (x0..=x1).contains(&x) && (y0..=y1).contains(&y) {
                c_n
            } else {
                c_p
            }
        })),
        &PhantomKind::OscillatingJunction {
            y0,
            amplitude,
            frequency,
        } => Ok(ScalarField::from_fn(grid, |x, y| {
            if y > y0 + amplitude * (2.0 * PI * frequency * x).sin() {
                c_n
            } else {
                c_p
            }
        })),
        PhantomKind::CustomCsv { path } => {
            let field = ScalarField::read_csv(path)?;
            if field.grid() != grid {
                return Err(Error::Phantom(format!(
                    "{} holds a {m}x{m} grid, expected {n}x{n}",
                    path.display(),
                    m = field.grid().n(),
                    n = grid.n()
                )));
            }
            check_two_valued(&field)?;
            Ok(field)
        }
    }
}

fn check_two_valued(field: &ScalarField) -> Result<()> {
    let mut levels: Vec<f64> = Vec::with_capacity(3);
    for &v in field.values() {
        if !levels.contains(&v) {
            levels.push(v);
            if levels.len() > 2 {
                return Err(Error::Phantom(format!(
                    "custom field takes more than two values ({levels:?})"
                )));
            }
        }
    }
    Ok(())
}

/// Area of the N-region `{C > 0}` with trapezoid weights.
pub fn n_region_area(c: &ScalarField) -> f64 {
    c.values()
        .iter()
        .zip(c.grid().mass())
        .filter(|(&v, _)| v > 0.0)
        .map(|(_, m)| m)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_area_and_levels() {
        let g = Grid::new(81).unwrap();
        let c = make_phantom(&Phantom::rect_inclusion(0.3, 0.7, 0.3, 0.7), g).unwrap();
        assert!(c.values().iter().all(|&v| v == 1.0 || v == -1.0));
        assert!((n_region_area(&c) - 0.16).abs() <= 2.0 * g.h());
    }

    #[test]
    fn rect_outside_is_geometry_error() {
        let g = Grid::new(11).unwrap();
        let err = make_phantom(&Phantom::rect_inclusion(0.5, 1.2, 0.3, 0.7), g).unwrap_err();
        assert!(matches!(err, Error::Geometry(_)));
    }

    #[test]
    fn flat_junction_splits_areas() {
        let g = Grid::new(41).unwrap();
        let c = make_phantom(&Phantom::oscillating_junction(0.3, 0.0, 2.0), g).unwrap();
        assert!((n_region_area(&c) - 0.7).abs() <= 2.0 * g.h());
    }

    #[test]
    fn custom_field_with_three_values_is_rejected() {
        let g = Grid::new(5).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        ScalarField::from_fn(g, |x, _| x).write_csv(&path).unwrap();
        let p = Phantom {
            kind: PhantomKind::CustomCsv { path: path.clone() },
            c_n: 1.0,
            c_p: -1.0,
        };
        assert!(matches!(make_phantom(&p, g), Err(Error::Phantom(_))));
        let two = ScalarField::from_fn(g, |x, _| if x < 0.5 { -2.0 } else { 3.0 });
        two.write_csv(&path).unwrap();
        assert_eq!(make_phantom(&p, g).unwrap(), two);
    }

    #[test]
    fn levels_must_have_opposite_signs() {
        let mut p = Phantom::rect_inclusion(0.3, 0.7, 0.3, 0.7);
        p.c_p = 0.5;
        assert!(matches!(p.validate(), Err(Error::Phantom(_))));
    }
}
