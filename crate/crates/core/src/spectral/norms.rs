use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid2, ScalarField};

/// Slack used when deciding whether a snapshot time lies in a window.
const WINDOW_SLACK: f64 = 1e-9;

/// Indicator of the periodic ball `B_a(center)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallMask {
    pub center: [f64; 2],
    pub radius: f64,
    pub indicator: ScalarField,
}

/// Serializable description of a [`BallMask`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

fn periodic_offset(a: f64, b: f64, length: f64) -> f64 {
    let d = (a - b).rem_euclid(length);
    d.min(length - d)
}

impl BallMask {
    pub fn new(grid: &Grid2, center: [f64; 2], radius: f64) -> Self {
        let l = grid.length();
        let indicator = ScalarField::from_fn(grid, |x, y| {
            let dx = periodic_offset(x, center[0], l);
            let dy = periodic_offset(y, center[1], l);
            if dx * dx + dy * dy <= radius * radius {
                1.0
            } else {
                0.0
            }
        });
        Self {
            center,
            radius,
            indicator,
        }
    }

    /// Ball of radius `L/4` about the box center.
    pub fn centered(grid: &Grid2) -> Self {
        let l = grid.length();
        Self::new(grid, [0.5 * l, 0.5 * l], 0.25 * l)
    }

    /// A ball large enough to cover the whole box.
    pub fn whole_box(grid: &Grid2) -> Self {
        let l = grid.length();
        Self::new(grid, [0.5 * l, 0.5 * l], l)
    }

    pub fn spec(&self) -> BallSpec {
        BallSpec {
            center: self.center,
            radius: self.radius,
        }
    }

    pub fn grid(&self) -> &Grid2 {
        &self.indicator.grid
    }

    /// Quadrature area of the mask.
    pub fn area(&self) -> f64 {
        self.indicator.integral()
    }

    /// `∫_B f` by the rectangle rule on the masked points.
    pub fn integrate(&self, f: &ScalarField) -> f64 {
        assert_eq!(f.grid, self.indicator.grid);
        self.indicator
            .values
            .iter()
            .zip(&f.values)
            .map(|(m, v)| m * v)
            .sum::<f64>()
            * f.grid.cell_area()
    }

    /// `∫_B |f|^p`.
    pub fn integrate_abs_pow(&self, f: &ScalarField, p: f64) -> f64 {
        self.integrate(&f.map(|v| v.abs().powf(p)))
    }

    pub fn average(&self, f: &ScalarField) -> f64 {
        self.integrate(f) / self.area()
    }

    /// Smooth radial weight `exp(1 − 1/(1 − r²/a²))`, supported in the ball, max 1.
    pub fn smooth_weight(&self) -> ScalarField {
        let l = self.grid().length();
        let (c, a) = (self.center, self.radius);
        ScalarField::from_fn(self.grid(), |x, y| {
            let dx = periodic_offset(x, c[0], l);
            let dy = periodic_offset(y, c[1], l);
            let s = (dx * dx + dy * dy) / (a * a);
            if s < 1.0 {
                (1.0 - 1.0 / (1.0 - s)).exp()
            } else {
                0.0
            }
        })
    }
}

/// Average-zero part `f − avg_B f` (box average when `mask` is `None`).
pub fn mean_zero(f: &ScalarField, mask: Option<&BallMask>) -> ScalarField {
    let avg = match mask {
        Some(m) => m.average(f),
        None => f.mean(),
    };
    f.map(|v| v - avg)
}

/// Trapezoid-rule time integral of `(t, value)` samples restricted to
/// `[t0, t1]`. A single sample in the window returns its value unchanged.
pub fn trapezoid_window(samples: &[(f64, f64)], t0: f64, t1: f64) -> Result<f64> {
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(t, _)| *t >= t0 - WINDOW_SLACK && *t <= t1 + WINDOW_SLACK)
        .collect();
    match inside.len() {
        0 => Err(Error::EmptyWindow { t0, t1 }),
        1 => Ok(inside[0].1),
        _ => Ok(inside
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum()),
    }
}

/// `‖f‖_{L^p(B × (t0, t1))}`: trapezoid in time over the snapshots, rectangle
/// rule in space. With one snapshot in the window this is the spatial norm.
pub fn local_lp_norm(
    series: &[(f64, ScalarField)],
    mask: &BallMask,
    p: f64,
    t0: f64,
    t1: f64,
) -> Result<f64> {
    assert!(p >= 1.0, "p must be >= 1");
    let samples: Vec<(f64, f64)> = series
        .iter()
        .map(|(t, f)| (*t, mask.integrate_abs_pow(f, p)))
        .collect();
    Ok(trapezoid_window(&samples, t0, t1)?.powf(1.0 / p))
}
