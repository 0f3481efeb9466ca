//! Lagrangian estimate of `F = ∂x/∂X` from stored velocity snapshots.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{resample, Grid2, MatrixField2, TrigInterpolant, VectorField2};
use crate::tensor::Mat2;

const TIME_SLACK: f64 = 1e-9;

/// Rectangular lattice of Lagrangian labels `X = origin + spacing·(i₁, i₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedGrid {
    pub origin: [f64; 2],
    pub spacing: f64,
    pub count: [usize; 2],
    /// Labels tile the whole box and neighbours wrap around.
    pub periodic: bool,
}

impl SeedGrid {
    /// One seed per point of `grid`.
    pub fn periodic(grid: &Grid2) -> Self {
        Self {
            origin: [0.0, 0.0],
            spacing: grid.spacing(),
            count: [grid.n(); 2],
            periodic: true,
        }
    }

    pub fn patch(origin: [f64; 2], spacing: f64, count: [usize; 2]) -> Self {
        Self {
            origin,
            spacing,
            count,
            periodic: false,
        }
    }

    pub fn len(&self) -> usize {
        self.count[0] * self.count[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self, idx: usize) -> [f64; 2] {
        let (i1, i2) = (idx / self.count[1], idx % self.count[1]);
        [
            self.origin[0] + i1 as f64 * self.spacing,
            self.origin[1] + i2 as f64 * self.spacing,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowMapOptions {
    /// RK4 steps per snapshot interval.
    pub substeps: usize,
    /// Spectral up-sampling factor applied to the snapshots before bilinear
    /// interpolation (1 keeps them as stored, which suits non-periodic data).
    pub upsample: usize,
}

impl Default for FlowMapOptions {
    fn default() -> Self {
        Self {
            substeps: 4,
            upsample: 1,
        }
    }
}

/// Trajectory endpoints and the finite-difference deformation gradient.
#[derive(Debug, Clone)]
pub struct FlowMap {
    pub seeds: SeedGrid,
    /// Unwrapped endpoint `x(X, t₁)` per seed.
    pub positions: Vec<[f64; 2]>,
    pub jacobian: Vec<Mat2>,
}

impl FlowMap {
    /// Lagrangian `F` as a field on `grid`; seeds must be `SeedGrid::periodic(grid)`.
    pub fn to_field(&self, grid: &Grid2) -> Result<MatrixField2> {
        if self.seeds != SeedGrid::periodic(grid) {
            return Err(Error::GridMismatch(
                "seeds do not coincide with the grid".into(),
            ));
        }
        Ok(MatrixField2::from_pointwise(grid, |idx| self.jacobian[idx]))
    }

    /// Eulerian field `f` evaluated at the trajectory endpoints.
    pub fn sample_at_endpoints(&self, f: &MatrixField2) -> Vec<Mat2> {
        let interps: Vec<TrigInterpolant> = f.c.iter().map(TrigInterpolant::new).collect();
        self.positions
            .par_iter()
            .map(|&x| {
                Mat2::new(
                    interps[0].eval(x),
                    interps[1].eval(x),
                    interps[2].eval(x),
                    interps[3].eval(x),
                )
            })
            .collect()
    }
}

/// Periodic bilinear interpolation of one velocity snapshot.
struct Bilinear {
    n: usize,
    h: f64,
    length: f64,
    u: [Vec<f64>; 2],
}

impl Bilinear {
    fn new(v: &VectorField2) -> Self {
        let g = v.grid();
        Self {
            n: g.n(),
            h: g.spacing(),
            length: g.length(),
            u: [v.c[0].values.clone(), v.c[1].values.clone()],
        }
    }

    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let n = self.n;
        let locate = |z: f64| {
            let s = z.rem_euclid(self.length) / self.h;
            let i = (s.floor() as usize).min(n - 1);
            (i, (i + 1) % n, s - i as f64)
        };
        let (a0, a1, wa) = locate(x[0]);
        let (b0, b1, wb) = locate(x[1]);
        let at = |c: &Vec<f64>| {
            let v00 = c[a0 * n + b0];
            let v01 = c[a0 * n + b1];
            let v10 = c[a1 * n + b0];
            let v11 = c[a1 * n + b1];
            (1.0 - wa) * ((1.0 - wb) * v00 + wb * v01) + wa * ((1.0 - wb) * v10 + wb * v11)
        };
        [at(&self.u[0]), at(&self.u[1])]
    }
}

/// Integrates `dx/dt = u(x, t)` from `t0` to `t1` for every seed (RK4,
/// bilinear in space, linear in time) and differentiates the endpoints in
/// the labels with centered differences (second-order one-sided at the
/// edges of a non-periodic patch). `series` must be sorted by time.
pub fn flow_map_oracle(
    series: &[(f64, VectorField2)],
    t0: f64,
    t1: f64,
    seeds: &SeedGrid,
    opts: FlowMapOptions,
) -> Result<FlowMap> {
    if series.is_empty() || !(t1 >= t0) {
        return Err(Error::EmptyWindow { t0, t1 });
    }
    let covers = series[0].0 <= t0 + TIME_SLACK && series[series.len() - 1].0 >= t1 - TIME_SLACK;
    if !covers {
        return Err(Error::EmptyWindow { t0, t1 });
    }
    if series.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::WindowMismatch("snapshot times must increase".into()));
    }
    if !seeds.periodic && (seeds.count[0] < 3 || seeds.count[1] < 3) {
        return Err(Error::InvalidGrid(
            "a seed patch needs at least 3×3 labels".into(),
        ));
    }
    let samplers: Vec<(f64, Bilinear)> = series
        .par_iter()
        .map(|(t, v)| {
            let v = if opts.upsample > 1 {
                let g = v.grid();
                let fine = Grid2::new(g.n() * opts.upsample, g.length())?;
                VectorField2::new(resample(&v.c[0], &fine), resample(&v.c[1], &fine))
            } else {
                v.clone()
            };
            Ok((*t, Bilinear::new(&v)))
        })
        .collect::<Result<_>>()?;

    // Time nodes: snapshot times clipped to [t0, t1].
    let mut nodes = vec![t0];
    nodes.extend(
        series
            .iter()
            .map(|(t, _)| *t)
            .filter(|&t| t > t0 + TIME_SLACK && t < t1 - TIME_SLACK),
    );
    if t1 > t0 {
        nodes.push(t1);
    }
    let velocity = |x: [f64; 2], t: f64| -> [f64; 2] {
        let k = samplers
            .partition_point(|(ts, _)| *ts <= t)
            .clamp(1, samplers.len().max(2) - 1);
        if samplers.len() == 1 {
            return samplers[0].1.eval(x);
        }
        let (ta, a) = (&samplers[k - 1].0, &samplers[k - 1].1);
        let (tb, b) = (&samplers[k].0, &samplers[k].1);
        let w = ((t - ta) / (tb - ta)).clamp(0.0, 1.0);
        let (va, vb) = (a.eval(x), b.eval(x));
        [(1.0 - w) * va[0] + w * vb[0], (1.0 - w) * va[1] + w * vb[1]]
    };
    let substeps = opts.substeps.max(1);
    let positions: Vec<[f64; 2]> = (0..seeds.len())
        .into_par_iter()
        .map(|idx| {
            let mut x = seeds.label(idx);
            for w in nodes.windows(2) {
                let h = (w[1] - w[0]) / substeps as f64;
                for s in 0..substeps {
                    let t = w[0] + s as f64 * h;
                    let add = |x: [f64; 2], k: [f64; 2], c: f64| [x[0] + c * k[0], x[1] + c * k[1]];
                    let k1 = velocity(x, t);
                    let k2 = velocity(add(x, k1, 0.5 * h), t + 0.5 * h);
                    let k3 = velocity(add(x, k2, 0.5 * h), t + 0.5 * h);
                    let k4 = velocity(add(x, k3, h), t + h);
                    for c in 0..2 {
                        x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
                    }
                }
            }
            x
        })
        .collect();

    let disp: Vec<[f64; 2]> = positions
        .iter()
        .enumerate()
        .map(|(idx, x)| {
            let xl = seeds.label(idx);
            [x[0] - xl[0], x[1] - xl[1]]
        })
        .collect();
    let [c1, c2] = seeds.count;
    let h = seeds.spacing;
    let at = |i1: usize, i2: usize| disp[i1 * c2 + i2];
    // ∂d/∂X_axis at (i1, i2).
    let diff = |i1: usize, i2: usize, axis: usize| -> [f64; 2] {
        let (i, cnt) = if axis == 0 { (i1, c1) } else { (i2, c2) };
        let pick = |j: usize| if axis == 0 { at(j, i2) } else { at(i1, j) };
        let comb = |terms: &[(usize, f64)], scale: f64| {
            let mut out = [0.0; 2];
            for &(j, w) in terms {
                let d = pick(j);
                out[0] += w * d[0];
                out[1] += w * d[1];
            }
            [out[0] / scale, out[1] / scale]
        };
        if seeds.periodic {
            comb(
                &[((i + 1) % cnt, 1.0), ((i + cnt - 1) % cnt, -1.0)],
                2.0 * h,
            )
        } else if i == 0 {
            comb(&[(0, -3.0), (1, 4.0), (2, -1.0)], 2.0 * h)
        } else if i == cnt - 1 {
            comb(&[(i, 3.0), (i - 1, -4.0), (i - 2, 1.0)], 2.0 * h)
        } else {
            comb(&[(i + 1, 1.0), (i - 1, -1.0)], 2.0 * h)
        }
    };
    let jacobian = (0..seeds.len())
        .map(|idx| {
            let (i1, i2) = (idx / c2, idx % c2);
            let d1 = diff(i1, i2, 0);
            let d2 = diff(i1, i2, 1);
            Mat2::new(1.0 + d1[0], d2[0], d1[1], 1.0 + d2[1])
        })
        .collect();
    Ok(FlowMap {
        seeds: seeds.clone(),
        positions,
        jacobian,
    })
}
