use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Spectral coefficients of a real field on a [`Grid2`], unnormalized
/// (mode `m` holds `Σ_x f(x) e^{-i k·x}`), laid out like the physical samples.
pub type Spectrum = Vec<Complex64>;

/// The periodic box `[0, L)²` sampled on `n × n` points.
///
/// Sample `(i1, i2)`, at `x = (i1 h, i2 h)`, lives at flat index `i1 * n + i2`.
/// Cloning is cheap: the wavenumber tables and FFT plans are shared.
#[derive(Clone)]
pub struct Grid2 {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    length: f64,
    /// Integer frequency of each index along one axis.
    freq: Vec<i64>,
    /// Wavenumber for first derivatives (Nyquist mode zeroed).
    k: Vec<f64>,
    /// 2/3-rule retention flag along one axis.
    keep: Vec<bool>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2")
            .field("n", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

impl PartialEq for Grid2 {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.length == other.inner.length
    }
}

impl Grid2 {
    /// `n` must be even and at least 8; `length` must be positive.
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!("n = {n} must be even and >= 8")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box length {length} must be positive"
            )));
        }
        let half = (n / 2) as i64;
        let freq: Vec<i64> = (0..n as i64)
            .map(|i| if i < half { i } else { i - n as i64 })
            .collect();
        let scale = 2.0 * std::f64::consts::PI / length;
        let k = freq
            .iter()
            .map(|&m| if m == -half { 0.0 } else { m as f64 * scale })
            .collect();
        let keep = freq
            .iter()
            .map(|&m| 3 * m.unsigned_abs() <= n as u64)
            .collect();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                length,
                freq,
                k,
                keep,
                fwd,
                inv,
            }),
        })
    }

    /// Default `2π` box.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * std::f64::consts::PI)
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    /// Grid spacing `h = L / n`.
    pub fn spacing(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn area(&self) -> f64 {
        self.inner.length * self.inner.length
    }

    /// Coordinate of sample index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let n = self.inner.n;
        [self.coord(idx / n), self.coord(idx % n)]
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        i1 * self.inner.n + i2
    }

    /// Integer frequency of index `i` along one axis.
    pub fn freq(&self, i: usize) -> i64 {
        self.inner.freq[i]
    }

    /// Wavenumber `2π m / L` used for first derivatives (0 at Nyquist).
    pub fn wavenumber(&self, i: usize) -> f64 {
        self.inner.k[i]
    }

    /// Wavevector of flat spectral index `idx`.
    pub fn wavevector(&self, idx: usize) -> (f64, f64) {
        let n = self.inner.n;
        (self.inner.k[idx / n], self.inner.k[idx % n])
    }

    /// `true` when the 2/3 rule retains the mode at flat index `idx`.
    pub fn retained(&self, idx: usize) -> bool {
        let n = self.inner.n;
        self.inner.keep[idx / n] && self.inner.keep[idx % n]
    }

    /// Forward transform of real samples.
    pub fn forward(&self, values: &[f64]) -> Spectrum {
        assert_eq!(values.len(), self.len(), "field does not match grid");
        let mut data: Spectrum = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut data, true);
        data
    }

    /// Inverse transform; the imaginary part is discarded.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        assert_eq!(spec.len(), self.len(), "spectrum does not match grid");
        let mut data = spec.to_vec();
        self.fft2(&mut data, false);
        let norm = 1.0 / self.len() as f64;
        data.iter().map(|c| c.re * norm).collect()
    }

    /// Zeroes every mode removed by the 2/3 rule.
    pub fn dealias_in_place(&self, spec: &mut [Complex64]) {
        let n = self.inner.n;
        for (i1, row) in spec.chunks_mut(n).enumerate() {
            if !self.inner.keep[i1] {
                row.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
                continue;
            }
            for (c, &keep) in row.iter_mut().zip(&self.inner.keep) {
                if !keep {
                    *c = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    fn fft2(&self, data: &mut [Complex64], forward: bool) {
        let plan = if forward {
            &self.inner.fwd
        } else {
            &self.inner.inv
        };
        let n = self.inner.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose_square(data, n);
        plan.process_with_scratch(data, &mut scratch);
        transpose_square(data, n);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    const TILE: usize = 16;
    for bi in (0..n).step_by(TILE) {
        for bj in (bi..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                for j in bj.max(i + 1)..(bj + TILE).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}
