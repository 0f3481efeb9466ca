use crate::spectral::Grid2;
use crate::tensor::Mat2;

/// A real scalar sampled on a [`Grid2`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: Grid2,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid2, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "sample count does not match grid");
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn zeros(grid: &Grid2) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid2, c: f64) -> Self {
        Self::new(grid, vec![c; grid.len()])
    }

    /// Samples `f(x1, x2)` at every grid point.
    pub fn from_fn(grid: &Grid2, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let [x1, x2] = grid.point(idx);
                f(x1, x2)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid);
        Self::new(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    /// Box integral by the (spectrally exact) rectangle rule.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// A planar vector field; `c[0]`, `c[1]` are the `x1`, `x2` components.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField2 {
    pub c: [ScalarField; 2],
}

impl VectorField2 {
    pub fn new(c1: ScalarField, c2: ScalarField) -> Self {
        assert_eq!(c1.grid, c2.grid);
        Self { c: [c1, c2] }
    }

    pub fn zeros(grid: &Grid2) -> Self {
        Self::new(ScalarField::zeros(grid), ScalarField::zeros(grid))
    }

    pub fn from_fn(grid: &Grid2, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let c1 = ScalarField::from_fn(grid, |x, y| f(x, y)[0]);
        let c2 = ScalarField::from_fn(grid, |x, y| f(x, y)[1]);
        Self::new(c1, c2)
    }

    pub fn grid(&self) -> &Grid2 {
        &self.c[0].grid
    }

    pub fn at(&self, idx: usize) -> [f64; 2] {
        [self.c[0].values[idx], self.c[1].values[idx]]
    }

    pub fn add(&self, o: &VectorField2) -> Self {
        Self::new(self.c[0].add(&o.c[0]), self.c[1].add(&o.c[1]))
    }

    pub fn sub(&self, o: &VectorField2) -> Self {
        Self::new(self.c[0].sub(&o.c[0]), self.c[1].sub(&o.c[1]))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.c[0].scale(s), self.c[1].scale(s))
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        self.c[0].zip_map(&self.c[1], f64::hypot)
    }

    /// `(∫ |v|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.c[0].l2_norm().hypot(self.c[1].l2_norm())
    }

    pub fn linf_norm(&self) -> f64 {
        self.magnitude().linf_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(ScalarField::is_finite)
    }
}

/// A 2×2-matrix-valued field; component `(i, j)` is `c[2 i + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField2 {
    pub c: [ScalarField; 4],
}

impl MatrixField2 {
    pub fn new(c: [ScalarField; 4]) -> Self {
        for s in &c[1..] {
            assert_eq!(s.grid, c[0].grid);
        }
        Self { c }
    }

    pub fn constant(grid: &Grid2, m: Mat2) -> Self {
        Self::new([
            ScalarField::constant(grid, m.a11),
            ScalarField::constant(grid, m.a12),
            ScalarField::constant(grid, m.a21),
            ScalarField::constant(grid, m.a22),
        ])
    }

    pub fn identity(grid: &Grid2) -> Self {
        Self::constant(grid, Mat2::IDENTITY)
    }

    pub fn zeros(grid: &Grid2) -> Self {
        Self::constant(grid, Mat2::ZERO)
    }

    pub fn from_fn(grid: &Grid2, f: impl Fn(f64, f64) -> Mat2) -> Self {
        Self::from_pointwise(grid, |idx| {
            let [x1, x2] = grid.point(idx);
            f(x1, x2)
        })
    }

    /// Builds the field from a per-index closure.
    pub fn from_pointwise(grid: &Grid2, mut f: impl FnMut(usize) -> Mat2) -> Self {
        let n = grid.len();
        let mut comps = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for idx in 0..n {
            let m = f(idx);
            comps[0][idx] = m.a11;
            comps[1][idx] = m.a12;
            comps[2][idx] = m.a21;
            comps[3][idx] = m.a22;
        }
        let [a, b, c, d] = comps;
        Self::new([
            ScalarField::new(grid, a),
            ScalarField::new(grid, b),
            ScalarField::new(grid, c),
            ScalarField::new(grid, d),
        ])
    }

    pub fn grid(&self) -> &Grid2 {
        &self.c[0].grid
    }

    pub fn comp(&self, i: usize, j: usize) -> &ScalarField {
        &self.c[2 * i + j]
    }

    pub fn at(&self, idx: usize) -> Mat2 {
        Mat2::new(
            self.c[0].values[idx],
            self.c[1].values[idx],
            self.c[2].values[idx],
            self.c[3].values[idx],
        )
    }

    /// Applies a pointwise matrix map.
    pub fn map(&self, f: impl Fn(Mat2) -> Mat2) -> Self {
        Self::from_pointwise(self.grid(), |idx| f(self.at(idx)))
    }

    /// Pointwise scalar functional.
    pub fn scalar_map(&self, f: impl Fn(Mat2) -> f64) -> ScalarField {
        let grid = self.grid();
        ScalarField::new(grid, (0..grid.len()).map(|idx| f(self.at(idx))).collect())
    }

    pub fn add(&self, o: &MatrixField2) -> Self {
        Self::new(std::array::from_fn(|k| self.c[k].add(&o.c[k])))
    }

    pub fn sub(&self, o: &MatrixField2) -> Self {
        Self::new(std::array::from_fn(|k| self.c[k].sub(&o.c[k])))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(std::array::from_fn(|k| self.c[k].scale(s)))
    }

    pub fn transpose(&self) -> Self {
        Self::new([
            self.c[0].clone(),
            self.c[2].clone(),
            self.c[1].clone(),
            self.c[3].clone(),
        ])
    }

    /// Pointwise Frobenius norm.
    pub fn frobenius(&self) -> ScalarField {
        self.scalar_map(|m| m.norm())
    }

    /// `(∫ |A|²)^{1/2}` with the Frobenius norm.
    pub fn l2_norm(&self) -> f64 {
        self.c
            .iter()
            .map(|s| s.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.frobenius().linf_norm()
    }

    pub fn integral(&self) -> Mat2 {
        Mat2::new(
            self.c[0].integral(),
            self.c[1].integral(),
            self.c[2].integral(),
            self.c[3].integral(),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(ScalarField::is_finite)
    }
}
