//! Uniform spatial and wavenumber grids, sampled complex functions, and
//! two-component Klein-Gordon states.

use num_complex::Complex64;

use crate::error::{KgError, Result};

/// Uniform discretization of a symmetric box `[-L, L)` in `x` together with a
/// symmetric wavenumber quadrature grid `[-k_max, k_max]`.
///
/// The x-grid has `n_points` nodes `x_j = -L + j*dx`, `dx = 2L/N`, so `x = 0`
/// is a node whenever `N` is even. The k-grid always carries an odd number of
/// nodes so that it is symmetric about zero and contains `k = 0`; an even
/// requested count is bumped by one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    n_points: usize,
    k_max: f64,
    n_k: usize,
}

impl GridSpec {
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn n_k(&self) -> usize {
        self.n_k
    }

    /// Spacing of the wavenumber quadrature grid.
    pub fn dk(&self) -> f64 {
        2.0 * self.k_max / (self.n_k - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Wavenumber quadrature node `k_i = -k_max + i*dk`.
    pub fn k_node(&self, i: usize) -> f64 {
        -self.k_max + i as f64 * self.dk()
    }

    pub fn k_nodes(&self) -> Vec<f64> {
        (0..self.n_k).map(|i| self.k_node(i)).collect()
    }

    /// Index of the node closest to `x`, clamped to the box.
    pub fn index_of(&self, x: f64) -> usize {
        let j = ((x + self.half_width) / self.dx()).round();
        (j.max(0.0) as usize).min(self.n_points - 1)
    }
}

/// Construct a grid; rejects odd or too-small `N` and nonpositive extents.
pub fn make_grid(half_width: f64, n_points: usize, k_max: f64, n_k: usize) -> Result<GridSpec> {
    if n_points % 2 != 0 {
        return Err(KgError::InvalidGrid {
            reason: format!("N = {n_points} must be even"),
        });
    }
    if n_points < 16 {
        return Err(KgError::InvalidGrid {
            reason: format!("N = {n_points} < 16"),
        });
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(KgError::InvalidGrid {
            reason: format!("L = {half_width} must be positive"),
        });
    }
    if !(k_max > 0.0) || !k_max.is_finite() {
        return Err(KgError::InvalidGrid {
            reason: format!("k_max = {k_max} must be positive"),
        });
    }
    if n_k < 3 {
        return Err(KgError::InvalidGrid {
            reason: format!("n_k = {n_k} < 3"),
        });
    }
    // Odd node count keeps the k-grid symmetric with 0 on it.
    let n_k = if n_k % 2 == 0 { n_k + 1 } else { n_k };
    Ok(GridSpec {
        half_width,
        n_points,
        k_max,
        n_k,
    })
}

/// A complex-valued function sampled on the x-grid.
#[derive(Debug, Clone)]
pub struct GridFn {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl GridFn {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(KgError::DimensionMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(KgError::Invalid("grid function has non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n_points()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n_points()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> GridFn {
        GridFn {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &GridFn) -> Result<GridFn> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFn) -> Result<GridFn> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &GridFn, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<GridFn> {
        if self.grid != other.grid {
            return Err(KgError::GridMismatch);
        }
        Ok(GridFn {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Discrete L^2 norm with quadrature weight dx.
    pub fn l2_norm(&self) -> f64 {
        let dx = self.grid.dx();
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// The two-component state (psi, psidot) of the Klein-Gordon flow.
#[derive(Debug, Clone)]
pub struct KGState {
    pub psi: GridFn,
    pub psidot: GridFn,
}

impl KGState {
    pub fn new(psi: GridFn, psidot: GridFn) -> Result<Self> {
        if psi.grid() != psidot.grid() {
            return Err(KgError::GridMismatch);
        }
        Ok(Self { psi, psidot })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            psi: GridFn::zeros(grid),
            psidot: GridFn::zeros(grid),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.psi.grid()
    }

    pub fn scale(&self, c: Complex64) -> KGState {
        KGState {
            psi: self.psi.scale(c),
            psidot: self.psidot.scale(c),
        }
    }

    pub fn add(&self, other: &KGState) -> Result<KGState> {
        Ok(KGState {
            psi: self.psi.add(&other.psi)?,
            psidot: self.psidot.add(&other.psidot)?,
        })
    }

    pub fn sub(&self, other: &KGState) -> Result<KGState> {
        Ok(KGState {
            psi: self.psi.sub(&other.psi)?,
            psidot: self.psidot.sub(&other.psidot)?,
        })
    }

    /// Norm of L^2 (+) L^2.
    pub fn l2_pair_norm(&self) -> f64 {
        (self.psi.l2_norm().powi(2) + self.psidot.l2_norm().powi(2)).sqrt()
    }
}
