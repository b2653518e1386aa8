//! Periodic spectral grids and complex-valued fields.
//!
//! A [`GridSpec`] fixes a periodic box `[lower, upper)^d` (d = 1 or 2)
//! sampled at `n` points per axis (power of two), together with the signed
//! wavenumber tables `k_j = 2π·freq(j)/(upper-lower)` used by all spectral
//! operators. Fields are stored row-major over axes (axis 0 outermost).
//!
//! The discrete L² norm carries the quadrature weight `√(∏Δx)` so that norms
//! are resolution-independent and directly comparable across grids.

use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// One axis of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
    pub spacing: f64,
    /// Signed wavenumbers, `k_j = 2π·freq(j)/(upper-lower)` with the standard
    /// frequency order `0, 1, …, n/2-1, -n/2, …, -1`.
    pub wavenumbers: Vec<f64>,
}

impl AxisSpec {
    fn new(lower: f64, upper: f64, n: usize) -> Result<Self> {
        if !(upper > lower) {
            return Err(Error::InvalidGrid(format!(
                "upper ({upper}) must exceed lower ({lower})"
            )));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two >= 4"
            )));
        }
        let len = upper - lower;
        let spacing = len / n as f64;
        let wavenumbers = (0..n)
            .map(|j| {
                let freq = if j < n / 2 {
                    j as i64
                } else {
                    j as i64 - n as i64
                };
                2.0 * std::f64::consts::PI * freq as f64 / len
            })
            .collect();
        Ok(AxisSpec {
            lower,
            upper,
            n,
            spacing,
            wavenumbers,
        })
    }

    /// Coordinate of the `j`-th gridpoint.
    pub fn coord(&self, j: usize) -> f64 {
        self.lower + self.spacing * j as f64
    }
}

/// A periodic grid in one or two dimensions.
#[derive(Debug, Clone)]
pub struct GridSpec {
    axes: Vec<AxisSpec>,
    /// `Σ_axis k_axis²` per gridpoint, the symbol of `-Δ`.
    ksq: Vec<f64>,
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.axes == other.axes
    }
}

impl GridSpec {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Total number of gridpoints.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn axis(&self, i: usize) -> &AxisSpec {
        &self.axes[i]
    }

    pub fn axes(&self) -> &[AxisSpec] {
        &self.axes
    }

    /// Quadrature weight `∏Δx`.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing).product()
    }

    /// `Σ_axis k_axis²` at every gridpoint (row-major).
    pub fn k_squared(&self) -> &[f64] {
        &self.ksq
    }

    /// Largest value of `Σ k_axis²` on the grid.
    pub fn k_squared_max(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| {
                let k = std::f64::consts::PI * a.n as f64 / (a.upper - a.lower);
                k * k
            })
            .sum()
    }

    /// Coordinates of the gridpoint with row-major index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        match self.axes.len() {
            1 => [self.axes[0].coord(idx), 0.0],
            _ => {
                let n1 = self.axes[1].n;
                [self.axes[0].coord(idx / n1), self.axes[1].coord(idx % n1)]
            }
        }
    }
}

/// Builds a grid with the same extent `[lower, upper)` and resolution `n` on
/// every axis.
pub fn make_grid(dim: usize, lower: f64, upper: f64, n: usize) -> Result<Arc<GridSpec>> {
    if dim == 0 || dim > 2 {
        return Err(Error::InvalidGrid(format!("dim = {dim} not in {{1, 2}}")));
    }
    let axes: Vec<AxisSpec> = (0..dim)
        .map(|_| AxisSpec::new(lower, upper, n))
        .collect::<Result<_>>()?;
    let ksq = match axes.len() {
        1 => axes[0].wavenumbers.iter().map(|k| k * k).collect(),
        _ => {
            let (k0, k1) = (&axes[0].wavenumbers, &axes[1].wavenumbers);
            let mut v = Vec::with_capacity(k0.len() * k1.len());
            for a in k0 {
                for b in k1 {
                    v.push(a * a + b * b);
                }
            }
            v
        }
    };
    Ok(Arc::new(GridSpec { axes, ksq }))
}

// ---------------------------------------------------------------------------
// FFT plumbing

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap();
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for r in 0..rows {
        for c in 0..cols {
            dst[c * rows + r] = src[r * cols + c];
        }
    }
}

/// Unnormalized forward transform along every axis, in place.
pub(crate) fn fft_forward(grid: &GridSpec, data: &mut [Complex64]) {
    fft_all(grid, data, false);
}

/// Inverse transform along every axis, in place, scaled by `1/len` so that
/// `inverse ∘ forward = id`.
pub(crate) fn fft_inverse(grid: &GridSpec, data: &mut [Complex64]) {
    fft_all(grid, data, true);
    let scale = 1.0 / grid.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

fn fft_all(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    debug_assert_eq!(data.len(), grid.len());
    match grid.axes.len() {
        1 => plan(grid.axes[0].n, inverse).process(data),
        _ => {
            let (n0, n1) = (grid.axes[0].n, grid.axes[1].n);
            let p1 = plan(n1, inverse);
            for row in data.chunks_exact_mut(n1) {
                p1.process(row);
            }
            let mut scratch = vec![Complex64::default(); data.len()];
            transpose(data, &mut scratch, n0, n1);
            let p0 = plan(n0, inverse);
            for row in scratch.chunks_exact_mut(n0) {
                p0.process(row);
            }
            transpose(&scratch, data, n1, n0);
        }
    }
}

// ---------------------------------------------------------------------------
// Fields

/// A complex-valued state sampled on a [`GridSpec`], row-major over axes.
#[derive(Debug, Clone)]
pub struct WaveField {
    grid: Arc<GridSpec>,
    values: Vec<Complex64>,
}

impl WaveField {
    pub fn zeros(grid: &Arc<GridSpec>) -> Self {
        WaveField {
            grid: grid.clone(),
            values: vec![Complex64::default(); grid.len()],
        }
    }

    /// Samples `f` at every gridpoint. For 1D grids the second coordinate
    /// passed to `f` is 0.
    pub fn from_fn(grid: &Arc<GridSpec>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let [x, y] = grid.point(idx);
                f(x, y)
            })
            .collect();
        WaveField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_values(grid: &Arc<GridSpec>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "value buffer has {} entries, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "field construction".into(),
            });
        }
        Ok(WaveField {
            grid: grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Quadrature-weighted discrete L² norm, `√(Σ|u_j|²·∏Δx)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    /// `‖self - other‖` in the weighted L² norm.
    pub fn l2_distance(&self, other: &WaveField) -> f64 {
        assert!(same_grid(self, other), "fields live on different grids");
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        (s * self.grid.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &WaveField) {
        assert!(same_grid(self, other), "fields live on different grids");
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in self.values.iter_mut() {
            *v *= c;
        }
    }

    /// Raw (unnormalized) Fourier coefficients of the field.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut data = self.values.clone();
        fft_forward(&self.grid, &mut data);
        data
    }
}

impl std::ops::Add for &WaveField {
    type Output = WaveField;
    fn add(self, rhs: &WaveField) -> WaveField {
        let mut out = self.clone();
        out.add_scaled(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl std::ops::Sub for &WaveField {
    type Output = WaveField;
    fn sub(self, rhs: &WaveField) -> WaveField {
        let mut out = self.clone();
        out.add_scaled(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

impl std::ops::Mul<Complex64> for &WaveField {
    type Output = WaveField;
    fn mul(self, c: Complex64) -> WaveField {
        let mut out = self.clone();
        out.scale(c);
        out
    }
}

impl std::ops::Mul<f64> for &WaveField {
    type Output = WaveField;
    fn mul(self, c: f64) -> WaveField {
        self * Complex64::new(c, 0.0)
    }
}

/// True when both fields refer to the same grid (pointer or value equality).
pub fn same_grid(a: &WaveField, b: &WaveField) -> bool {
    Arc::ptr_eq(&a.grid, &b.grid) || *a.grid == *b.grid
}

/// Differentiates `u` along `axis` by multiplying the spectrum with
/// `(i·k_axis)^order`. Supported orders: 1 and 2.
pub fn spectral_derivative(u: &WaveField, axis: usize, order: u32) -> Result<WaveField> {
    if !(1..=2).contains(&order) {
        return Err(Error::UnsupportedOrder { order });
    }
    derivative_any(u, axis, order)
}

/// Like [`spectral_derivative`] but for any order; crate-internal helper for
/// higher derivatives appearing in commutator expressions.
pub(crate) fn derivative_any(u: &WaveField, axis: usize, order: u32) -> Result<WaveField> {
    let grid = u.grid();
    if axis >= grid.dim() {
        return Err(Error::AxisOutOfRange {
            axis,
            dim: grid.dim(),
        });
    }
    let mut data = u.values().to_vec();
    fft_forward(grid, &mut data);
    let ks = &grid.axis(axis).wavenumbers;
    match grid.dim() {
        1 => {
            for (v, &k) in data.iter_mut().zip(ks) {
                *v *= Complex64::new(0.0, k).powu(order);
            }
        }
        _ => {
            let n1 = grid.axis(1).n;
            for (idx, v) in data.iter_mut().enumerate() {
                let j = if axis == 0 { idx / n1 } else { idx % n1 };
                *v *= Complex64::new(0.0, ks[j]).powu(order);
            }
        }
    }
    fft_inverse(grid, &mut data);
    WaveField::from_values(grid, data)
}

/// Applies a real multiplier `m(k)` in Fourier space: `u ← F⁻¹(m·F(u))`.
pub(crate) fn apply_symbol(u: &WaveField, symbol: impl Fn(f64) -> Complex64) -> WaveField {
    let grid = u.grid();
    let mut data = u.values().to_vec();
    fft_forward(grid, &mut data);
    for (v, &k2) in data.iter_mut().zip(grid.k_squared()) {
        *v *= symbol(k2);
    }
    fft_inverse(grid, &mut data);
    WaveField {
        grid: grid.clone(),
        values: data,
    }
}
