//! Uniform complex grids, sampled complex fields and the discrete Fourier
//! multiplier engine every operator is built on.
//!
//! Grid convention: the box is `center ± half_width` in both axes, node
//! `(row, col)` sits at `center - half_width·(1+i) + spacing·(col + i·row)`,
//! so the center itself is always a node. Frequencies live on the integer
//! lattice `[-n/2, n/2)²` and the complex frequency is `k1 + i·k2` with `k1`
//! the column (x) frequency.

mod fft;
mod io;
mod multiplier;

pub use fft::{dft2, idft2};
pub use io::{read_field, write_field, FieldFormat, FieldHeader};
pub(crate) use multiplier::apply_table;
pub use multiplier::{apply_multiplier, Frequency, FrequencyMultiplier};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QcError, Result};

/// Smallest admissible number of samples per axis.
pub const MIN_GRID_N: usize = 16;

/// Uniform square grid of `n × n` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    center: Complex64,
    half_width: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(center: Complex64, half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(QcError::InvalidGrid(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        if n < MIN_GRID_N || !n.is_power_of_two() {
            return Err(QcError::InvalidGrid(format!(
                "n must be a power of two >= {MIN_GRID_N}, got {n}"
            )));
        }
        if !center.re.is_finite() || !center.im.is_finite() {
            return Err(QcError::InvalidGrid("center must be finite".into()));
        }
        Ok(Self { center, half_width, n })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Box side length `L = 2·half_width`.
    pub fn side(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.side() / self.n as f64
    }

    /// Area of one cell.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lower-left corner of the box, which is node `(0, 0)`.
    pub fn origin(&self) -> Complex64 {
        self.center - Complex64::new(self.half_width, self.half_width)
    }

    pub fn x(&self, col: usize) -> f64 {
        self.center.re - self.half_width + self.spacing() * col as f64
    }

    pub fn y(&self, row: usize) -> f64 {
        self.center.im - self.half_width + self.spacing() * row as f64
    }

    pub fn node(&self, row: usize, col: usize) -> Complex64 {
        Complex64::new(self.x(col), self.y(row))
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.n + col
    }

    /// Node coordinate for a flat row-major index.
    pub fn node_at(&self, idx: usize) -> Complex64 {
        self.node(idx / self.n, idx % self.n)
    }

    /// Fractional grid coordinates `(row, col)` of a point.
    pub fn fractional_index(&self, z: Complex64) -> (f64, f64) {
        let o = self.origin();
        let h = self.spacing();
        ((z.im - o.im) / h, (z.re - o.re) / h)
    }

    /// Nearest node to `z`, if `z` is inside the box.
    pub fn nearest_node(&self, z: Complex64) -> Option<(usize, usize)> {
        let (r, c) = self.fractional_index(z);
        let (r, c) = (r.round(), c.round());
        if r < 0.0 || c < 0.0 || r >= self.n as f64 || c >= self.n as f64 {
            return None;
        }
        Some((r as usize, c as usize))
    }

    /// Signed integer frequency for an FFT bin index.
    pub fn frequency_of_bin(&self, bin: usize) -> i64 {
        let n = self.n as i64;
        let b = bin as i64;
        if b < n / 2 {
            b
        } else {
            b - n
        }
    }

    /// True when `z` lies in the central region `center ± fraction·half_width`.
    pub fn in_central(&self, z: Complex64, fraction: f64) -> bool {
        let d = z - self.center;
        let lim = fraction * self.half_width;
        d.re.abs() <= lim && d.im.abs() <= lim
    }

    /// Same box with a different resolution.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.center, self.half_width, n)
    }
}

/// Complex samples on a [`GridSpec`], row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl Field {
    /// Builds a field, rejecting wrong lengths and non-finite samples.
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(QcError::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(idx) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(QcError::NonFinite {
                row: idx / grid.n(),
                col: idx % grid.n(),
            });
        }
        Ok(Self { grid, values })
    }

    /// Internal constructor for operator outputs that are finite by construction.
    pub(crate) fn from_parts(grid: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, Complex64::new(0.0, 0.0))
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at every node.
    pub fn sample<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for row in 0..n {
            for col in 0..n {
                values.push(f(grid.node(row, col)));
            }
        }
        Self::new(grid, values)
    }

    /// Node coordinates themselves (`f(z) = z`).
    pub fn coordinates(grid: GridSpec) -> Self {
        Self::sample(grid, |z| z).expect("node coordinates are finite")
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[self.grid.index(row, col)]
    }

    /// Applies `f` pointwise.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Combines two fields on the same grid pointwise.
    pub fn zip_with<F>(&self, other: &Field, f: F) -> Result<Self>
    where
        F: Fn(Complex64, Complex64) -> Complex64,
    {
        self.check_same_grid(other)?;
        Self::new(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn add(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Field) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|&v| v * s).collect())
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(QcError::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    /// Continuum L² norm approximated by the midpoint rule.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Integral over the box (midpoint rule).
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.grid.cell_area()
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.grid.len() as f64
    }

    /// `‖self − other‖₂ / ‖other‖₂`; falls back to the absolute error when
    /// `other` vanishes.
    pub fn relative_l2_error(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        let num: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let den: f64 = other.values.iter().map(|v| v.norm_sqr()).sum();
        Ok(if den > 0.0 {
            (num / den).sqrt()
        } else {
            (num * self.grid.cell_area()).sqrt()
        })
    }

    /// Bilinear interpolation; `None` outside the node hull.
    pub fn interpolate(&self, z: Complex64) -> Option<Complex64> {
        let n = self.grid.n();
        let (r, c) = self.grid.fractional_index(z);
        let last = (n - 1) as f64;
        if !(r >= 0.0 && c >= 0.0 && r <= last && c <= last) {
            return None;
        }
        let r0 = (r.floor() as usize).min(n - 2);
        let c0 = (c.floor() as usize).min(n - 2);
        let tr = r - r0 as f64;
        let tc = c - c0 as f64;
        let v00 = self.get(r0, c0);
        let v01 = self.get(r0, c0 + 1);
        let v10 = self.get(r0 + 1, c0);
        let v11 = self.get(r0 + 1, c0 + 1);
        Some(v00 * ((1.0 - tr) * (1.0 - tc)) + v01 * ((1.0 - tr) * tc) + v10 * (tr * (1.0 - tc)) + v11 * (tr * tc))
    }

    /// True when every nonzero sample lies inside the central
    /// `fraction` of the box.
    pub fn supported_in_central(&self, fraction: f64) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(i, v)| *v == Complex64::new(0.0, 0.0) || self.grid.in_central(self.grid.node_at(i), fraction))
    }

    /// Central finite differences `(∂f, ∂̄f)` with one-sided stencils on the
    /// box edge.
    pub fn wirtinger_derivatives(&self) -> (Field, Field) {
        let n = self.grid.n();
        let h = self.grid.spacing();
        let mut d = Vec::with_capacity(self.grid.len());
        let mut dbar = Vec::with_capacity(self.grid.len());
        let diff = |lo: Complex64, hi: Complex64, span: usize| (hi - lo) / (h * span as f64);
        for row in 0..n {
            for col in 0..n {
                let (c0, c1) = (col.saturating_sub(1), (col + 1).min(n - 1));
                let (r0, r1) = (row.saturating_sub(1), (row + 1).min(n - 1));
                let fx = diff(self.get(row, c0), self.get(row, c1), c1 - c0);
                let fy = diff(self.get(r0, col), self.get(r1, col), r1 - r0);
                let i = Complex64::new(0.0, 1.0);
                d.push((fx - i * fy) * 0.5);
                dbar.push((fx + i * fy) * 0.5);
            }
        }
        (Field::from_parts(self.grid, d), Field::from_parts(self.grid, dbar))
    }
}
