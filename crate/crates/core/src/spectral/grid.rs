use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform periodic sampling of `[-x_max, x_max)` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialGrid {
    n: usize,
    x_max: f64,
}

impl SpatialGrid {
    pub fn new(n: usize, x_max: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "grid size must be a power of two >= 8, got {n}"
            )));
        }
        if !(x_max.is_finite() && x_max > 0.0) {
            return Err(Error::InvalidInput(format!(
                "grid half-width must be positive and finite, got {x_max}"
            )));
        }
        Ok(Self { n, x_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Spatial spacing `Δx = 2·x_max/n`.
    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / self.n as f64
    }

    /// Frequency spacing `Δξ = π/x_max`.
    pub fn dxi(&self) -> f64 {
        PI / self.x_max
    }

    /// Nyquist frequency `π/Δx`.
    pub fn xi_max(&self) -> f64 {
        PI / self.dx()
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.x_max + j as f64 * self.dx()
    }

    /// Signed frequency index of FFT bin `k`.
    pub fn signed_index(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    pub fn xi(&self, k: usize) -> f64 {
        self.signed_index(k) as f64 * self.dxi()
    }

    /// FFT bin holding the frequency nearest to `xi` (clamped to the grid).
    pub fn nearest_bin(&self, xi: f64) -> usize {
        let half = (self.n / 2) as i64;
        let idx = (xi / self.dxi()).round().clamp(-(half as f64), (half - 1) as f64) as i64;
        if idx >= 0 {
            idx as usize
        } else {
            (idx + self.n as i64) as usize
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.x(j))
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.xi(k))
    }

    pub(crate) fn ensure_same(&self, other: &SpatialGrid) -> Result<()> {
        if self.n != other.n || self.x_max.to_bits() != other.x_max.to_bits() {
            return Err(Error::GridMismatch(format!(
                "(n={}, x_max={}) vs (n={}, x_max={})",
                self.n, self.x_max, other.n, other.x_max
            )));
        }
        Ok(())
    }
}

/// Samples of a function on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidInput(format!(
                "signal has {} samples, grid expects {}",
                values.len(),
                grid.n
            )));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite sample at index {j}")));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x_j)` on the grid.
    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.positions().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Discrete `L²` norm `(Σ|f_j|²·Δx)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    /// `‖self − other‖₂` on a shared grid.
    pub fn distance(&self, other: &SampledSignal) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.dx()).sqrt())
    }

    pub fn sup_distance(&self, other: &SampledSignal) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn scaled(&self, c: Complex64) -> SampledSignal {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Samples of `f̂` at the dual frequencies, FFT ordered.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: SpatialGrid,
    values: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidInput(format!(
                "spectrum has {} bins, grid expects {}",
                values.len(),
                grid.n
            )));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput(format!("non-finite bin at index {k}")));
        }
        Ok(Self { grid, values })
    }

    /// Evaluates `g(ξ_k)` at every bin.
    pub fn from_fn(grid: SpatialGrid, g: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.frequencies().map(g).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: SpatialGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Discrete `L²` norm `(Σ|F_k|²·Δξ)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dxi()).sqrt()
    }

    pub fn distance(&self, other: &Spectrum) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((s * self.grid.dxi()).sqrt())
    }

    pub fn scaled(&self, c: Complex64) -> Spectrum {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}
