//! Uniform spatial and frequency grids and sampled complex fields.

use crate::error::{Error, Result};
use crate::num::{real, C, Real};

/// Minimum sample count accepted by either grid kind.
pub const MIN_SAMPLES: usize = 8;

/// Uniform grid on `[x_min, x_max]` with `n` samples including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid<T> {
    x_min: T,
    x_max: T,
    n: usize,
}

impl<T: Real> SpatialGrid<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "spatial grid needs finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < MIN_SAMPLES {
            return Err(Error::GridTooSmall {
                context: "spatial grid",
                min: MIN_SAMPLES,
                got: n,
            });
        }
        let grid = Self { x_min, x_max, n };
        if !(grid.spacing() > T::zero() && grid.spacing().is_finite()) {
            return Err(Error::InvalidGrid("spatial spacing not positive/finite".into()));
        }
        Ok(grid)
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> T {
        (self.x_max - self.x_min) / real::<T>((self.n - 1) as f64)
    }

    pub fn point(&self, i: usize) -> T {
        self.x_min + self.spacing() * real::<T>(i as f64)
    }

    /// Trapezoid weight of sample `i` (half weight at the endpoints).
    pub fn weight(&self, i: usize) -> T {
        let h = self.spacing();
        if i == 0 || i == self.n - 1 {
            h * real(0.5)
        } else {
            h
        }
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }
}

/// Uniform symmetric grid on `[-gamma_max, gamma_max]` with `m` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid<T> {
    gamma_max: T,
    m: usize,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn new(gamma_max: T, m: usize) -> Result<Self> {
        if !(gamma_max.is_finite() && gamma_max > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "frequency grid needs gamma_max > 0, got {gamma_max}"
            )));
        }
        if m < MIN_SAMPLES {
            return Err(Error::GridTooSmall {
                context: "frequency grid",
                min: MIN_SAMPLES,
                got: m,
            });
        }
        Ok(Self { gamma_max, m })
    }

    pub fn gamma_max(&self) -> T {
        self.gamma_max
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> T {
        (self.gamma_max + self.gamma_max) / real::<T>((self.m - 1) as f64)
    }

    pub fn point(&self, j: usize) -> T {
        -self.gamma_max + self.spacing() * real::<T>(j as f64)
    }

    pub fn weight(&self, j: usize) -> T {
        let h = self.spacing();
        if j == 0 || j == self.m - 1 {
            h * real(0.5)
        } else {
            h
        }
    }

    pub fn points(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.m).map(move |j| self.point(j))
    }
}

/// Which domain a field is sampled on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridKind<T> {
    Spatial(SpatialGrid<T>),
    Frequency(FrequencyGrid<T>),
}

impl<T: Real> GridKind<T> {
    pub fn len(&self) -> usize {
        match self {
            GridKind::Spatial(g) => g.len(),
            GridKind::Frequency(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> T {
        match self {
            GridKind::Spatial(g) => g.point(i),
            GridKind::Frequency(g) => g.point(i),
        }
    }

    pub fn weight(&self, i: usize) -> T {
        match self {
            GridKind::Spatial(g) => g.weight(i),
            GridKind::Frequency(g) => g.weight(i),
        }
    }
}

/// Complex samples of a function on a spatial or frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    samples: Vec<C<T>>,
    grid: GridKind<T>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(samples: Vec<C<T>>, grid: GridKind<T>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch("sample count does not match grid"));
        }
        Ok(Self { samples, grid })
    }

    pub fn zeros(grid: GridKind<T>) -> Self {
        Self {
            samples: vec![C::new(T::zero(), T::zero()); grid.len()],
            grid,
        }
    }

    pub fn from_fn_spatial(grid: SpatialGrid<T>, f: impl Fn(T) -> C<T>) -> Self {
        let samples = grid.points().map(f).collect();
        Self {
            samples,
            grid: GridKind::Spatial(grid),
        }
    }

    pub fn from_fn_frequency(grid: FrequencyGrid<T>, f: impl Fn(T) -> C<T>) -> Self {
        let samples = grid.points().map(f).collect();
        Self {
            samples,
            grid: GridKind::Frequency(grid),
        }
    }

    pub fn grid(&self) -> &GridKind<T> {
        &self.grid
    }

    pub fn spatial_grid(&self) -> Result<SpatialGrid<T>> {
        match self.grid {
            GridKind::Spatial(g) => Ok(g),
            GridKind::Frequency(_) => Err(Error::GridMismatch("expected a spatial-domain field")),
        }
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid<T>> {
        match self.grid {
            GridKind::Frequency(g) => Ok(g),
            GridKind::Spatial(_) => Err(Error::GridMismatch("expected a frequency-domain field")),
        }
    }

    pub fn samples(&self) -> &[C<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [C<T>] {
        &mut self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_finite(&self, context: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(context))
        }
    }

    /// Pointwise map preserving the grid.
    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            samples: self.samples.iter().map(|&z| f(z)).collect(),
            grid: self.grid,
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields on different grids"));
        }
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            grid: self.grid,
        })
    }

    pub fn scale(&self, c: C<T>) -> Self {
        self.map(|z| z * c)
    }
}
