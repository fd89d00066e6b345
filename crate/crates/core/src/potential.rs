//! Potentials V(x) for the 1D Hamiltonian.

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::num::Real;

/// Real potential on the line.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential<T> {
    Zero,
    /// V(x) = x^2
    Harmonic,
    /// V(x) = depth for |x| <= half_width, 0 elsewhere; depth < 0.
    FiniteWell { depth: T, half_width: T },
    /// Samples pinned to a specific grid.
    Tabulated { grid: SpatialGrid<T>, values: Vec<T> },
}

impl<T: Real> Potential<T> {
    pub fn finite_well(depth: T, half_width: T) -> Result<Self> {
        if !(depth < T::zero() && depth.is_finite()) {
            return Err(Error::InvalidParameter("finite-well depth must be negative".into()));
        }
        if !(half_width > T::zero() && half_width.is_finite()) {
            return Err(Error::InvalidParameter("finite-well half-width must be > 0".into()));
        }
        Ok(Self::FiniteWell { depth, half_width })
    }

    pub fn tabulated(grid: SpatialGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch("tabulated potential length"));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("tabulated potential samples"));
        }
        Ok(Self::Tabulated { grid, values })
    }

    /// Pointwise value; tabulated potentials only support their own grid and
    /// must go through [`Potential::values_on_grid`].
    pub fn eval(&self, x: T) -> Result<T> {
        match self {
            Self::Zero => Ok(T::zero()),
            Self::Harmonic => Ok(x * x),
            Self::FiniteWell { depth, half_width } => {
                Ok(if x.abs() <= *half_width { *depth } else { T::zero() })
            }
            Self::Tabulated { .. } => Err(Error::InvalidParameter(
                "tabulated potential has no off-grid values".into(),
            )),
        }
    }

    pub fn values_on_grid(&self, sg: SpatialGrid<T>) -> Result<Vec<T>> {
        match self {
            Self::Tabulated { grid, values } => {
                if *grid != sg {
                    return Err(Error::GridMismatch("tabulated potential grid"));
                }
                Ok(values.clone())
            }
            _ => sg.points().map(|x| self.eval(x)).collect(),
        }
    }

    /// Smooth enough for Gauss-Hermite quadrature.
    pub fn is_smooth(&self) -> bool {
        matches!(self, Self::Zero | Self::Harmonic)
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Zero => "zero".into(),
            Self::Harmonic => "harmonic".into(),
            Self::FiniteWell { depth, half_width } => format!(
                "finite-well(V0={},b={})",
                depth.to_f64().unwrap_or(f64::NAN),
                half_width.to_f64().unwrap_or(f64::NAN)
            ),
            Self::Tabulated { grid, .. } => format!("tabulated(n={})", grid.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_well_validates_parameters() {
        assert!(Potential::finite_well(-2.0, 1.0).is_ok());
        assert!(Potential::finite_well(2.0, 1.0).is_err());
        assert!(Potential::finite_well(-2.0, 0.0).is_err());
    }

    #[test]
    fn finite_well_is_piecewise_constant() {
        let v = Potential::finite_well(-3.0, 1.5).unwrap();
        assert_eq!(v.eval(0.0).unwrap(), -3.0);
        assert_eq!(v.eval(1.5).unwrap(), -3.0);
        assert_eq!(v.eval(1.5000001).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_requires_matching_grid() {
        let g = SpatialGrid::new(-1.0, 1.0, 16).unwrap();
        let other = SpatialGrid::new(-1.0, 1.0, 32).unwrap();
        let v = Potential::tabulated(g, vec![1.0; 16]).unwrap();
        assert!(v.values_on_grid(g).is_ok());
        assert!(v.values_on_grid(other).is_err());
        assert!(Potential::tabulated(g, vec![1.0; 15]).is_err());
        assert!(Potential::tabulated(g, vec![f64::INFINITY; 16]).is_err());
    }
}
