//! Quadrature rules backing the matrix-element integrals.

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::num::{real, Real};

/// Largest Gauss-Hermite order accepted; beyond this the scaled recurrence
/// values overflow f64 near the extreme nodes.
pub const MAX_GAUSS_HERMITE_ORDER: usize = 200;

/// Quadrature rule for integrals over the real line.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureRule<T> {
    /// Trapezoid rule on an explicit truncated grid.
    TrapezoidOnGrid(SpatialGrid<T>),
    /// Gauss-Hermite rule with weight `exp(-x^2)`.
    GaussHermite { order: usize },
}

impl<T: Real> QuadratureRule<T> {
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        if !(2..=MAX_GAUSS_HERMITE_ORDER).contains(&order) {
            return Err(Error::InvalidParameter(format!(
                "gauss-hermite order must be in [2, {MAX_GAUSS_HERMITE_ORDER}], got {order}"
            )));
        }
        Ok(Self::GaussHermite { order })
    }

    pub fn describe(&self) -> String {
        match self {
            Self::TrapezoidOnGrid(g) => format!(
                "trapezoid[{},{}]x{}",
                g.x_min().to_f64().unwrap_or(f64::NAN),
                g.x_max().to_f64().unwrap_or(f64::NAN),
                g.len()
            ),
            Self::GaussHermite { order } => format!("gauss-hermite({order})"),
        }
    }
}

/// Nodes and weights of the Gauss-Hermite rule: `integral exp(-x^2) g(x) dx
/// ~= sum w_i g(x_i)`, exact for polynomials of degree `2*order - 1`.
///
/// Nodes are strictly increasing, weights strictly positive. Computed in f64
/// and cast to the working scalar.
pub fn gauss_hermite_nodes_weights<T: Real>(order: usize) -> Result<(Vec<T>, Vec<T>)> {
    if !(2..=MAX_GAUSS_HERMITE_ORDER).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "gauss-hermite order must be in [2, {MAX_GAUSS_HERMITE_ORDER}], got {order}"
        )));
    }
    let n = order;
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];

    // Newton iteration on the orthonormal Hermite polynomials, largest root
    // first, with the classical initial guesses.
    let nf = n as f64;
    let mut z = 0.0f64;
    let half = n.div_ceil(2);
    for i in 0..half {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[n - 1],
            3 => 1.91 * z - 0.91 * nodes[n - 2],
            _ => 2.0 * z - nodes[n - i + 1],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (p, dp) = orthonormal_hermite_with_derivative(n, z);
            pp = dp;
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                let (p2, dp2) = orthonormal_hermite_with_derivative(n, z);
                pp = dp2;
                let _ = p2;
                break;
            }
        }
        nodes[n - 1 - i] = z;
        nodes[i] = -z;
        let w = 2.0 / (pp * pp);
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        // middle node is exactly zero for odd order
        nodes[n / 2] = 0.0;
        let (_, dp) = orthonormal_hermite_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (dp * dp);
    }

    for w in &nodes {
        if !w.is_finite() {
            return Err(Error::NonFinite("gauss-hermite node computation"));
        }
    }
    Ok((
        nodes.into_iter().map(|x| real::<T>(x)).collect(),
        weights.into_iter().map(|w| real::<T>(w)).collect(),
    ))
}

/// Value and derivative of the degree-n Hermite polynomial orthonormal under
/// the weight `exp(-x^2)`.
fn orthonormal_hermite_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let pi_quarter = std::f64::consts::PI.powf(-0.25);
    let mut pm1 = 0.0f64;
    let mut p = pi_quarter;
    for j in 0..n {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * p - (jf / (jf + 1.0)).sqrt() * pm1;
        pm1 = p;
        p = next;
    }
    let dp = (2.0 * n as f64).sqrt() * pm1;
    (p, dp)
}
