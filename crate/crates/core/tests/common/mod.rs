//! Shared oracles for the integration suites: independent quadrature and
//! closed forms used to vouch for expected values before they are asserted.
#![allow(dead_code)]

use opwave_core::{C64, ComplexField, Field64, SpatialGrid64};

/// Composite Simpson evaluation of the forward transform integral on a fine
/// sub-grid; independent of the trapezoid implementation under test.
pub fn simpson_ft(f: impl Fn(f64) -> C64, gamma: f64, a: f64, b: f64, panels: usize) -> C64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..=n {
        let x = a + h * i as f64;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += f(x) * C64::new(0.0, -gamma * x).exp() * w;
    }
    acc * (h / 3.0)
}

/// Relative L2 distance with the max-norm denominator.
pub fn rel_l2(a: &Field64, b: &Field64) -> f64 {
    let diff = a.zip_with(b, |x, y| x - y).unwrap();
    let denom = opwave_core::norm(a).max(opwave_core::norm(b));
    if denom == 0.0 {
        0.0
    } else {
        opwave_core::norm(&diff) / denom
    }
}

/// Max pointwise distance.
pub fn max_abs_diff(a: &Field64, b: &Field64) -> f64 {
    a.samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Standard Gaussian exp(-x^2/2) sampled on a grid.
pub fn gaussian(sg: SpatialGrid64) -> Field64 {
    ComplexField::from_fn_spatial(sg, |x| C64::new((-x * x / 2.0).exp(), 0.0))
}

/// Heat-kernel evolution of the standard Gaussian under u_t = u_xx.
pub fn heat_closed_form(sg: SpatialGrid64, t: f64) -> Field64 {
    ComplexField::from_fn_spatial(sg, |x| {
        C64::new(
            (1.0 + 2.0 * t).powf(-0.5) * (-x * x / (2.0 * (1.0 + 2.0 * t))).exp(),
            0.0,
        )
    })
}
