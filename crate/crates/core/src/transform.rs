//! Fourier transforms with a fixed convention, inner products, and norms.
//!
//! Convention used everywhere in this crate:
//!
//! * forward:  `f^(gamma) = integral f(x) exp(-i gamma x) dx` (no prefactor)
//! * inverse:  `f(x) = 1/(2 pi) integral f^(gamma) exp(i gamma x) dgamma`
//! * spatial inner product `<a|b> = integral a conj(b) dx`
//! * frequency inner product carries `1/(2 pi)` so Parseval reads
//!   `<f|g> = <f^|g^>_freq`
//!
//! Inner products conjugate the SECOND argument. Both transforms are direct
//! trapezoid evaluations; they are the correctness reference for everything
//! built on top.

use crate::error::{Error, Result};
use crate::grid::{ComplexField, FrequencyGrid, GridKind, SpatialGrid};
use crate::num::{pairwise_sum_by, pairwise_sum_real_by, C, Real};

/// Forward transform of a spatial field onto an explicit frequency grid.
pub fn forward_ft<T: Real>(f: &ComplexField<T>, fg: FrequencyGrid<T>) -> Result<ComplexField<T>> {
    let sg = f.spatial_grid()?;
    f.ensure_finite("forward_ft input")?;
    let samples = f.samples();
    let out = (0..fg.len())
        .map(|j| {
            let gamma = fg.point(j);
            pairwise_sum_by(sg.len(), |i| {
                let phase = -gamma * sg.point(i);
                let w = sg.weight(i);
                samples[i] * C::new(phase.cos() * w, phase.sin() * w)
            })
        })
        .collect();
    ComplexField::new(out, GridKind::Frequency(fg))
}

/// Inverse transform of a frequency field onto an explicit spatial grid.
pub fn inverse_ft<T: Real>(field: &ComplexField<T>, sg: SpatialGrid<T>) -> Result<ComplexField<T>> {
    let fg = field.frequency_grid()?;
    field.ensure_finite("inverse_ft input")?;
    let samples = field.samples();
    let two_pi_inv = (T::PI() + T::PI()).recip();
    let out = (0..sg.len())
        .map(|i| {
            let x = sg.point(i);
            let acc = pairwise_sum_by(fg.len(), |j| {
                let phase = fg.point(j) * x;
                let w = fg.weight(j);
                samples[j] * C::new(phase.cos() * w, phase.sin() * w)
            });
            acc * two_pi_inv
        })
        .collect();
    ComplexField::new(out, GridKind::Spatial(sg))
}

/// Domain selector for [`inner_product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Spatial,
    Frequency,
}

/// `<a|b>` with conjugation on the second argument.
///
/// Spatial fields integrate plainly; frequency fields carry the `1/(2 pi)`
/// factor so the two domains agree through Parseval.
pub fn inner_product<T: Real>(
    a: &ComplexField<T>,
    b: &ComplexField<T>,
    domain: Domain,
) -> Result<C<T>> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch("inner product operands"));
    }
    match (domain, a.grid()) {
        (Domain::Spatial, GridKind::Spatial(_)) | (Domain::Frequency, GridKind::Frequency(_)) => {}
        _ => return Err(Error::GridMismatch("inner product domain does not match grid")),
    }
    let grid = a.grid();
    let (xs, ys) = (a.samples(), b.samples());
    let raw = pairwise_sum_by(grid.len(), |i| xs[i] * ys[i].conj() * grid.weight(i));
    Ok(match domain {
        Domain::Spatial => raw,
        Domain::Frequency => raw * (T::PI() + T::PI()).recip(),
    })
}

/// Squared L2 norm under the domain's convention.
pub fn norm_sq<T: Real>(f: &ComplexField<T>) -> T {
    let grid = f.grid();
    let samples = f.samples();
    let raw = pairwise_sum_real_by(grid.len(), |i| samples[i].norm_sqr() * grid.weight(i));
    match grid {
        GridKind::Spatial(_) => raw,
        GridKind::Frequency(_) => raw / (T::PI() + T::PI()),
    }
}

/// L2 norm under the domain's convention.
pub fn norm<T: Real>(f: &ComplexField<T>) -> T {
    norm_sq(f).sqrt()
}

/// Fraction of `||f||^2` not captured by `f^` on the frequency grid.
///
/// Zero (after clipping) when the grid covers the essential support of the
/// transform; reported so callers can verify the truncation assumption.
pub fn energy_leak_fraction<T: Real>(f: &ComplexField<T>, f_hat: &ComplexField<T>) -> Result<T> {
    f.spatial_grid()?;
    f_hat.frequency_grid()?;
    let total = norm_sq(f);
    if total == T::zero() {
        return Ok(T::zero());
    }
    let captured = norm_sq(f_hat);
    Ok((T::one() - captured / total).max(T::zero()))
}

/// Spectral second derivative: transform, multiply by `-gamma^2`, invert.
///
/// The frequency grid is derived from the spatial grid (Nyquist band, odd
/// sample count so gamma = 0 is present).
pub fn second_derivative<T: Real>(f: &ComplexField<T>) -> Result<ComplexField<T>> {
    let sg = f.spatial_grid()?;
    let fg = nyquist_frequency_grid(sg)?;
    let mut hat = forward_ft(f, fg)?;
    for (j, v) in hat.samples_mut().iter_mut().enumerate() {
        let gamma = fg.point(j);
        *v = *v * (-(gamma * gamma));
    }
    inverse_ft(&hat, sg)
}

/// Frequency grid reaching the Nyquist band of a spatial grid.
pub fn nyquist_frequency_grid<T: Real>(sg: SpatialGrid<T>) -> Result<FrequencyGrid<T>> {
    let gamma_max = T::PI() / sg.spacing();
    FrequencyGrid::new(gamma_max, sg.len() | 1)
}
