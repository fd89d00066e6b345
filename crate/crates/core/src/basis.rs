//! Basis families spanning L2(R): Hermite functions and a Gaussian frame.
//!
//! The two families have complementary properties. Hermite functions are
//! orthonormal but their Fourier transforms vanish at the real zeros of the
//! Hermite polynomials; the Gaussian frame has nowhere-vanishing transforms
//! but is not orthonormal. Every report downstream names the family used.

use crate::error::{Error, Result};
use crate::grid::{FrequencyGrid, SpatialGrid};
use crate::matrix::CMatrix;
use crate::num::{complex, pairwise_sum_by, real, C, Real};

/// Evaluation derivative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Deriv {
    D0,
    D1,
    D2,
}

/// A truncated basis family with `n_modes` elements, indices `0..n_modes`.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisFamily<T> {
    /// Orthonormal Hermite functions
    /// `e_n(x) = (2^n n! sqrt(pi))^{-1/2} H_n(x) exp(-x^2/2)`.
    Hermite { n_modes: usize },
    /// Unit-norm shifted Gaussians
    /// `e_k(x) = (pi w^2)^{-1/4} exp(-(x - c_k)^2 / (2 w^2))` with centers
    /// `c_k = (k - (N-1)/2) * a`.
    GaussianFrame { n_modes: usize, spacing: T, width: T },
}

impl<T: Real> BasisFamily<T> {
    pub fn hermite(n_modes: usize) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::InvalidParameter(format!(
                "basis needs at least 2 modes, got {n_modes}"
            )));
        }
        Ok(Self::Hermite { n_modes })
    }

    pub fn gaussian_frame(n_modes: usize, spacing: T, width: T) -> Result<Self> {
        if n_modes < 2 {
            return Err(Error::InvalidParameter(format!(
                "basis needs at least 2 modes, got {n_modes}"
            )));
        }
        if !(spacing > T::zero() && spacing.is_finite()) {
            return Err(Error::InvalidParameter("gaussian-frame spacing must be > 0".into()));
        }
        if !(width > T::zero() && width.is_finite()) {
            return Err(Error::InvalidParameter("gaussian-frame width must be > 0".into()));
        }
        Ok(Self::GaussianFrame {
            n_modes,
            spacing,
            width,
        })
    }

    pub fn n_modes(&self) -> usize {
        match self {
            Self::Hermite { n_modes } => *n_modes,
            Self::GaussianFrame { n_modes, .. } => *n_modes,
        }
    }

    /// Same family with a different truncation order.
    pub fn with_n_modes(&self, n_modes: usize) -> Result<Self> {
        match self {
            Self::Hermite { .. } => Self::hermite(n_modes),
            Self::GaussianFrame { spacing, width, .. } => {
                Self::gaussian_frame(n_modes, *spacing, *width)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::Hermite { n_modes } => format!("hermite(N={n_modes})"),
            Self::GaussianFrame {
                n_modes,
                spacing,
                width,
            } => format!(
                "gaussian-frame(N={n_modes},a={},w={})",
                spacing.to_f64().unwrap_or(f64::NAN),
                width.to_f64().unwrap_or(f64::NAN)
            ),
        }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k < self.n_modes() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: k,
                n_modes: self.n_modes(),
            })
        }
    }

    /// Center of frame element `k`; Hermite elements are centered at 0.
    pub fn center(&self, k: usize) -> T {
        match self {
            Self::Hermite { .. } => T::zero(),
            Self::GaussianFrame {
                n_modes, spacing, ..
            } => {
                let offset = real::<T>(k as f64) - real::<T>((*n_modes as f64 - 1.0) / 2.0);
                offset * *spacing
            }
        }
    }

    /// Evaluate `e_k`, `e_k'`, or `e_k''` at `x` from analytic recurrences.
    pub fn eval(&self, k: usize, x: T, deriv: Deriv) -> Result<C<T>> {
        self.check_index(k)?;
        let v = match self {
            Self::Hermite { .. } => {
                let vals = hermite_values(x, k + 3);
                match deriv {
                    Deriv::D0 => vals[k],
                    Deriv::D1 => hermite_first_derivative(&vals, k),
                    Deriv::D2 => hermite_second_derivative(&vals, k),
                }
            }
            Self::GaussianFrame { width, .. } => {
                let c = self.center(k);
                let w2 = *width * *width;
                let u = x - c;
                let amp = real::<T>(std::f64::consts::PI.powf(-0.25))
                    / width.sqrt()
                    * (-(u * u) / (w2 + w2)).exp();
                match deriv {
                    Deriv::D0 => amp,
                    Deriv::D1 => -u / w2 * amp,
                    Deriv::D2 => ((u * u) / (w2 * w2) - w2.recip()) * amp,
                }
            }
        };
        Ok(C::new(v, T::zero()))
    }

    /// Analytic Fourier transform of element `k` under the crate convention.
    ///
    /// Hermite: `e_n^(g) = sqrt(2 pi) (-i)^n e_n(g)`.
    /// Gaussian frame: `e_k^(g) = (4 pi w^2)^{1/4} exp(-w^2 g^2/2) exp(-i c_k g)`.
    pub fn element_ft(&self, k: usize, gamma: T) -> Result<C<T>> {
        self.check_index(k)?;
        match self {
            Self::Hermite { .. } => {
                let scale = real::<T>((2.0 * std::f64::consts::PI).sqrt());
                let e = self.eval(k, gamma, Deriv::D0)?;
                Ok(e * phase_minus_i_pow(k) * scale)
            }
            Self::GaussianFrame { width, .. } => {
                let c = self.center(k);
                let w2 = *width * *width;
                let amp = real::<T>((4.0 * std::f64::consts::PI).powf(0.25))
                    * width.sqrt()
                    * (-(w2 * gamma * gamma) * real::<T>(0.5)).exp();
                let phase = -c * gamma;
                Ok(C::new(amp * phase.cos(), amp * phase.sin()))
            }
        }
    }

    /// Gram matrix `<e_k | e_l>` by trapezoid quadrature on `sg`.
    pub fn gram(&self, sg: SpatialGrid<T>) -> Result<CMatrix<T>> {
        let n = self.n_modes();
        let table = self.sample_table(sg, Deriv::D0)?;
        let mut gram = CMatrix::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                let v = pairwise_sum_by(sg.len(), |i| {
                    table[k][i] * table[l][i].conj() * sg.weight(i)
                });
                gram.set(k, l, v);
            }
        }
        Ok(gram)
    }

    /// All elements (or a derivative) sampled on a spatial grid.
    pub fn sample_table(&self, sg: SpatialGrid<T>, deriv: Deriv) -> Result<Vec<Vec<C<T>>>> {
        (0..self.n_modes())
            .map(|k| {
                sg.points()
                    .map(|x| self.eval(k, x, deriv))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }

    /// All element transforms sampled on a frequency grid.
    pub fn transform_table(&self, fg: FrequencyGrid<T>) -> Result<Vec<Vec<C<T>>>> {
        (0..self.n_modes())
            .map(|k| {
                fg.points()
                    .map(|g| self.element_ft(k, g))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }
}

/// `(-i)^k` without trigonometry.
fn phase_minus_i_pow<T: Real>(k: usize) -> C<T> {
    match k % 4 {
        0 => complex(1.0, 0.0),
        1 => complex(0.0, -1.0),
        2 => complex(-1.0, 0.0),
        _ => complex(0.0, 1.0),
    }
}

/// Hermite functions `e_0(x) .. e_{count-1}(x)` by the stable normalized
/// three-term recurrence `e_{n+1} = x sqrt(2/(n+1)) e_n - sqrt(n/(n+1)) e_{n-1}`.
pub fn hermite_values<T: Real>(x: T, count: usize) -> Vec<T> {
    let mut vals = Vec::with_capacity(count);
    let e0 = real::<T>(std::f64::consts::PI.powf(-0.25)) * (-(x * x) * real::<T>(0.5)).exp();
    vals.push(e0);
    if count > 1 {
        vals.push(x * real::<T>(std::f64::consts::SQRT_2) * e0);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = x * real::<T>((2.0 / (nf + 1.0)).sqrt()) * vals[n]
            - real::<T>((nf / (nf + 1.0)).sqrt()) * vals[n - 1];
        vals.push(next);
    }
    vals
}

/// Single Hermite function value.
pub fn hermite_function<T: Real>(n: usize, x: T) -> T {
    hermite_values(x, n + 1)[n]
}

/// Hermite functions with the Gaussian factor removed,
/// `e_n(x) exp(x^2/2)`; used by Gauss-Hermite quadrature where the weight
/// supplies the `exp(-x^2)` factor.
pub fn scaled_hermite_values<T: Real>(x: T, count: usize) -> Vec<T> {
    let mut vals = Vec::with_capacity(count);
    let e0 = real::<T>(std::f64::consts::PI.powf(-0.25));
    vals.push(e0);
    if count > 1 {
        vals.push(x * real::<T>(std::f64::consts::SQRT_2) * e0);
    }
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        let next = x * real::<T>((2.0 / (nf + 1.0)).sqrt()) * vals[n]
            - real::<T>((nf / (nf + 1.0)).sqrt()) * vals[n - 1];
        vals.push(next);
    }
    vals
}

/// `e_k'` from ladder values: `sqrt(k/2) e_{k-1} - sqrt((k+1)/2) e_{k+1}`.
pub fn hermite_first_derivative<T: Real>(vals: &[T], k: usize) -> T {
    let kf = k as f64;
    let lower = if k > 0 {
        real::<T>((kf / 2.0).sqrt()) * vals[k - 1]
    } else {
        T::zero()
    };
    lower - real::<T>(((kf + 1.0) / 2.0).sqrt()) * vals[k + 1]
}

/// `e_k''` from ladder values:
/// `sqrt(k(k-1))/2 e_{k-2} - (2k+1)/2 e_k + sqrt((k+1)(k+2))/2 e_{k+2}`.
pub fn hermite_second_derivative<T: Real>(vals: &[T], k: usize) -> T {
    let kf = k as f64;
    let lower = if k >= 2 {
        real::<T>((kf * (kf - 1.0)).sqrt() / 2.0) * vals[k - 2]
    } else {
        T::zero()
    };
    lower - real::<T>((2.0 * kf + 1.0) / 2.0) * vals[k]
        + real::<T>(((kf + 1.0) * (kf + 2.0)).sqrt() / 2.0) * vals[k + 2]
}

/// Side-condition report for a family on given grids.
#[derive(Debug, Clone)]
pub struct ConditionReport<T> {
    /// Gram matrix `<e_k|e_l>` by quadrature.
    pub gram: CMatrix<T>,
    /// Per-element minimum of `|e_k^|`, refined around grid minima.
    pub min_abs_ft: Vec<T>,
    /// Whether `min |e_k^| > eps` (no real roots within the working band).
    pub condition_i_satisfied: Vec<bool>,
}

/// Check the side conditions: Gram structure and absence of real zeros of
/// the element transforms over the frequency band.
///
/// A plain grid scan cannot see a zero that falls between samples, so each
/// interior local minimum of `|e_k^|` is refined by golden-section search
/// inside its bracket before comparison with `eps`.
pub fn condition_check<T: Real>(
    family: &BasisFamily<T>,
    sg: SpatialGrid<T>,
    fg: FrequencyGrid<T>,
    eps: T,
) -> Result<ConditionReport<T>> {
    if !eps.is_finite() || eps <= T::zero() {
        return Err(Error::InvalidParameter("condition_check eps must be > 0".into()));
    }
    let gram = family.gram(sg)?;
    let n = family.n_modes();
    let m = fg.len();
    let mut min_abs_ft = Vec::with_capacity(n);
    let mut satisfied = Vec::with_capacity(n);
    for k in 0..n {
        let modulus: Vec<T> = (0..m)
            .map(|j| family.element_ft(k, fg.point(j)).map(|z| z.norm()))
            .collect::<Result<_>>()?;
        let mut best = modulus[0].min(modulus[m - 1]);
        for j in 1..m - 1 {
            if modulus[j] <= modulus[j - 1] && modulus[j] <= modulus[j + 1] {
                let refined = golden_min(
                    |g| family.element_ft(k, g).map(|z| z.norm()).unwrap_or(T::infinity()),
                    fg.point(j - 1),
                    fg.point(j + 1),
                );
                best = best.min(refined).min(modulus[j]);
            }
        }
        min_abs_ft.push(best);
        satisfied.push(best > eps);
    }
    Ok(ConditionReport {
        gram,
        min_abs_ft,
        condition_i_satisfied: satisfied,
    })
}

/// Golden-section minimum of `f` on `[a, b]` with a fixed iteration count.
fn golden_min<T: Real>(f: impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let inv_phi = real::<T>((5.0f64.sqrt() - 1.0) / 2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..90 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * inv_phi;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * inv_phi;
            fd = f(d);
        }
    }
    fc.min(fd)
}
