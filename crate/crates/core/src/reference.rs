//! Classical reference solvers for `u_t = alpha u_xx + beta V(x) u` and the
//! closed-form oracles used to judge everything else.
//!
//! Two independent solvers with different space discretizations and boundary
//! treatments: Crank-Nicolson (finite differences, homogeneous Dirichlet box)
//! and Strang split-step (FFT, periodic). A discrepancy against both cannot
//! be blamed on a single oracle's bug.

use crate::basis::hermite_function;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridKind, SpatialGrid};
use crate::num::{real, C, Real};
use crate::potential::Potential;
use rustfft::FftNum;

/// Coefficients and stepping parameters for the generalized evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams<T> {
    /// Diffusion/dispersion coefficient multiplying u_xx.
    pub alpha: C<T>,
    /// Coupling multiplying V(x) u.
    pub beta: C<T>,
    pub dt: T,
    pub nsteps: usize,
}

impl<T: Real> EvolutionParams<T> {
    pub fn new(alpha: C<T>, beta: C<T>, dt: T, nsteps: usize) -> Result<Self> {
        if !(dt > T::zero() && dt.is_finite()) {
            return Err(Error::InvalidParameter("dt must be finite and > 0".into()));
        }
        if nsteps == 0 {
            return Err(Error::InvalidParameter("nsteps must be >= 1".into()));
        }
        Ok(Self {
            alpha,
            beta,
            dt,
            nsteps,
        })
    }

    /// Eq.-as-printed signs: `u_t = -u_xx + V u`.
    pub fn paper_literal(dt: T, nsteps: usize) -> Result<Self> {
        Self::new(
            C::new(-T::one(), T::zero()),
            C::new(T::one(), T::zero()),
            dt,
            nsteps,
        )
    }

    /// Heat flow with a potential: `u_t = u_xx - V u`.
    pub fn imaginary_time(dt: T, nsteps: usize) -> Result<Self> {
        Self::new(
            C::new(T::one(), T::zero()),
            C::new(-T::one(), T::zero()),
            dt,
            nsteps,
        )
    }

    /// Physical Schroedinger evolution: `u_t = i u_xx - i V u`.
    pub fn real_time(dt: T, nsteps: usize) -> Result<Self> {
        Self::new(
            C::new(T::zero(), T::one()),
            C::new(T::zero(), -T::one()),
            dt,
            nsteps,
        )
    }

    pub fn total_time(&self) -> T {
        self.dt * real::<T>(self.nsteps as f64)
    }
}

/// Per-run growth diagnostics; large multipliers flag ill-posed regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport<T> {
    pub steps: usize,
    /// Largest per-step amplification observed (norm ratio for CN, multiplier
    /// magnitude bound for split-step).
    pub max_step_growth: T,
}

/// Crank-Nicolson stepping with centered second differences and homogeneous
/// Dirichlet boundaries. The initial field must be negligible at the box
/// edges (below ~1e-12) for the boundary condition to be consistent.
pub fn crank_nicolson<T: Real>(
    f: &ComplexField<T>,
    v: &Potential<T>,
    p: &EvolutionParams<T>,
) -> Result<(ComplexField<T>, StepReport<T>)> {
    let sg = f.spatial_grid()?;
    f.ensure_finite("crank_nicolson input")?;
    let n = sg.len();
    let vvals = v.values_on_grid(sg)?;
    let h2 = sg.spacing() * sg.spacing();
    let half_dt = p.dt * real::<T>(0.5);
    let lam = p.alpha * (half_dt / h2);
    let interior = n - 2;

    // (I - dt/2 A) u_{k+1} = (I + dt/2 A) u_k, A = alpha D2 + beta V
    let mut diag = Vec::with_capacity(interior);
    for &vi in &vvals[1..n - 1] {
        let one = C::new(T::one(), T::zero());
        diag.push(one + lam * real::<T>(2.0) - p.beta * (half_dt * vi));
    }
    let off = -lam;

    let mut u: Vec<C<T>> = f.samples().to_vec();
    u[0] = C::new(T::zero(), T::zero());
    u[n - 1] = C::new(T::zero(), T::zero());
    let mut rhs = vec![C::new(T::zero(), T::zero()); interior];
    let mut cprime = vec![C::new(T::zero(), T::zero()); interior];
    let mut max_growth = T::zero();
    let mut prev_norm = state_norm(&u);

    for step in 0..p.nsteps {
        for i in 1..n - 1 {
            let lap = u[i - 1] - u[i] * real::<T>(2.0) + u[i + 1];
            rhs[i - 1] = u[i] + lam * lap + p.beta * (half_dt * vvals[i]) * u[i];
        }
        // Thomas solve (no pivoting; a vanishing pivot surfaces as a
        // non-finite state and is reported below).
        let mut denom = diag[0];
        cprime[0] = off / denom;
        u[1] = rhs[0] / denom;
        for i in 1..interior {
            denom = diag[i] - off * cprime[i - 1];
            if i < interior - 1 {
                cprime[i] = off / denom;
            }
            u[i + 1] = (rhs[i] - off * u[i]) / denom;
        }
        for i in (0..interior - 1).rev() {
            let next = u[i + 2];
            u[i + 1] = u[i + 1] - cprime[i] * next;
        }
        if !u.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::SolverDiverged { step });
        }
        let cur_norm = state_norm(&u);
        // norm overflow means the state is numerically meaningless even
        // though each sample is still representable
        if !cur_norm.is_finite() {
            return Err(Error::SolverDiverged { step });
        }
        if prev_norm > T::zero() {
            max_growth = max_growth.max(cur_norm / prev_norm);
        }
        prev_norm = cur_norm;
    }
    Ok((
        ComplexField::new(u, GridKind::Spatial(sg))?,
        StepReport {
            steps: p.nsteps,
            max_step_growth: max_growth,
        },
    ))
}

fn state_norm<T: Real>(u: &[C<T>]) -> T {
    u.iter()
        .fold(T::zero(), |acc, z| acc + z.norm_sqr())
        .sqrt()
}

/// Strang split-step with FFT kinetic steps (periodic boundaries):
/// half potential `e^{beta V dt/2}`, full kinetic `e^{-alpha gamma^2 dt}`,
/// half potential. Second order in dt.
pub fn split_step<T: Real + FftNum>(
    f: &ComplexField<T>,
    v: &Potential<T>,
    p: &EvolutionParams<T>,
) -> Result<(ComplexField<T>, StepReport<T>)> {
    let sg = f.spatial_grid()?;
    f.ensure_finite("split_step input")?;
    let n = sg.len();
    let vvals = v.values_on_grid(sg)?;

    let half_pot: Vec<C<T>> = vvals
        .iter()
        .map(|&vi| (p.beta * (vi * p.dt * real::<T>(0.5))).exp())
        .collect();
    // periodic wavenumbers on period n*h
    let period = sg.spacing() * real::<T>(n as f64);
    let two_pi = T::PI() + T::PI();
    let kinetic: Vec<C<T>> = (0..n)
        .map(|j| {
            let k = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            let gamma = two_pi * real::<T>(k) / period;
            (-p.alpha * (gamma * gamma * p.dt)).exp()
        })
        .collect();

    let max_pot = half_pot.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let max_kin = kinetic.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let max_step_growth = max_pot * max_pot * max_kin;

    let mut planner = rustfft::FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let inv_n = real::<T>(1.0 / n as f64);

    let mut state: Vec<C<T>> = f.samples().to_vec();
    for step in 0..p.nsteps {
        for (s, hp) in state.iter_mut().zip(&half_pot) {
            *s = *s * *hp;
        }
        fft.process(&mut state);
        for (s, k) in state.iter_mut().zip(&kinetic) {
            *s = *s * *k;
        }
        ifft.process(&mut state);
        for (s, hp) in state.iter_mut().zip(&half_pot) {
            *s = *s * *hp * inv_n;
        }
        if !state.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            || !state_norm(&state).is_finite()
        {
            return Err(Error::SolverDiverged { step });
        }
    }
    Ok((
        ComplexField::new(state, GridKind::Spatial(sg))?,
        StepReport {
            steps: p.nsteps,
            max_step_growth,
        },
    ))
}

/// Closed-form reference cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleCase<T> {
    /// Gaussian initial data under `u_t = alpha u_xx`, V = 0.
    FreeGaussianHeat,
    /// Hermite eigenstate n under `u_t = alpha u_xx + beta x^2 u` with
    /// `beta = -alpha`: factor `exp(-alpha (2n+1) t)`.
    HarmonicEigenstate { n: usize },
    /// Dispersing Gaussian with initial momentum under `u_t = alpha u_xx`,
    /// V = 0 (physical for alpha = i).
    FreePhase { momentum: T },
}

/// Evaluate a closed-form solution at time `t` on `sg`.
pub fn analytic_oracle<T: Real>(
    case: OracleCase<T>,
    p: &EvolutionParams<T>,
    t: T,
    sg: SpatialGrid<T>,
) -> Result<ComplexField<T>> {
    match case {
        OracleCase::FreeGaussianHeat => {
            let one = C::new(T::one(), T::zero());
            let spread = one + p.alpha * (t + t);
            if spread.re <= T::zero() {
                return Err(Error::InvalidParameter(
                    "free-gaussian-heat oracle needs Re(1 + 2 alpha t) > 0".into(),
                ));
            }
            let amp = spread.sqrt().inv();
            Ok(ComplexField::from_fn_spatial(sg, |x| {
                amp * (-C::new(x * x, T::zero()) / (spread * real::<T>(2.0))).exp()
            }))
        }
        OracleCase::HarmonicEigenstate { n } => {
            if (p.beta + p.alpha).norm() > real::<T>(1e-14) {
                return Err(Error::InvalidParameter(
                    "harmonic-eigenstate oracle needs beta = -alpha".into(),
                ));
            }
            let energy = real::<T>(2.0 * n as f64 + 1.0);
            let factor = (-p.alpha * energy * t).exp();
            Ok(ComplexField::from_fn_spatial(sg, |x| {
                factor * hermite_function(n, x)
            }))
        }
        OracleCase::FreePhase { momentum } => {
            let one = C::new(T::one(), T::zero());
            let i = C::new(T::zero(), T::one());
            let spread = one + p.alpha * (t + t);
            if spread.re <= T::zero() {
                return Err(Error::InvalidParameter(
                    "free-phase oracle needs Re(1 + 2 alpha t) > 0".into(),
                ));
            }
            let amp = spread.sqrt().inv();
            let drift = p.alpha * momentum * (t + t) * i; // y = x + 2 i alpha k0 t
            let phase_decay = -p.alpha * (momentum * momentum * t);
            Ok(ComplexField::from_fn_spatial(sg, |x| {
                let y = C::new(x, T::zero()) + drift;
                let carrier = (i * (momentum * x) + phase_decay).exp();
                amp * carrier * (-y * y / (spread * real::<T>(2.0))).exp()
            }))
        }
    }
}
