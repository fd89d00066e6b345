//! Claim verification: structured discrepancy records for every checkable
//! statement, with three-valued verdicts.
//!
//! "fails" is only issued for internally decidable identities; conjectures
//! that the machinery cannot decide are always "measured-only" with the
//! metric reported as the deliverable.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{BasisFamily, Deriv};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, FrequencyGrid, GridKind, SpatialGrid};
use crate::kernel::{apply_s, apply_t_hat, KernelOperators};
use crate::num::{pairwise_sum_by, real, C, Real};
use crate::potential::Potential;
use crate::reference::{crank_nicolson, split_step, EvolutionParams, OracleCase};
use crate::transform::{forward_ft, inner_product, norm, second_derivative, Domain};

/// Claims tracked by the findings report, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClaimId {
    #[serde(rename = "eq1")]
    Eq1,
    #[serde(rename = "lemma-expansion")]
    LemmaExpansion,
    #[serde(rename = "eq4-residual")]
    Eq4Residual,
    #[serde(rename = "eq4-vs-reference")]
    Eq4VsReference,
    #[serde(rename = "condition-i")]
    ConditionI,
    #[serde(rename = "condition-ii-stability")]
    ConditionIiStability,
}

impl ClaimId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClaimId::Eq1 => "eq1",
            ClaimId::LemmaExpansion => "lemma-expansion",
            ClaimId::Eq4Residual => "eq4-residual",
            ClaimId::Eq4VsReference => "eq4-vs-reference",
            ClaimId::ConditionI => "condition-i",
            ClaimId::ConditionIiStability => "condition-ii-stability",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "holds-within-tol")]
    HoldsWithinTol,
    #[serde(rename = "fails")]
    Fails,
    #[serde(rename = "measured-only")]
    MeasuredOnly,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::HoldsWithinTol => "holds-within-tol",
            Verdict::Fails => "fails",
            Verdict::MeasuredOnly => "measured-only",
        }
    }
}

/// One measured claim with named metric values.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyRecord {
    pub claim: ClaimId,
    pub digest: String,
    pub metrics: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

/// Field comparison metrics.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonMetrics<T> {
    pub rel_l2: T,
    pub max_abs: T,
    /// Normalized inner product; zero when either field vanishes.
    pub overlap: C<T>,
}

/// Compare two fields on the same grid.
pub fn compare<T: Real>(a: &ComplexField<T>, b: &ComplexField<T>) -> Result<ComparisonMetrics<T>> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch("compare operands"));
    }
    let na = norm(a);
    let nb = norm(b);
    let denom = na.max(nb);
    let diff = a.zip_with(b, |x, y| x - y)?;
    let rel_l2 = if denom == T::zero() {
        T::zero()
    } else {
        norm(&diff) / denom
    };
    let max_abs = diff
        .samples()
        .iter()
        .map(|z| z.norm())
        .fold(T::zero(), T::max);
    let domain = match a.grid() {
        GridKind::Spatial(_) => Domain::Spatial,
        GridKind::Frequency(_) => Domain::Frequency,
    };
    let overlap = if na > T::zero() && nb > T::zero() {
        inner_product(a, b, domain)? / (na * nb)
    } else {
        C::new(T::zero(), T::zero())
    };
    Ok(ComparisonMetrics {
        rel_l2,
        max_abs,
        overlap,
    })
}

/// Seeded random field in span{e_0..e_{N-1}} with standard-normal complex
/// coefficients. The machinery only sees the span, so trial fields live there.
pub fn random_span_field<T: Real>(
    family: &BasisFamily<T>,
    sg: SpatialGrid<T>,
    rng: &mut ChaCha8Rng,
) -> Result<ComplexField<T>> {
    let n = family.n_modes();
    let coeffs: Vec<C<T>> = (0..n)
        .map(|_| {
            let re: f64 = rng.sample(rand_distr::StandardNormal);
            let im: f64 = rng.sample(rand_distr::StandardNormal);
            C::new(real::<T>(re), real::<T>(im))
        })
        .collect();
    let table = family.sample_table(sg, Deriv::D0)?;
    let samples = (0..sg.len())
        .map(|i| pairwise_sum_by(n, |k| coeffs[k] * table[k][i]))
        .collect();
    ComplexField::new(samples, GridKind::Spatial(sg))
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Tolerance for the eq1 operator-identity check.
pub const EQ1_TOL: f64 = 1e-6;
/// Tolerance for the kernel-expansion identity checks.
pub const LEMMA_TOL: f64 = 1e-8;

/// Check `(T f)^ = f^ (S f)^` with S realized by the kernel coefficients.
///
/// Both sides are computed independently; the scaling probe measures the
/// homogeneity degree of each side (both are quadratic in f by construction,
/// which the probe confirms rather than assumes).
pub fn check_eq1<T: Real>(
    f: &ComplexField<T>,
    ops: &KernelOperators<T>,
    digest: &str,
) -> Result<DiscrepancyRecord> {
    let fg = ops.setup.frequency_grid();
    let f_hat = forward_ft(f, fg)?;
    let lhs = apply_t_hat(&f_hat, &ops.setup, &ops.h_symbols)?;
    let sf = apply_s(f, ops.setup.family(), &ops.coeffs.k)?;
    let sf_hat = forward_ft(&sf, fg)?;
    let rhs = f_hat.zip_with(&sf_hat, |a, b| a * b)?;
    let m = compare(&lhs, &rhs)?;

    let mut metrics = BTreeMap::new();
    metrics.insert("rel_l2".into(), to_f64(m.rel_l2));
    metrics.insert("max_abs".into(), to_f64(m.max_abs));
    metrics.insert("lhs_norm".into(), to_f64(norm(&lhs)));
    metrics.insert("rhs_norm".into(), to_f64(norm(&rhs)));

    // scaling probe at alpha = 2
    let two = C::new(real::<T>(2.0), T::zero());
    let f2 = f.scale(two);
    let f2_hat = f_hat.scale(two);
    let lhs2 = apply_t_hat(&f2_hat, &ops.setup, &ops.h_symbols)?;
    let sf2 = apply_s(&f2, ops.setup.family(), &ops.coeffs.k)?;
    let rhs2 = f2_hat.zip_with(&forward_ft(&sf2, fg)?, |a, b| a * b)?;
    let (l0, l2) = (norm(&lhs), norm(&lhs2));
    let (r0, r2) = (norm(&rhs), norm(&rhs2));
    if l0 > T::zero() && l2 > T::zero() {
        metrics.insert("lhs_scaling_degree".into(), (to_f64(l2) / to_f64(l0)).log2());
    }
    if r0 > T::zero() && r2 > T::zero() {
        metrics.insert("rhs_scaling_degree".into(), (to_f64(r2) / to_f64(r0)).log2());
    }

    let verdict = if to_f64(m.rel_l2) <= EQ1_TOL {
        Verdict::HoldsWithinTol
    } else {
        // the claim may simply be false; never assert it
        Verdict::MeasuredOnly
    };
    Ok(DiscrepancyRecord {
        claim: ClaimId::Eq1,
        digest: digest.to_string(),
        metrics,
        verdict,
    })
}

/// Check the kernel-expansion identities on seeded span fields:
///
/// 1. the coefficient route of S against a direct kernel-matrix integral;
/// 2. the direct T action against the expanded double-sum form
///    `f^ sum_{k,l} c_l <h_l^|e_k^> <f^|e_k^> e_l^`.
pub fn check_lemma_expansion<T: Real>(
    ops: &KernelOperators<T>,
    sg: SpatialGrid<T>,
    trials: usize,
    seed: u64,
    digest: &str,
) -> Result<DiscrepancyRecord> {
    if trials == 0 {
        return Err(Error::InvalidParameter("lemma check needs trials >= 1".into()));
    }
    let family = ops.setup.family();
    let n = family.n_modes();
    let fg = ops.setup.frequency_grid();
    let table = family.sample_table(sg, Deriv::D0)?;

    // kernel matrix K(t_i, x_j) = sum_{k,l} K_{k,l} e_k(t_i) e_l(x_j),
    // materialized once via W = K E
    let w: Vec<Vec<C<T>>> = (0..n)
        .map(|k| {
            (0..sg.len())
                .map(|j| pairwise_sum_by(n, |l| ops.coeffs.k.get(k, l) * table[l][j]))
                .collect()
        })
        .collect();
    let kernel_matrix: Vec<Vec<C<T>>> = (0..sg.len())
        .map(|i| {
            (0..sg.len())
                .map(|j| pairwise_sum_by(n, |k| table[k][i] * w[k][j]))
                .collect()
        })
        .collect();

    // <h_l^ | e_k^> overlaps for the double-sum form
    let e_fields: Vec<ComplexField<T>> = (0..n)
        .map(|k| {
            ComplexField::new(
                ops.setup.element_ft_samples(k).to_vec(),
                GridKind::Frequency(fg),
            )
        })
        .collect::<Result<_>>()?;
    let h_overlaps: Vec<Vec<C<T>>> = ops
        .h_symbols
        .iter()
        .map(|h| {
            e_fields
                .iter()
                .map(|e| inner_product(h, e, Domain::Frequency))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s_max_rel: T = T::zero();
    let mut t_max_rel: T = T::zero();
    let mut per_trial: Vec<(T, T)> = Vec::with_capacity(trials);
    for _ in 0..trials {
        let f = random_span_field(family, sg, &mut rng)?;

        // S route comparison
        let s_expansion = apply_s(&f, family, &ops.coeffs.k)?;
        let s_direct_samples: Vec<C<T>> = (0..sg.len())
            .map(|j| {
                pairwise_sum_by(sg.len(), |i| {
                    f.samples()[i] * kernel_matrix[i][j] * sg.weight(i)
                })
            })
            .collect();
        let s_direct = ComplexField::new(s_direct_samples, GridKind::Spatial(sg))?;
        let s_rel = compare(&s_expansion, &s_direct)?.rel_l2;
        s_max_rel = s_max_rel.max(s_rel);

        // T route comparison
        let f_hat = forward_ft(&f, fg)?;
        let direct = apply_t_hat(&f_hat, &ops.setup, &ops.h_symbols)?;
        let f_proj: Vec<C<T>> = e_fields
            .iter()
            .map(|e| inner_product(&f_hat, e, Domain::Frequency))
            .collect::<Result<_>>()?;
        let weights = ops.setup.weights();
        let double_sum_samples: Vec<C<T>> = (0..fg.len())
            .map(|j| {
                let combo = pairwise_sum_by(n * n, |idx| {
                    let (l, k) = (idx / n, idx % n);
                    h_overlaps[l][k] * f_proj[k] * ops.setup.element_ft_samples(l)[j] * weights[l]
                });
                f_hat.samples()[j] * combo
            })
            .collect();
        let double_sum = ComplexField::new(double_sum_samples, GridKind::Frequency(fg))?;
        let t_rel = compare(&direct, &double_sum)?.rel_l2;
        t_max_rel = t_max_rel.max(t_rel);
        per_trial.push((s_rel, t_rel));
    }

    let mut metrics = BTreeMap::new();
    metrics.insert("kernel_expansion_max_rel".into(), to_f64(s_max_rel));
    metrics.insert("double_sum_max_rel".into(), to_f64(t_max_rel));
    metrics.insert("trials".into(), trials as f64);
    for (i, (s_rel, t_rel)) in per_trial.iter().enumerate() {
        metrics.insert(format!("trial_{i:02}_kernel_expansion_rel"), to_f64(*s_rel));
        metrics.insert(format!("trial_{i:02}_double_sum_rel"), to_f64(*t_rel));
    }
    let verdict = if to_f64(s_max_rel) <= LEMMA_TOL && to_f64(t_max_rel) <= LEMMA_TOL {
        Verdict::HoldsWithinTol
    } else {
        // decidable: two evaluations of the same finite sums disagree beyond
        // tolerance only when the expansion step itself is invalid
        Verdict::Fails
    };
    Ok(DiscrepancyRecord {
        claim: ClaimId::LemmaExpansion,
        digest: digest.to_string(),
        metrics,
        verdict,
    })
}

/// Central-difference PDE residual of a time-indexed sampler:
/// `r = [u(t+d) - u(t-d)]/(2d) - (alpha u_xx + beta V u)` at time `t`.
pub fn residual_check<T: Real>(
    sampler: &dyn Fn(T) -> Result<ComplexField<T>>,
    v: &Potential<T>,
    p: &EvolutionParams<T>,
    t: T,
    fd_step: T,
    claim: ClaimId,
    digest: &str,
) -> Result<DiscrepancyRecord> {
    if !(fd_step > T::zero() && t >= fd_step) {
        return Err(Error::InvalidParameter(
            "residual check needs 0 < fd_step <= t".into(),
        ));
    }
    let u_minus = sampler(t - fd_step)?;
    let u_mid = sampler(t)?;
    let u_plus = sampler(t + fd_step)?;
    let metrics = pde_residual_metrics(&u_minus, &u_mid, &u_plus, v, p, fd_step)?;
    Ok(DiscrepancyRecord {
        claim,
        digest: digest.to_string(),
        metrics,
        verdict: Verdict::MeasuredOnly,
    })
}

/// Residual metrics from three time slices.
pub fn pde_residual_metrics<T: Real>(
    u_minus: &ComplexField<T>,
    u_mid: &ComplexField<T>,
    u_plus: &ComplexField<T>,
    v: &Potential<T>,
    p: &EvolutionParams<T>,
    fd_step: T,
) -> Result<BTreeMap<String, f64>> {
    let sg = u_mid.spatial_grid()?;
    let vvals = v.values_on_grid(sg)?;
    let du = u_plus.zip_with(u_minus, |a, b| (a - b) / (fd_step + fd_step))?;
    let uxx = second_derivative(u_mid)?;
    let samples: Vec<C<T>> = du
        .samples()
        .iter()
        .zip(uxx.samples())
        .zip(u_mid.samples())
        .zip(&vvals)
        .map(|(((&d, &xx), &um), &vi)| d - (p.alpha * xx + p.beta * vi * um))
        .collect();
    let residual = ComplexField::new(samples, GridKind::Spatial(sg))?;
    let u_norm = norm(u_mid);
    let rel = if u_norm == T::zero() {
        norm(&residual)
    } else {
        norm(&residual) / u_norm
    };
    let mut metrics = BTreeMap::new();
    metrics.insert("rel_residual".into(), to_f64(rel));
    metrics.insert("u_norm".into(), to_f64(u_norm));
    metrics.insert("du_dt_norm".into(), to_f64(norm(&du)));
    Ok(metrics)
}

/// Self-tests that must pass before any paper claim is evaluated. A failing
/// oracle invalidates every downstream measurement.
pub fn oracle_selftest() -> Result<()> {
    // 1. transform round trip
    let sg = SpatialGrid::new(-12.0, 12.0, 1024)?;
    let fg = FrequencyGrid::new(12.0, 1024)?;
    let f = ComplexField::from_fn_spatial(sg, |x: f64| C::new((-x * x / 2.0).exp(), 0.0));
    let back = crate::transform::inverse_ft(&forward_ft(&f, fg)?, sg)?;
    let rt = compare(&back, &f)?.rel_l2;
    if rt > 1e-8 {
        return Err(Error::OracleSelfTest {
            name: "transform-round-trip",
            value: rt,
        });
    }

    // 2. Crank-Nicolson against the heat-kernel closed form
    let p = EvolutionParams::imaginary_time(1e-3, 100)?;
    let (u, _) = crank_nicolson(&f, &Potential::Zero, &p)?;
    let exact = crate::reference::analytic_oracle(OracleCase::FreeGaussianHeat, &p, 0.1, sg)?;
    let cn = compare(&u, &exact)?.rel_l2;
    if cn > 1e-4 {
        return Err(Error::OracleSelfTest {
            name: "crank-nicolson-heat",
            value: cn,
        });
    }

    // 3. split-step against the same closed form
    let (u, _) = split_step(&f, &Potential::Zero, &p)?;
    let ss = compare(&u, &exact)?.rel_l2;
    if ss > 1e-6 {
        return Err(Error::OracleSelfTest {
            name: "split-step-heat",
            value: ss,
        });
    }
    Ok(())
}
