//! End-to-end claim verification: one run produces findings for all six
//! tracked claims plus the CSV artifacts they reference.

use std::collections::BTreeMap;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftNum;
use serde::Serialize;

use crate::basis::{condition_check, BasisFamily, Deriv};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, FrequencyGrid, SpatialGrid};
use crate::harness::{
    check_eq1, check_lemma_expansion, compare, pde_residual_metrics, random_span_field, ClaimId,
    DiscrepancyRecord, Verdict,
};
use crate::kernel::{apply_t, kernel_coeffs, KernelOperators, KernelSetup};
use crate::num::Real;
use crate::potential::Potential;
use crate::propagator::{evolve, PropagationRequest};
use crate::quadrature::QuadratureRule;
use crate::reference::{crank_nicolson, split_step, EvolutionParams};
use crate::transform::{forward_ft, inverse_ft, norm};

/// Everything one verification run depends on.
#[derive(Debug, Clone)]
pub struct VerifySpec<T: Real> {
    pub family: BasisFamily<T>,
    pub potential: Potential<T>,
    pub sg: SpatialGrid<T>,
    pub fg: FrequencyGrid<T>,
    pub epsilon: T,
    pub growth_cap: T,
    pub params: EvolutionParams<T>,
    pub trials: usize,
    pub seed: u64,
    /// Central-difference step for the residual checks.
    pub fd_step: T,
    pub config_digest: String,
    pub config_echo: serde_json::Value,
}

/// One output file (relative path, full text content).
#[derive(Debug, Clone)]
pub struct Artifact {
    pub path: String,
    pub content: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub tool: String,
    pub version: String,
    /// Isolated timestamp key; None in library runs so reports stay
    /// byte-identical, set by the CLI.
    pub generated_at_unix: Option<u64>,
    pub config_digest: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct FindingsReport {
    pub run: RunMeta,
    pub records: Vec<DiscrepancyRecord>,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct VerifyOutput {
    pub report: FindingsReport,
    pub artifacts: Vec<Artifact>,
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Run every claim check under one configuration.
///
/// Claims are evaluated independently and assembled in claim-id order; the
/// output is a pure function of its inputs, so two runs are byte-identical.
pub fn run_verify<T: Real + FftNum>(spec: &VerifySpec<T>) -> Result<VerifyOutput> {
    let digest = spec.config_digest.as_str();
    let quad = QuadratureRule::TrapezoidOnGrid(spec.sg);
    let r = crate::hamiltonian::matrix_elements(&spec.family, &spec.potential, &quad)?;
    let setup = KernelSetup::new(spec.family.clone(), r, spec.fg, spec.epsilon, None)?;
    let ops = KernelOperators::build(setup)?;

    // eq1 on a seeded span field
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let trial_field = random_span_field(&spec.family, spec.sg, &mut rng)?;
    let rec_eq1 = check_eq1(&trial_field, &ops, digest)?;

    // lemma expansion over seeded trials
    let rec_lemma =
        check_lemma_expansion(&ops, spec.sg, spec.trials, spec.seed.wrapping_add(1), digest)?;

    // constructed solution sampled around t for the residual claims
    let initial = ComplexField::from_fn_spatial(spec.sg, |x| {
        spec.family.eval(0, x, Deriv::D0).expect("element 0 exists")
    });
    let t = spec.params.total_time();
    if t < spec.fd_step {
        return Err(Error::InvalidParameter(
            "total evolution time shorter than the residual fd step".into(),
        ));
    }
    let sample_at = |at: T| -> Result<(ComplexField<T>, crate::propagator::OverflowReport<T>)> {
        evolve(&PropagationRequest {
            initial: &initial,
            source: None,
            time: at,
            symbol: &ops.symbol,
            growth_cap: spec.growth_cap,
        })
    };
    let (u_minus, _) = sample_at(t - spec.fd_step)?;
    let (u_mid, overflow_mid) = sample_at(t)?;
    let (u_plus, _) = sample_at(t + spec.fd_step)?;

    let mut residual_metrics = pde_residual_metrics(
        &u_minus,
        &u_mid,
        &u_plus,
        &spec.potential,
        &spec.params,
        spec.fd_step,
    )?;
    // Two further readings of the same evolution claim: the multiplier form
    // du/dt = K u (in frequency) and the operator form du/dt = T u.
    let du = u_plus.zip_with(&u_minus, |a, b| (a - b) / (spec.fd_step + spec.fd_step))?;
    let u_mid_hat = forward_ft(&u_mid, spec.fg)?;
    let ku_hat = u_mid_hat.zip_with(ops.symbol.field(), |a, b| a * b)?;
    let ku = inverse_ft(&ku_hat, spec.sg)?;
    let mult_residual = du.zip_with(&ku, |a, b| a - b)?;
    let u_norm = norm(&u_mid);
    let denom = if u_norm == T::zero() { T::one() } else { u_norm };
    residual_metrics.insert(
        "rel_residual_multiplier".into(),
        to_f64(norm(&mult_residual) / denom),
    );
    let tu = apply_t(&u_mid, &ops.setup, &ops.h_symbols)?;
    let t_residual = du.zip_with(&tu, |a, b| a - b)?;
    residual_metrics.insert(
        "rel_residual_t_operator".into(),
        to_f64(norm(&t_residual) / denom),
    );
    residual_metrics.insert(
        "overflow_flagged_fraction".into(),
        to_f64(overflow_mid.fraction),
    );
    let discarded_max = ops
        .coeffs
        .discarded_mass
        .iter()
        .fold(T::zero(), |a, &b| a.max(b));
    residual_metrics.insert("discarded_mass_max".into(), to_f64(discarded_max));
    let initial_hat = forward_ft(&initial, spec.fg)?;
    residual_metrics.insert(
        "initial_energy_leak".into(),
        to_f64(crate::transform::energy_leak_fraction(&initial, &initial_hat)?),
    );
    residual_metrics.insert(
        "symbol_cross_check_max_abs".into(),
        to_f64(ops.symbol.cross_check_max_abs()),
    );
    let rec_residual = DiscrepancyRecord {
        claim: ClaimId::Eq4Residual,
        digest: digest.to_string(),
        metrics: residual_metrics,
        verdict: Verdict::MeasuredOnly,
    };

    // reference comparison
    let mut ref_metrics = BTreeMap::new();
    let mut cn_field = None;
    match crank_nicolson(&initial, &spec.potential, &spec.params) {
        Ok((u, report)) => {
            let m = compare(&u_mid, &u)?;
            ref_metrics.insert("cn_finite".into(), 1.0);
            ref_metrics.insert("rel_l2_cn".into(), to_f64(m.rel_l2));
            ref_metrics.insert("max_abs_cn".into(), to_f64(m.max_abs));
            ref_metrics.insert("overlap_re_cn".into(), to_f64(m.overlap.re));
            ref_metrics.insert("overlap_im_cn".into(), to_f64(m.overlap.im));
            ref_metrics.insert("cn_max_step_growth".into(), to_f64(report.max_step_growth));
            cn_field = Some(u);
        }
        Err(Error::SolverDiverged { step }) => {
            ref_metrics.insert("cn_finite".into(), 0.0);
            ref_metrics.insert("cn_failed_step".into(), step as f64);
        }
        Err(e) => return Err(e),
    }
    let mut ss_field = None;
    match split_step(&initial, &spec.potential, &spec.params) {
        Ok((u, report)) => {
            let m = compare(&u_mid, &u)?;
            ref_metrics.insert("ss_finite".into(), 1.0);
            ref_metrics.insert("rel_l2_ss".into(), to_f64(m.rel_l2));
            ref_metrics.insert("max_abs_ss".into(), to_f64(m.max_abs));
            ref_metrics.insert("overlap_re_ss".into(), to_f64(m.overlap.re));
            ref_metrics.insert("overlap_im_ss".into(), to_f64(m.overlap.im));
            ref_metrics.insert("ss_max_step_growth".into(), to_f64(report.max_step_growth));
            ss_field = Some(u);
        }
        Err(Error::SolverDiverged { step }) => {
            ref_metrics.insert("ss_finite".into(), 0.0);
            ref_metrics.insert("ss_failed_step".into(), step as f64);
        }
        Err(e) => return Err(e),
    }
    let rec_reference = DiscrepancyRecord {
        claim: ClaimId::Eq4VsReference,
        digest: digest.to_string(),
        metrics: ref_metrics,
        verdict: Verdict::MeasuredOnly,
    };

    // condition (i)
    let condition = condition_check(&spec.family, spec.sg, spec.fg, spec.epsilon)?;
    let mut cond_metrics = BTreeMap::new();
    for (k, &v) in condition.min_abs_ft.iter().enumerate() {
        cond_metrics.insert(format!("min_abs_ft_{k:02}"), to_f64(v));
    }
    let satisfied = condition.condition_i_satisfied.iter().filter(|&&b| b).count();
    cond_metrics.insert("satisfied_count".into(), satisfied as f64);
    cond_metrics.insert("n_modes".into(), spec.family.n_modes() as f64);
    cond_metrics.insert(
        "gram_hermitian_deviation".into(),
        to_f64(condition.gram.hermitian_deviation()),
    );
    let rec_condition = DiscrepancyRecord {
        claim: ClaimId::ConditionI,
        digest: digest.to_string(),
        metrics: cond_metrics,
        verdict: if satisfied == spec.family.n_modes() {
            Verdict::HoldsWithinTol
        } else {
            Verdict::Fails
        },
    };

    // condition (ii): truncation stability of the coefficient sums
    let n = spec.family.n_modes();
    let family_ext = spec.family.with_n_modes(n + 4)?;
    let r_ext = crate::hamiltonian::matrix_elements(&family_ext, &spec.potential, &quad)?;
    let setup_ext = KernelSetup::new(family_ext, r_ext, spec.fg, spec.epsilon, None)?;
    let coeffs_ext = kernel_coeffs(&setup_ext)?;
    let mut max_drift = T::zero();
    let mut sum_drift = T::zero();
    for m in 0..n {
        for s in 0..n {
            let d = (coeffs_ext.k.get(m, s) - ops.coeffs.k.get(m, s)).norm();
            max_drift = max_drift.max(d);
            sum_drift = sum_drift + d;
        }
    }
    let mut stab_metrics = BTreeMap::new();
    stab_metrics.insert("max_entry_drift".into(), to_f64(max_drift));
    stab_metrics.insert(
        "mean_entry_drift".into(),
        to_f64(sum_drift) / (n * n) as f64,
    );
    stab_metrics.insert("base_modes".into(), n as f64);
    stab_metrics.insert("extended_modes".into(), (n + 4) as f64);
    let rec_stability = DiscrepancyRecord {
        claim: ClaimId::ConditionIiStability,
        digest: digest.to_string(),
        metrics: stab_metrics,
        verdict: Verdict::MeasuredOnly,
    };

    // artifacts, every one referenced from the report
    let mut artifacts = vec![
        Artifact {
            path: "gram.csv".into(),
            content: crate::export::matrix_csv(&condition.gram),
        },
        Artifact {
            path: "hamiltonian.csv".into(),
            content: crate::export::matrix_csv(ops.setup.hamiltonian().entries()),
        },
        Artifact {
            path: "kernel_k.csv".into(),
            content: crate::export::matrix_csv(&ops.coeffs.k),
        },
        Artifact {
            path: "kernel_mu.csv".into(),
            content: crate::export::matrix_csv(&ops.coeffs.mu),
        },
        Artifact {
            path: "symbol.csv".into(),
            content: crate::export::field_csv(ops.symbol.field()),
        },
        Artifact {
            path: "initial.csv".into(),
            content: crate::export::field_csv(&initial),
        },
        Artifact {
            path: "psi_eq4.csv".into(),
            content: crate::export::field_csv(&u_mid),
        },
    ];
    if let Some(u) = cn_field {
        artifacts.push(Artifact {
            path: "reference_cn.csv".into(),
            content: crate::export::field_csv(&u),
        });
    }
    if let Some(u) = ss_field {
        artifacts.push(Artifact {
            path: "reference_ss.csv".into(),
            content: crate::export::field_csv(&u),
        });
    }

    let report = FindingsReport {
        run: RunMeta {
            tool: "opwave".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            generated_at_unix: None,
            config_digest: digest.to_string(),
            config: spec.config_echo.clone(),
        },
        records: vec![
            rec_eq1,
            rec_lemma,
            rec_residual,
            rec_reference,
            rec_condition,
            rec_stability,
        ],
        artifacts: artifacts.iter().map(|a| a.path.clone()).collect(),
    };
    Ok(VerifyOutput { report, artifacts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::DEFAULT_GROWTH_CAP;
    use crate::num::real;

    fn spec(family: BasisFamily<f64>, params: EvolutionParams<f64>) -> VerifySpec<f64> {
        VerifySpec {
            family,
            potential: Potential::Harmonic,
            sg: SpatialGrid::new(-12.0, 12.0, 512).unwrap(),
            fg: FrequencyGrid::new(12.0, 512).unwrap(),
            epsilon: 1e-6,
            growth_cap: real(DEFAULT_GROWTH_CAP),
            params,
            trials: 2,
            seed: 11,
            fd_step: 1e-4,
            config_digest: "deadbeef".into(),
            config_echo: serde_json::json!({"test": true}),
        }
    }

    #[test]
    fn verify_emits_all_six_claims_in_order() {
        let s = spec(
            BasisFamily::hermite(4).unwrap(),
            EvolutionParams::paper_literal(1e-3, 100).unwrap(),
        );
        let out = run_verify(&s).unwrap();
        let ids: Vec<&str> = out.report.records.iter().map(|r| r.claim.as_str()).collect();
        assert_eq!(
            ids,
            vec![
                "eq1",
                "lemma-expansion",
                "eq4-residual",
                "eq4-vs-reference",
                "condition-i",
                "condition-ii-stability"
            ]
        );
        for rec in &out.report.records {
            for (key, value) in &rec.metrics {
                assert!(value.is_finite(), "{}::{key} not finite", rec.claim.as_str());
            }
        }
        // every artifact is referenced
        assert_eq!(
            out.report.artifacts,
            out.artifacts.iter().map(|a| a.path.clone()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn verify_is_bit_reproducible() {
        let s = spec(
            BasisFamily::gaussian_frame(4, 1.0, 1.0).unwrap(),
            EvolutionParams::imaginary_time(1e-3, 100).unwrap(),
        );
        let a = run_verify(&s).unwrap();
        let b = run_verify(&s).unwrap();
        assert_eq!(
            serde_json::to_string(&a.report).unwrap(),
            serde_json::to_string(&b.report).unwrap()
        );
        for (x, y) in a.artifacts.iter().zip(&b.artifacts) {
            assert_eq!(x.path, y.path);
            assert_eq!(x.content, y.content);
        }
    }
}
