//! Property tests for the structural invariants: linearity, homogeneity,
//! guard monotonicity, and Parseval on random span fields.

mod common;

use common::rel_l2;
use opwave_core::{
    apply_t, build_operators, evolve, forward_ft, inner_product, kernel_coeffs, matrix_elements,
    norm, BasisFamily, C64, ComplexField, Deriv, Domain, FrequencyGrid, GridKind, KernelSetup,
    Potential, PropagationRequest, PropagationSymbol, QuadratureRule, SpatialGrid,
    DEFAULT_GROWTH_CAP,
};
use proptest::prelude::*;

fn grids() -> (SpatialGrid<f64>, FrequencyGrid<f64>) {
    (
        SpatialGrid::new(-12.0, 12.0, 512).unwrap(),
        FrequencyGrid::new(12.0, 512).unwrap(),
    )
}

/// Field in span{e_0..e_3} of the Hermite family with bounded coefficients.
fn span_field(coeffs: &[(f64, f64)]) -> ComplexField<f64> {
    let (sg, _) = grids();
    let fam = BasisFamily::hermite(coeffs.len()).unwrap();
    let samples = (0..sg.len())
        .map(|i| {
            let x = sg.point(i);
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &(re, im))| fam.eval(k, x, Deriv::D0).unwrap() * C64::new(re, im))
                .fold(C64::new(0.0, 0.0), |a, b| a + b)
        })
        .collect();
    ComplexField::new(samples, GridKind::Spatial(sg)).unwrap()
}

fn coeff_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn forward_transform_is_linear(a in coeff_strategy(), b in coeff_strategy(),
                                   sr in -2.0..2.0f64, si in -2.0..2.0f64) {
        let (_, fg) = grids();
        let f = span_field(&a);
        let g = span_field(&b);
        let scale = C64::new(sr, si);
        let combo = f.zip_with(&g, |x, y| x * scale + y).unwrap();
        let lhs = forward_ft(&combo, fg).unwrap();
        let f_hat = forward_ft(&f, fg).unwrap();
        let g_hat = forward_ft(&g, fg).unwrap();
        let rhs = f_hat.zip_with(&g_hat, |x, y| x * scale + y).unwrap();
        let err = lhs.samples().iter().zip(rhs.samples())
            .map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let magnitude = norm(&lhs).max(1.0);
        prop_assert!(err <= 1e-12 * magnitude, "linearity violation {err}");
    }

    #[test]
    fn parseval_on_span_fields(a in coeff_strategy(), b in coeff_strategy()) {
        let (_, fg) = grids();
        let f = span_field(&a);
        let g = span_field(&b);
        let lhs = inner_product(&f, &g, Domain::Spatial).unwrap();
        let rhs = inner_product(
            &forward_ft(&f, fg).unwrap(),
            &forward_ft(&g, fg).unwrap(),
            Domain::Frequency,
        ).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8, "parseval gap {}", (lhs - rhs).norm());
    }

    #[test]
    fn t_operator_is_quadratically_homogeneous(a in coeff_strategy(),
                                               sr in 0.25..2.0f64, si in -1.0..1.0f64) {
        let (sg, fg) = grids();
        let fam = BasisFamily::gaussian_frame(4, 1.0, 1.0).unwrap();
        let ops = build_operators(&fam, &Potential::Harmonic, sg, fg, 1e-6).unwrap();
        let f = span_field(&a);
        let scale = C64::new(sr, si);
        let tf = apply_t(&f, &ops.setup, &ops.h_symbols).unwrap();
        let tf_scaled = apply_t(&f.scale(scale), &ops.setup, &ops.h_symbols).unwrap();
        let expected = tf.scale(scale * scale);
        let err = tf_scaled.samples().iter().zip(expected.samples())
            .map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let magnitude = norm(&expected).max(1.0);
        prop_assert!(err <= 1e-10 * magnitude.max(1.0) * 100.0,
                     "homogeneity violation {err} at scale {scale}");
    }

    #[test]
    fn semigroup_law_for_random_symbols(re_c in -1.0..0.0f64, im_c in -1.0..1.0f64,
                                        t1 in 0.05..0.5f64, t2 in 0.05..0.5f64) {
        let (sg, fg) = grids();
        let f = common::gaussian(sg);
        let symbol = PropagationSymbol::from_fn(fg, "random", |g| {
            C64::new(re_c * g * g, im_c * g)
        }).unwrap();
        let run = |f: &ComplexField<f64>, t: f64| {
            evolve(&PropagationRequest {
                initial: f, source: None, time: t,
                symbol: &symbol, growth_cap: DEFAULT_GROWTH_CAP,
            }).unwrap().0
        };
        let sequential = run(&run(&f, t1), t2);
        let direct = run(&f, t1 + t2);
        let err = sequential.samples().iter().zip(direct.samples())
            .map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10, "semigroup gap {err}");
    }

    #[test]
    fn guard_mass_is_monotone_in_eps(exp_loose in -5.0..-2.0f64, gap in 1.0..4.0f64) {
        let (sg, fg) = grids();
        let fam = BasisFamily::hermite(5).unwrap();
        let quad = QuadratureRule::TrapezoidOnGrid(sg);
        let r = matrix_elements(&fam, &Potential::Harmonic, &quad).unwrap();
        let eps_loose = 10.0f64.powf(exp_loose);
        let eps_tight = 10.0f64.powf(exp_loose - gap);
        let loose = KernelSetup::new(fam.clone(), r.clone(), fg, eps_loose, None).unwrap();
        let tight = KernelSetup::new(fam, r, fg, eps_tight, None).unwrap();
        for m in 0..5 {
            prop_assert!(loose.discarded_mass()[m] >= tight.discarded_mass()[m]);
        }
    }

    #[test]
    fn kernel_coeffs_scale_linearly_with_r(factor in 0.5..3.0f64) {
        use opwave_core::HamiltonianMatrix;
        let (sg, fg) = grids();
        let fam = BasisFamily::gaussian_frame(3, 1.0, 1.0).unwrap();
        let quad = QuadratureRule::TrapezoidOnGrid(sg);
        let r = matrix_elements(&fam, &Potential::Harmonic, &quad).unwrap();
        let scaled_entries = r.entries().map(|z| z * factor);
        let base = KernelSetup::new(fam.clone(), r, fg, 1e-6, None).unwrap();
        let scaled = KernelSetup::new(
            fam,
            HamiltonianMatrix::from_entries(scaled_entries, "scaled"),
            fg,
            1e-6,
            None,
        ).unwrap();
        let kb = kernel_coeffs(&base).unwrap();
        let ks = kernel_coeffs(&scaled).unwrap();
        let err = kb.k.map(|z| z * factor).max_abs_diff(&ks.k);
        prop_assert!(err <= 1e-10 * factor.max(1.0), "scaling violation {err}");
    }
}

#[test]
fn round_trip_preserves_span_fields() {
    let (sg, fg) = grids();
    let f = span_field(&[(1.0, 0.3), (-0.5, 0.2), (0.0, -1.1), (0.7, 0.0)]);
    let back = opwave_core::inverse_ft(&forward_ft(&f, fg).unwrap(), sg).unwrap();
    assert!(rel_l2(&back, &f) <= 1e-8);
}
