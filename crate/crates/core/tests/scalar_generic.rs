//! The core is generic over the scalar; exercise the f32 instantiation at
//! tolerances matching single precision.

use num_complex::Complex;
use opwave_core::{
    evolve, forward_ft, inverse_ft, matrix_elements, BasisFamily, ComplexField, FrequencyGrid,
    Potential, PropagationRequest, PropagationSymbol, QuadratureRule, SpatialGrid,
};

type C32 = Complex<f32>;

#[test]
fn f32_transforms_round_trip() {
    let sg = SpatialGrid::<f32>::new(-12.0, 12.0, 512).unwrap();
    let fg = FrequencyGrid::<f32>::new(12.0, 512).unwrap();
    let f = ComplexField::from_fn_spatial(sg, |x| C32::new((-x * x / 2.0).exp(), 0.0));
    let back = inverse_ft(&forward_ft(&f, fg).unwrap(), sg).unwrap();
    let mut max_err: f32 = 0.0;
    for (a, b) in back.samples().iter().zip(f.samples()) {
        max_err = max_err.max((a - b).norm());
    }
    assert!(max_err <= 5e-4, "f32 round trip err {max_err}");
}

#[test]
fn f32_harmonic_matrix_is_nearly_diagonal() {
    let fam = BasisFamily::<f32>::hermite(4).unwrap();
    let sg = SpatialGrid::<f32>::new(-12.0, 12.0, 512).unwrap();
    let quad = QuadratureRule::TrapezoidOnGrid(sg);
    let r = matrix_elements(&fam, &Potential::Harmonic, &quad).unwrap();
    for k in 0..4 {
        for l in 0..4 {
            let expected = if k == l { 2.0 * k as f32 + 1.0 } else { 0.0 };
            assert!(
                (r.entries().get(k, l).re - expected).abs() <= 5e-3,
                "R[{k}][{l}] = {}",
                r.entries().get(k, l)
            );
        }
    }
}

#[test]
fn f32_multiplier_evolution_runs() {
    let sg = SpatialGrid::<f32>::new(-12.0, 12.0, 512).unwrap();
    let fg = FrequencyGrid::<f32>::new(12.0, 512).unwrap();
    let f = ComplexField::from_fn_spatial(sg, |x| C32::new((-x * x / 2.0).exp(), 0.0));
    let symbol = PropagationSymbol::from_fn(fg, "heat", |g| C32::new(-g * g, 0.0)).unwrap();
    let (u, report) = evolve(&PropagationRequest {
        initial: &f,
        source: None,
        time: 0.5,
        symbol: &symbol,
        growth_cap: 50.0,
    })
    .unwrap();
    assert_eq!(report.flagged, 0);
    let mid = u.samples()[256].re;
    let expected = (1.0f32 + 1.0).powf(-0.5); // (1 + 2t)^{-1/2} at x ~ 0
    assert!((mid - expected).abs() <= 1e-2, "midpoint {mid} vs {expected}");
}
