//! Spectral operator-kernel toolkit for 1D Schroedinger-type evolutions.
//!
//! The pipeline: expand over a basis family, assemble Hamiltonian matrix
//! elements, extract kernel coefficients through guarded ratio integrals,
//! compose the propagation symbol, and evolve by the exponential Fourier
//! multiplier. Classical reference solvers (Crank-Nicolson, split-step) and
//! closed-form oracles sit alongside, and a verification harness measures
//! every checkable claim about the construction, emitting structured
//! findings.
//!
//! Core numerics are generic over the scalar (`f32`/`f64`) through the
//! [`num::Real`] trait; concrete `f64` aliases live at the crate root.

pub mod basis;
pub mod error;
pub mod export;
pub mod grid;
pub mod hamiltonian;
pub mod harness;
pub mod kernel;
pub mod matrix;
pub mod num;
pub mod potential;
pub mod propagator;
pub mod quadrature;
pub mod reference;
pub mod transform;
pub mod verify;

pub use basis::{condition_check, BasisFamily, ConditionReport, Deriv};
pub use error::{Error, Result};
pub use grid::{ComplexField, FrequencyGrid, GridKind, SpatialGrid};
pub use hamiltonian::{apply_h, matrix_elements, HamiltonianMatrix};
pub use harness::{
    check_eq1, check_lemma_expansion, compare, oracle_selftest, random_span_field, residual_check,
    ClaimId, ComparisonMetrics, DiscrepancyRecord, Verdict,
};
pub use kernel::{
    all_h_symbols, apply_s, apply_t, apply_t_hat, build_operators, h_symbol, kernel_coeffs,
    propagation_symbol, propagation_symbol_literal_element, KernelCoefficients, KernelOperators,
    KernelSetup, PropagationSymbol,
};
pub use matrix::CMatrix;
pub use num::Real;
pub use potential::Potential;
pub use propagator::{
    evolve, schrodinger_general_solution, OverflowReport, PropagationRequest, SolutionProvenance,
    DEFAULT_GROWTH_CAP,
};
pub use quadrature::{gauss_hermite_nodes_weights, QuadratureRule};
pub use reference::{
    analytic_oracle, crank_nicolson, split_step, EvolutionParams, OracleCase, StepReport,
};
pub use transform::{
    energy_leak_fraction, forward_ft, inner_product, inverse_ft, norm, norm_sq,
    second_derivative, Domain,
};
pub use verify::{run_verify, Artifact, FindingsReport, RunMeta, VerifyOutput, VerifySpec};

/// Concrete f64 instantiations.
pub type C64 = num_complex::Complex<f64>;
pub type SpatialGrid64 = SpatialGrid<f64>;
pub type FrequencyGrid64 = FrequencyGrid<f64>;
pub type Field64 = ComplexField<f64>;
pub type Basis64 = BasisFamily<f64>;
pub type Potential64 = Potential<f64>;
pub type Quadrature64 = QuadratureRule<f64>;
pub type HamiltonianMatrix64 = HamiltonianMatrix<f64>;
pub type KernelSetup64 = KernelSetup<f64>;
pub type KernelOperators64 = KernelOperators<f64>;
pub type Symbol64 = PropagationSymbol<f64>;
pub type EvolutionParams64 = EvolutionParams<f64>;
pub type VerifySpec64 = VerifySpec<f64>;
