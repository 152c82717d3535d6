//! Numerical toolkit for nonincreasing rearrangements, Lorentz-Gamma norms,
//! Stieltjes-type integral operators, and executable Muckenhoupt-type
//! boundedness conditions on the positive half-line.
//!
//! The crate is organized around desk-scale exact computation: test
//! functions are finitely supported step functions, for which
//! rearrangements, prefix integrals and the classical transforms have
//! closed per-cell forms; weights carry declared power tails so that every
//! semi-infinite integral reduces to resolved quadrature plus analytic end
//! corrections. On top of that sit the decision procedures (`conditions`)
//! and the empirical operator-norm estimator (`verify`) that cross-validate
//! each other.

pub mod conditions;
pub mod error;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod operators;
pub mod quad;
pub mod step;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use grid::GeometricGrid;
pub use kernel::{iterated_rearrangement, verify_reduction, IteratedKernel, SampledKernel};
pub use operators::{
    apply_tk, apply_tls, s2_kernel, s2_log_form, stieltjes_fn, stieltjes_step, tls_kernel,
    KernelEvalMode, OperatorSpec, S2LogEvaluator,
};
pub use quad::{
    integrate_0_to_inf, integrate_0_to_t, integrate_interval, integrate_log_kernel,
    integrate_t_to_inf, LogKernelMode, TailSpec,
};
pub use step::{hlp_dominates, StepFunction};
pub use verify::{
    estimate_norm_ratio, lg_norm, random_test_function, verify_norm_chain, ChainReport,
    EstimateVerdict, InequalityId, NormRatioEstimate, Space,
};
pub use weights::{
    associated_weight, check_admissible, dual_weight, dual_weight_numeric, parse_weight, LgSpace,
    Weight,
};
pub use conditions::{
    bloom_kerman_check, corollary_s2_check, neugebauer_check, BkKernel, ConditionEntry,
    ConditionReport, Verdict,
};
