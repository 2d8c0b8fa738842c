//! fraclab: a numerical laboratory for the fractional heat semigroup,
//! Orlicz-space (Luxemburg) norms, and mild solutions of
//!
//! ```text
//! u_t + (-Delta)^{beta/2} u = f(u),   f(u) = sign |u|^{m-1} u e^{lambda |u|^p},
//! ```
//!
//! on periodic boxes [-L, L)^n standing in for R^n. The crate provides the
//! spectral semigroup and its real-space kernels, Luxemburg norms for
//! exponential Orlicz gauges, the Picard construction of mild solutions with
//! local-existence-time arithmetic, long-horizon exponential-integrator runs,
//! and quantitative verification of smoothing, embedding, contraction, and
//! decay estimates at desk scale.

// Validation uses `!(x > 0.0)` on purpose: the negation also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod io;
pub mod kappa;
pub mod nonlinearity;
pub mod orlicz;
pub mod rng;
pub mod semigroup;
pub mod solver;
pub mod spectral;
pub mod verify;

pub mod cli;

pub use error::{Error, Result};
pub use grid::{lp_linf_norm, lq_norm, make_grid, GridFunction, GridSpec};
pub use kappa::{kappa_integral, KappaProfile, KappaRegime};
pub use nonlinearity::{eval_f, lipschitz_scan, lipschitz_witness, Nonlinearity};
pub use orlicz::{
    embedding_exp_bound, embedding_lq_bound, exp_lp_norm, exp_moment_bound, gauge_integral,
    luxemburg_norm, norm_equivalence_reduced, reduced_gauge_constant, LuxemburgResult, OrliczGauge,
};
pub use semigroup::{
    apply_semigroup, build_kernel, check_self_similarity, continuity_at_zero,
    exp_norm_nonexpansive, exp_smoothing_profile, kernel_realspace, smoothing_estimate,
    EvolutionParams, SpectralKernel,
};
pub use solver::{
    blowup_monitor, duhamel_apply, duhamel_residual, duhamel_with_forcing, local_time_estimate,
    picard_continuation, picard_solve, picard_solve_from, step_evolve, ContinuationRun,
    EtdOptions, EtdRun, InitialIterate, NormSample, Outcome, SolveConfig, SolveStatus, Trajectory,
};
pub use spectral::{from_spectrum, to_spectrum, SpectrumFunction};
pub use verify::{
    decay_exponent, decay_fit, envelope_check, gamma_growth_check, regime_classify,
    select_parameters, sigma_of, smallness_check, DecayTarget, ParameterSelection, QInterval,
    Regime, SelectionVariant, SmallnessBudget,
};
