//! Kernel-smoothed confidence intervals for a conditional proportion
//! `p(x) = P(Y = 1 | X = x)`, with bootstrap bandwidth selection.
//!
//! The building blocks are layered:
//!
//! * [`kernel`] and [`smoothing`]: Gaussian kernel, kernel density and
//!   Nadaraya-Watson estimates, pilot bandwidth selectors.
//! * [`proportion`]: classical Wald, Wilson and Agresti-Coull intervals.
//! * [`conditional`]: the same three intervals built from `p̂ₕ(x)` and the
//!   local effective sample size.
//! * [`bootstrap`]: coverage-driven choice of the interval bandwidth.
//! * [`simulation`]: Monte-Carlo coverage studies on synthetic scenarios.
//! * [`uefa`]: the second-leg home advantage analysis on two-legged ties.
//!
//! ```
//! use condprop::{conditional_interval, conditional_point, gaussian_kernel};
//! use condprop::{Bandwidth, IntervalMethod, Sample};
//!
//! let sample = Sample::new(vec![-1.0, 0.0, 1.0], vec![false, true, true])?;
//! let pt = conditional_point(&sample, 0.0, Bandwidth::new(0.5)?, &gaussian_kernel())?;
//! let ci = conditional_interval(&pt, IntervalMethod::Wilson, 0.05)?;
//! assert!(ci.lower < pt.p_hat && pt.p_hat < ci.upper);
//! # Ok::<(), condprop::Error>(())
//! ```

// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bootstrap;
pub mod conditional;
pub mod error;
pub mod kernel;
pub mod proportion;
pub mod simulation;
pub mod smoothing;
pub mod stats;
pub mod uefa;

pub use bootstrap::{
    bootstrap_resample, default_pilot, estimate_coverage_curve, estimate_coverage_curves,
    pilot_fit, select_ci_bandwidth, select_ci_bandwidths, select_h_from_curve, BootstrapConfig,
    CoverageCurve, SelectionMode,
};
pub use conditional::{
    agresti_coull_cond, conditional_interval, conditional_point, wald_cond, wilson_cond,
    ConditionalPoint,
};
pub use error::{Error, Result};
pub use kernel::{gaussian_kernel, KernelSpec};
pub use proportion::{
    agresti_coull_prop, classical_interval, interval_from_rate, wald_bias_term, wald_prop,
    wilson_prop, BinomialCount, IntervalEstimate, IntervalKind, IntervalMethod,
};
pub use simulation::{
    run_coverage_study, CoverageReport, CoverageRow, PilotRule, ReplicateRecord, Scenario,
    ScenarioSpec,
};
pub use smoothing::{
    aicc_score, default_pilot_grid, effective_sample_size, kde_at, kernel_sums, lscv_score, nw_at,
    select_density_bandwidth, select_h0_aicc, select_h0_lscv, Bandwidth, Sample,
};

// The guide's snippets run as doctests so the book and the code stay in step.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/classical-intervals.md")]
    pub struct ClassicalIntervals;
    #[doc = include_str!("../../../book/src/smoothing.md")]
    pub struct Smoothing;
    #[doc = include_str!("../../../book/src/conditional-intervals.md")]
    pub struct ConditionalIntervals;
    #[doc = include_str!("../../../book/src/bandwidth-bootstrap.md")]
    pub struct BandwidthBootstrap;
    #[doc = include_str!("../../../book/src/simulation.md")]
    pub struct Simulation;
    #[doc = include_str!("../../../book/src/two-legged-ties.md")]
    pub struct TwoLeggedTies;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
