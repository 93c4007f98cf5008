//! Differentially private sanitization of bounded statistics.
//!
//! The crate implements the plain, truncated and boundary-inflated-truncated
//! (BIT) Laplace mechanisms together with:
//!
//! * closed-form first and second moments of the bounded outputs ([`moments`]),
//! * a catalog of l1 global sensitivities and output bounds ([`sensitivity`]),
//! * a privacy budget ledger with sequential/parallel composition ([`accountant`]),
//! * end-to-end sanitizers for a 2x2 covariance matrix and a 4-category
//!   proportion vector, including multiple synthesis ([`pipelines`]),
//! * a seeded, parallel simulation lab that writes replicate and summary CSVs
//!   ([`simlab`]),
//! * an analytic privacy-loss auditor ([`dpaudit`]).
//!
//! All bounds handed to a mechanism are data-invariant inputs. Nothing in this
//! crate derives a bound from the statistic being sanitized, except for the
//! covariance interval, which is built from already-sanitized variances.

pub mod accountant;
pub mod dpaudit;
pub mod error;
pub mod mechanisms;
pub mod moments;
pub mod normal;
pub mod pipelines;
pub mod rng;
pub mod sensitivity;
pub mod simlab;

pub use accountant::{allocate_equal, compose, BudgetLedger, Composition, LedgerEntry};
pub use dpaudit::{audit_mechanism, AuditResult};
pub use error::{Error, Result};
pub use mechanisms::{
    bit_boundary_masses, bit_laplace_sample, exponential_mechanism_discrete,
    gaussian_sigma_lower_bound, laplace_sanitize, sanitize, trunc_laplace_cdf, trunc_laplace_pdf,
    trunc_laplace_sample, BoundedMechanism, BoundedStatistic, Bounds, LaplaceScale, MechanismKind,
    SanitizedValue, Utility,
};
pub use moments::{
    bias_order_check, bit_mean, bit_second_moment, bit_variance, trunc_mean,
    trunc_second_moment, trunc_variance, MomentReport,
};
pub use pipelines::{
    multiple_synthesis, normal_ci, sanitize_covariance, sanitize_proportions, wald_ci,
    CovMatrix2, CovRelease, Interval, ProportionRelease, ProportionVector, SynthesisBundle,
};
pub use rng::RandomStream;
pub use sensitivity::{
    covariance_output_bounds, gs_catalog, variance_output_bounds, AttributeBounds, StatisticKind,
};
pub use simlab::{SimConfig, SimReport, Study};
