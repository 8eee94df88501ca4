//! Slope estimation for the linear measurement-error model.
//!
//! Observations `x = X + delta`, `y = Y + tau` of a line `Y = beta0 + beta1 X`
//! carry error in both coordinates. This crate fits the slope with the whole
//! family of oblique-error estimators, from OLS(y|x) through the geometric
//! mean to OLS(x|y), along with the likelihood (Deming), Copas,
//! fourth-moment and minimum-deviation estimators, and runs seeded Monte
//! Carlo comparisons of them.
//!
//! # Modules
//!
//! - [`summary_stats`] - sufficient statistics and degeneracy flags
//! - [`oblique`] - oblique objective, its quartic, the `lambda <-> slope` maps
//!   and the projection angle
//! - [`estimators`] - named slope estimators
//! - [`measurement_error`] - moment estimates of the error variances
//! - [`simulation`] - seeded Monte Carlo studies
//! - [`tables`] / [`reference`] - regenerated comparison tables and the
//!   published values they are checked against
//!
//! # Example
//!
//! ```
//! use obliq_core::{estimators, summarize, PairedSample};
//!
//! let sample = PairedSample::new(
//!     vec![0.0, 1.0, 2.0, 3.0],
//!     vec![0.0, 1.0, 1.0, 2.0],
//! )?;
//! let stats = summarize(&sample)?;
//! let fit = estimators::minimum_deviation(&stats)?;
//! assert!(fit.beta1 >= 0.6 && fit.beta1 <= 2.0 / 3.0);
//! # Ok::<(), obliq_core::Error>(())
//! ```

pub mod error;
pub mod estimators;
pub mod measurement_error;
pub mod oblique;
pub mod reference;
pub mod simulation;
pub mod summary_stats;
pub mod tables;

pub use error::{Error, Result};
pub use estimators::{estimate_all, EstimateSet, FitNote, Method, SlopeFit};
pub use measurement_error::ErrorVarianceEstimates;
pub use oblique::ObliqueSolution;
pub use simulation::{SimulationConfig, SimulationReport, XDistribution};
pub use summary_stats::{summarize, validate, Diagnostics, PairedSample, SummaryStats};
