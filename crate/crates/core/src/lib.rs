//! Estimating the sample mean and standard deviation from the median, range
//! and/or interquartile range reported by a study.
//!
//! The crate is organised bottom-up:
//!
//! * [`normal`]: standard normal density, distribution function and quantile.
//! * [`order_stats`]: expected normal order statistics and the scaling
//!   constants derived from them.
//! * [`estimators`]: mean and standard deviation estimators for the three
//!   reporting scenarios.
//! * [`simulation`]: Monte Carlo evaluation of the estimators.
//! * [`batch`]: CSV enrichment of many study summaries.

pub mod batch;
pub mod error;
pub mod estimators;
pub mod format;
pub mod normal;
pub mod order_stats;
pub mod quadrature;
pub mod simulation;
mod special;

pub use error::{Error, Result};
pub use estimators::{
    estimate, estimate_mean, estimate_sd, Estimate, FiveNumberSummary, Flag, Flags, MethodId,
    QuartileSummary, RangeSummary, Scenario, ScenarioInput, SdEstimate,
};
pub use normal::Probability;
