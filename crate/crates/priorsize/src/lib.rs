//! Prior data size diagnostics for conjugate Bayesian models.
//!
//! The library estimates, from a single dataset, how many observations a
//! prior is worth: it compares the average posterior uncertainty reached
//! with the prior on subsamples of size k against the uncertainty a
//! baseline (non-informative) prior reaches with more or fewer
//! observations, and reads off the difference M(k) in units of data. The
//! trend of M(k) separates genuinely informative priors from priors that
//! conflict with the data.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod families;
pub mod matching;
pub mod pipeline;
pub mod plot;
pub mod resample;
pub mod simstudy;
pub mod uncertainty;

pub use error::{Error, Result};
pub use families::{FamilyKind, FamilySpec, PosteriorSummary, SufficientSummary};
pub use matching::{DiagnoseOptions, DiagnosticReport, Thresholds, Verdict, Warning};
pub use pipeline::{run, PipelineConfig, PipelineOutput};
pub use resample::{SubsamplePlan, UCurve, UPoint};
pub use uncertainty::{Aggregator, Measure, ThetaHat, UncertaintyConfig};
