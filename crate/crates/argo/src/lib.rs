//! Weekly epidemic nowcasting from search-frequency panels.
//!
//! The centerpiece is an L1-penalized autoregression with exogenous
//! search-term regressors, refit every week on a two-year rolling window.
//! Around it the crate provides:
//!
//! - an epidemiological-week time axis with series, panel, and
//!   revision-triangle containers that enforce point-in-time information
//!   availability ([`week`], [`series`], [`vintage`]);
//! - the variable transforms used throughout (logit for activity levels,
//!   shifted log for search frequencies) ([`transform`]);
//! - a cyclic coordinate-descent solver for the grouped lasso / ridge /
//!   elastic-net objective with cross-validated penalties ([`solver`]);
//! - the nowcasting model itself plus naive, AR(3), AR(3)+external-signal
//!   and search-only benchmarks, and the Gaussian predictive distribution
//!   of the underlying state-space formulation ([`model`]);
//! - accuracy metrics, relative efficiency, and a stationary-bootstrap
//!   confidence interval ([`eval`]);
//! - CSV ingestion, a seeded synthetic-data generator, and the `argo`
//!   command-line interface ([`io`], [`cli`]).
//!
//! All randomness flows from explicit seeds; every run is reproducible
//! bit-for-bit, including under `rayon` parallelism.

pub mod cli;
pub mod eval;
pub mod io;
pub mod model;
pub mod rng;
pub mod series;
pub mod solver;
pub mod transform;
pub mod vintage;
pub mod week;

pub use series::{PanelSource, SearchPanel, Unit, WeeklySeries};
pub use solver::{DesignMatrix, FitResult, Group, PenaltyRegime, PenaltySpec};
pub use vintage::VintageSeries;
pub use week::{EpiWeek, WeekId};
