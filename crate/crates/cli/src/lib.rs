//! Command-line surface for ART changepoint inference: CSV ingestion,
//! transformation dispatch, and versioned JSON reports.
//!
//! The [`run`] functions are the same code paths the `art` binary uses, so
//! other front ends can produce identical reports.

pub mod config;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod run;

pub use config::RunConfig;
pub use run::{run, Outcome, EXIT_ERROR, EXIT_OK, EXIT_REJECT};
