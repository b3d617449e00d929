//! Config-driven experiments on spectra of products of random matrices.
//!
//! Each experiment turns one spectral claim into a reproducible Monte Carlo
//! (or exact) computation with explicit pass/fail gates. Outputs are a
//! per-replica CSV and a JSON summary; see [`record`] for the layout.

pub mod config;
pub mod error;
pub mod experiments;
pub mod function;
pub mod record;
pub mod runner;

pub use config::{Experiment, ExperimentConfig};
pub use error::{HarnessError, Result, EXIT_CONFIG, EXIT_GATE_FAILURE, EXIT_NUMERICAL, EXIT_PASS};
pub use experiments::run;
pub use record::{ExperimentRecord, Gate, VERSION};
