//! Experiment drivers behind the command-line tool.

pub mod config;
pub mod dft;
pub mod emit;
pub mod suite;
pub mod sweep;
mod tables;

pub use config::{ExperimentConfig, Format, RepKind};
pub use dft::{dft_chain, dft_matrix};
pub use emit::{emit, emit_to, without_timestamp, Envelope, Metadata, Tabular};
pub use suite::{random_chain_suite, SuiteReport};
pub use sweep::{sharpness_sweep, SweepRow, SweepTable};
