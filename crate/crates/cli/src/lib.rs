//! Experiment runner around the `schelling` library: a validated
//! configuration layer (file + flag overlay + presets), hash-stamped CSV/JSON
//! artifacts, and one driver per experiment family.
//!
//! Exit-code contract of the binary: 0 success, 1 runtime failure (partial
//! outputs removed), 2 configuration rejected (the diagnostic names the field
//! or line), 3 run finished but inconclusive (e.g. a horizon was exhausted
//! before stabilization).

pub mod artifacts;
pub mod commands;
pub mod config;

pub use config::{ConfigError, Kind, Overlay, RunConfig};

/// Outcome of a dispatched run, before artifact finalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Done,
    /// Valid outputs, but the experiment's own stopping criterion was not
    /// reached (horizon exhausted, search budget spent, …).
    Inconclusive(String),
}
