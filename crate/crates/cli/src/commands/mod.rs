//! One driver per experiment family. Each driver turns a validated
//! [`RunConfig`](crate::RunConfig) into CSV artifacts plus a headline JSON
//! fragment for the run summary, and reports whether the run was conclusive.

use rayon::prelude::*;

use crate::artifacts::RunDir;
use crate::config::{Kind, RunConfig};
use crate::Status;

mod couple;
mod final_configs;
mod occupation;
mod simulate;
mod solve;
mod stable_shape;

/// Failures after configuration was accepted. `Rejected` still maps to exit
/// code 2 (a module precondition names the field); `Runtime` maps to exit 1.
#[derive(Debug)]
pub enum RunError {
    Rejected(String),
    Runtime(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Rejected(msg) | RunError::Runtime(msg) => f.write_str(msg),
        }
    }
}

impl From<schelling::Error> for RunError {
    fn from(e: schelling::Error) -> Self {
        match e {
            schelling::Error::InvalidParameter { .. } => RunError::Rejected(e.to_string()),
            schelling::Error::GeometryMismatch(_) => RunError::Rejected(e.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Runtime(format!("i/o: {e}"))
    }
}

pub type RunResult = Result<(Status, serde_json::Value), RunError>;

pub fn dispatch(cfg: &RunConfig, dir: &mut RunDir) -> RunResult {
    match cfg.kind {
        Kind::Simulate => simulate::run(cfg, dir),
        Kind::Solve => solve::run(cfg, dir),
        Kind::Couple => couple::run(cfg, dir),
        Kind::FinalConfigs => final_configs::run(cfg, dir),
        Kind::StableShape => stable_shape::run(cfg, dir),
        Kind::Occupation => occupation::run(cfg, dir),
    }
}

/// Runs one closure per experiment-matrix cell, in parallel unless the
/// config pins the sequential path. Results come back in input order either
/// way, so the artifact bytes do not depend on the schedule.
pub fn run_cells<K, T, F>(cells: Vec<K>, sequential: bool, f: F) -> Result<Vec<T>, RunError>
where
    K: Send + Sync,
    T: Send,
    F: Fn(&K) -> Result<T, RunError> + Sync,
{
    if sequential {
        cells.iter().map(&f).collect()
    } else {
        cells.par_iter().map(&f).collect()
    }
}

/// Seeds of a run: `seed, seed+1, …` for `seeds` replicates.
pub fn seed_range(cfg: &RunConfig) -> Vec<u64> {
    (0..cfg.seeds as u64).map(|k| cfg.seed.wrapping_add(k)).collect()
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
