//! Terminal run structure of 1-D dynamics over a (w, seed) matrix: one row
//! per monochromatic run plus a per-cell summary.

use schelling::scaling::{final_config_1d, FinalConfigRow};

use super::{run_cells, seed_range, RunError, RunResult};
use crate::artifacts::RunDir;
use crate::config::RunConfig;
use crate::Status;

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> RunResult {
    let mut matrix = Vec::new();
    for &w in &cfg.w {
        for seed in seed_range(cfg) {
            matrix.push((w, seed));
        }
    }
    let r_width = cfg.r.round() as usize;
    let outs = run_cells(matrix, cfg.sequential, |&(w, seed)| -> Result<FinalConfigRow, RunError> {
        Ok(final_config_1d(r_width, w, cfg.m, seed, cfg.shared_init, cfg.horizon)?)
    })?;

    let mut runs = dir.csv(
        "final_runs.csv",
        &["w", "seed", "run_index", "len", "len_over_w"],
    )?;
    let mut cells = dir.csv(
        "final_cells.csv",
        &["w", "seed", "nodes", "events", "stabilized", "runs", "min_run", "origin_len_over_w"],
    )?;
    let mut unstable = 0usize;
    let mut min_run_global = usize::MAX;
    for row in &outs {
        if !row.stabilized {
            unstable += 1;
        }
        min_run_global = min_run_global.min(row.min_run);
        for (idx, &len_over_w) in row.rescaled_lengths.iter().enumerate() {
            let len = (len_over_w * row.w as f64).round() as u64;
            runs.row(&[
                row.w.into(),
                row.seed.into(),
                idx.into(),
                len.into(),
                len_over_w.into(),
            ])?;
        }
        cells.row(&[
            row.w.into(),
            row.seed.into(),
            row.node_count.into(),
            row.events.into(),
            row.stabilized.into(),
            row.runs.into(),
            row.min_run.into(),
            row.origin_len.into(),
        ])?;
    }
    runs.close()?;
    cells.close()?;

    let headline = serde_json::json!({
        "cells": outs.len(),
        "stabilized": outs.len() - unstable,
        "min_run_over_all_cells": min_run_global,
    });
    let status = if unstable == 0 {
        Status::Done
    } else {
        Status::Inconclusive(format!(
            "{unstable} of {} cells hit the horizon before stabilizing",
            outs.len()
        ))
    };
    Ok((status, headline))
}
