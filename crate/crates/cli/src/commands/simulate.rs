//! Event-driven lattice runs over a (w, seed) matrix: per-cell stabilization
//! summary plus run- or cluster-structure tables.

use schelling::lattice::{
    extract_clusters, extract_runs_1d, Geometry, NeighborhoodMask, OpinionGrid,
};

use super::{run_cells, seed_range, RunError, RunResult};
use crate::artifacts::{Cell, RunDir};
use crate::config::RunConfig;
use crate::Status;

struct CellOut {
    w: u32,
    seed: u64,
    side: usize,
    nodes: usize,
    events: usize,
    flips: usize,
    stabilized_at: Option<f64>,
    recount_stable: bool,
    disagreement_initial: u64,
    disagreement_final: u64,
    // 1-D: monochromatic runs; n ≥ 2: clusters
    structure: Vec<(String, u64, f64)>, // (label, size, extra)
}

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> RunResult {
    let p = cfg.p_norm().map_err(|e| RunError::Rejected(e.to_string()))?;
    let closure = cfg.closure_rule().map_err(|e| RunError::Rejected(e.to_string()))?;

    let mut matrix = Vec::new();
    for &w in &cfg.w {
        for seed in seed_range(cfg) {
            matrix.push((w, seed));
        }
    }

    let outs = run_cells(matrix, cfg.sequential, |&(w, seed)| -> Result<CellOut, RunError> {
        let side = match cfg.n {
            1 => cfg.r.round() as usize * w as usize,
            _ => cfg.side.expect("validated: n ≥ 2 has a side"),
        };
        let mask = NeighborhoodMask::build(cfg.n, w, p, closure)?;
        let geometry = Geometry::torus(cfg.n, side);
        let mut grid = OpinionGrid::init(geometry.clone(), cfg.m, &mask, seed)?;
        let disagreement_initial = grid.disagreement_sum();
        let log = grid.run_dynamics(cfg.horizon, seed, true);
        let recount_stable = OpinionGrid::from_opinions(
            geometry,
            cfg.m,
            &mask,
            grid.opinions().to_vec(),
        )?
        .is_stable_configuration();
        let structure = if cfg.n == 1 {
            extract_runs_1d(&grid)
                .into_iter()
                .map(|r| (format!("run-{}", r.opinion), r.len as u64, r.len as f64 / w as f64))
                .collect()
        } else {
            extract_clusters(&grid)
                .into_iter()
                .map(|c| {
                    (format!("cluster-{}", c.opinion), c.size as u64, c.diameter as f64)
                })
                .collect()
        };
        Ok(CellOut {
            w,
            seed,
            side,
            nodes: grid.geometry.node_count(),
            events: log.events.len(),
            flips: log.flip_count(),
            stabilized_at: log.stabilized_at,
            recount_stable,
            disagreement_initial,
            disagreement_final: grid.disagreement_sum(),
            structure,
        })
    })?;

    let mut cells = dir.csv(
        "simulate_cells.csv",
        &[
            "w",
            "seed",
            "side",
            "nodes",
            "events",
            "flips",
            "stabilized",
            "t_stable",
            "recount_stable",
            "disagreement_initial",
            "disagreement_final",
        ],
    )?;
    let mut structure = dir.csv(
        "simulate_structure.csv",
        &["w", "seed", "piece", "label", "size", "extent"],
    )?;
    let mut unstable = 0usize;
    for out in &outs {
        if out.stabilized_at.is_none() {
            unstable += 1;
        }
        if !out.recount_stable && out.stabilized_at.is_some() {
            return Err(RunError::Runtime(format!(
                "w = {}, seed {}: stabilized run failed the independent recount",
                out.w, out.seed
            )));
        }
        cells.row(&[
            out.w.into(),
            out.seed.into(),
            out.side.into(),
            out.nodes.into(),
            out.events.into(),
            out.flips.into(),
            out.stabilized_at.is_some().into(),
            out.stabilized_at.unwrap_or(-1.0).into(),
            out.recount_stable.into(),
            out.disagreement_initial.into(),
            out.disagreement_final.into(),
        ])?;
        for (idx, (label, size, extent)) in out.structure.iter().enumerate() {
            structure.row(&[
                out.w.into(),
                out.seed.into(),
                idx.into(),
                Cell::Text(label.clone()),
                (*size).into(),
                (*extent).into(),
            ])?;
        }
    }
    cells.close()?;
    structure.close()?;

    let headline = serde_json::json!({
        "cells": outs.len(),
        "stabilized": outs.len() - unstable,
        "max_events_per_node": outs
            .iter()
            .map(|o| o.events as f64 / o.nodes as f64)
            .fold(0.0f64, f64::max),
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
