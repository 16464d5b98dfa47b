//! Stable-shape constructions: box erosion per window size (trace + terminal
//! coordinates, drawn as ASCII when small) and, on request, the exhaustive
//! minimal-diameter search.

use schelling::rng::{stream, Purpose};
use schelling::shapes::{
    ascii_art, diameter, erode_to_stable, min_stable_diameter, ErosionResult, SelectionRule,
};

use rand::RngExt;

use super::{run_cells, RunError, RunResult};
use crate::artifacts::{Cell, RunDir};
use crate::config::RunConfig;
use crate::Status;

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> RunResult {
    let p = cfg.p_norm().map_err(|e| RunError::Rejected(e.to_string()))?;
    let n = cfg.n as u32;

    let outs = run_cells(cfg.w.clone(), cfg.sequential, |&w| -> Result<(u32, ErosionResult), RunError> {
        let radius = cfg.radius.unwrap_or_else(|| {
            // default start: the box whose erosion bound certifies existence
            (1u32 << (2 * n)) * w.pow(n + 1)
        });
        let rule = match cfg.rule.as_str() {
            "random" => {
                // one draw per window size keeps cells independent
                SelectionRule::Random(stream(cfg.seed, Purpose::Erosion, w as u64).random())
            }
            _ => SelectionRule::Lexicographic,
        };
        Ok((w, erode_to_stable(cfg.n, w, p, radius, rule)?))
    })?;

    let mut trace = dir.csv("erosion_trace.csv", &["w", "step", "boundary_pairs"])?;
    let mut nodes = {
        let mut cols: Vec<String> = vec!["w".into()];
        for axis in 0..cfg.n {
            cols.push(format!("x{axis}"));
        }
        let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
        dir.csv("shape_nodes.csv", &col_refs)?
    };
    let mut summaries = Vec::new();
    for (w, res) in &outs {
        for (step, &pairs) in res.trace.iter().enumerate() {
            trace.row(&[(*w).into(), step.into(), pairs.into()])?;
        }
        for node in &res.shape.nodes {
            let mut row: Vec<Cell> = vec![(*w).into()];
            for &c in node {
                row.push(c.into());
            }
            nodes.row(&row)?;
        }
        if !res.shape.certificate {
            return Err(RunError::Runtime(format!(
                "w = {w}: eroded terminal set failed its stability certificate"
            )));
        }
        if cfg.n == 2 && res.shape.diameter <= 60 && !res.shape.nodes.is_empty() {
            println!("terminal shape at w = {w} (diameter {}):", res.shape.diameter);
            println!("{}", ascii_art(&res.shape.nodes));
        }
        summaries.push(serde_json::json!({
            "w": w,
            "terminal_nodes": res.shape.nodes.len(),
            "diameter": res.shape.diameter,
            "flips": res.flips,
            "boundary_pairs_initial": res.trace.first(),
            "boundary_pairs_final": res.trace.last(),
        }));
    }
    trace.close()?;
    nodes.close()?;

    let mut search_exhausted = false;
    let mut search_json = serde_json::Value::Null;
    if cfg.min_diameter {
        let mut table = dir.csv(
            "min_diameter.csv",
            &["w", "exact", "diameter", "upper_bound", "sets_checked", "witnesses"],
        )?;
        let mut witnesses = {
            let mut cols: Vec<String> = vec!["w".into(), "witness".into()];
            for axis in 0..cfg.n {
                cols.push(format!("x{axis}"));
            }
            let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
            dir.csv("min_diameter_witnesses.csv", &col_refs)?
        };
        let mut rows = Vec::new();
        for &w in &cfg.w {
            let res = min_stable_diameter(w, cfg.n, p, cfg.search_cap)?;
            if !res.exact {
                search_exhausted = true;
            }
            table.row(&[
                w.into(),
                res.exact.into(),
                res.diameter.map(i64::from).unwrap_or(-1).into(),
                res.upper_bound.into(),
                res.sets_checked.into(),
                res.witnesses.len().into(),
            ])?;
            for (wi, witness) in res.witnesses.iter().enumerate() {
                for node in witness {
                    let mut row: Vec<Cell> = vec![w.into(), wi.into()];
                    for &c in node {
                        row.push(c.into());
                    }
                    witnesses.row(&row)?;
                }
                if cfg.n == 2 && diameter(witness) <= 60 {
                    println!("minimal witness {wi} at w = {w}:");
                    println!("{}", ascii_art(witness));
                }
            }
            rows.push(serde_json::json!({
                "w": w,
                "exact": res.exact,
                "diameter": res.diameter,
                "upper_bound": res.upper_bound,
            }));
        }
        table.close()?;
        witnesses.close()?;
        search_json = serde_json::Value::Array(rows);
    }

    let headline = serde_json::json!({
        "erosions": summaries,
        "min_diameter": search_json,
    });
    let status = if search_exhausted {
        Status::Inconclusive(
            "minimal-diameter search exhausted its cap; bound-only result".into(),
        )
    } else {
        Status::Done
    };
    Ok((status, headline))
}
