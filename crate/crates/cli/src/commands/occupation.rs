//! Occupation-measure scans: per field seed, the sup of the band measure
//! over a sampled dyadic Lipschitz family across the ε sweep, with the
//! maximizing test functions serialized as level-k value lists.

use schelling::gaussian::{build_initial_field_fast, sample_white_noise};
use schelling::grid::GridSpec;
use schelling::occupation::{
    median_cell_fluctuation, occupation_measure, sample_lipschitz, sup_over_family,
    LipschitzGridFunction, SupDensityRow,
};

use super::{run_cells, seed_range, RunError, RunResult};
use crate::artifacts::RunDir;
use crate::config::RunConfig;
use crate::Status;

struct CellOut {
    seed: u64,
    fluctuation: f64,
    rows: Vec<SupDensityRow>,
    zero_measures: Vec<f64>,
}

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> RunResult {
    let cells = cfg.cells.unwrap_or(4096);
    let spec = GridSpec::new(1, cfg.r, cells)?;
    let width = cfg.r.round() as usize;
    if (cfg.r - width as f64).abs() > 1e-9 {
        return Err(RunError::Rejected(format!(
            "field `r`: test functions need an integer torus width, got {}",
            cfg.r
        )));
    }
    // one family for all field seeds: the sup is over a fixed function class
    let family = sample_lipschitz(cfg.level, cfg.budget, width, cfg.seed, cfg.samples);
    let zero = LipschitzGridFunction::constant(cfg.level, cfg.budget, width, 0)?;

    let outs = run_cells(seed_range(cfg), cfg.sequential, |&seed| -> Result<CellOut, RunError> {
        let noise = sample_white_noise(&spec, cfg.m, cfg.seed, seed)?;
        let hat = build_initial_field_fast(&noise, cfg.p_norm().map_err(|e| RunError::Rejected(e.to_string()))?)?
            .hat();
        let rows = sup_over_family(&hat, &spec, &family, &cfg.eps, cfg.local_steps)?;
        let zero_measures = cfg
            .eps
            .iter()
            .map(|&eps| occupation_measure(&hat, &spec, &zero, 0, eps).map(|e| e.measure))
            .collect::<Result<Vec<f64>, _>>()?;
        Ok(CellOut { seed, fluctuation: median_cell_fluctuation(&hat), rows, zero_measures })
    })?;

    let mut sup = dir.csv(
        "occupation_sup.csv",
        &[
            "seed",
            "eps",
            "sup_measure",
            "sup_density",
            "measure_over_eps",
            "zero_measure",
            "best_index",
            "improved_by_search",
            "resolution_limited",
        ],
    )?;
    let mut maximizers = dir.csv("occupation_maximizers.csv", &["seed", "eps", "knot", "units", "value"])?;
    let mut worst_spread = 0.0f64;
    for out in &outs {
        let ratios: Vec<f64> = out.rows.iter().map(|r| r.measure_over_epsilon).collect();
        let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
        worst_spread = worst_spread.max(hi / lo);
        for (row, &zero_measure) in out.rows.iter().zip(&out.zero_measures) {
            if row.sup_measure < zero_measure {
                return Err(RunError::Runtime(format!(
                    "seed {}: sup measure {} fell below the zero-function measure {zero_measure}",
                    out.seed, row.sup_measure
                )));
            }
            sup.row(&[
                out.seed.into(),
                row.epsilon.into(),
                row.sup_measure.into(),
                row.sup_density.into(),
                row.measure_over_epsilon.into(),
                zero_measure.into(),
                row.best_index.into(),
                row.improved_by_search.into(),
                row.resolution_limited.into(),
            ])?;
            let unit = (1u64 << row.maximizer.k) as f64;
            for (knot, &units) in row.maximizer.knots.iter().enumerate() {
                maximizers.row(&[
                    out.seed.into(),
                    row.epsilon.into(),
                    knot.into(),
                    units.into(),
                    (units as f64 / unit).into(),
                ])?;
            }
        }
    }
    sup.close()?;
    maximizers.close()?;

    let flagged: usize = outs
        .iter()
        .flat_map(|o| o.rows.iter())
        .filter(|r| r.resolution_limited)
        .count();
    let headline = serde_json::json!({
        "family_size": family.len(),
        "worst_measure_over_eps_spread": worst_spread,
        "resolution_limited_readings": flagged,
        "median_cell_fluctuation_first_seed": outs.first().map(|o| o.fluctuation),
    });
    Ok((Status::Done, headline))
}
