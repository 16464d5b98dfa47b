//! Continuum-flow runs: evolve one chosen initial datum, tracing sup norms
//! and plurality coverage at snapshots and dumping the final profile.

use schelling::continuum::{
    constant_hat, evolve, sawtooth_hat, ContinuumField, EvolveOptions, RhsForm,
};
use schelling::gaussian::sample_initial_field;
use schelling::grid::GridSpec;

use super::{RunError, RunResult};
use crate::artifacts::{Cell, RunDir};
use crate::config::RunConfig;
use crate::Status;

pub fn run(cfg: &RunConfig, dir: &mut RunDir) -> RunResult {
    let p = cfg.p_norm().map_err(|e| RunError::Rejected(e.to_string()))?;
    let cells = cfg.cells.unwrap_or(256);
    let spec = GridSpec::new(cfg.n, cfg.r, cells)?;

    let mut field = match cfg.data.as_str() {
        "constant" => {
            ContinuumField::from_hat(spec.clone(), &constant_hat(&spec, cfg.amp), p)?
        }
        "sawtooth" => ContinuumField::from_hat(spec.clone(), &sawtooth_hat(&spec)?, p)?,
        "gaussian" => {
            let initial = sample_initial_field(&spec, cfg.m, p, cfg.seed, 0)?;
            ContinuumField::new(spec.clone(), initial.channels, p)?
        }
        other => return Err(RunError::Rejected(format!("field `data`: unknown datum `{other}`"))),
    };
    let m = match cfg.data.as_str() {
        "gaussian" => cfg.m as usize,
        _ => 2, // hat data lives in two channels
    };

    let mut opts = EvolveOptions::euler(&spec);
    if let Some(dt) = cfg.dt {
        opts.dt = dt;
    }
    opts.rhs = RhsForm::SingleSite;
    opts.snapshot_every = Some((cfg.t / 32.0).max(opts.dt));
    opts.record_fields = true;
    opts.freeze_audit = spec.dim == 1;
    opts.drift_audit = true;
    let traj = evolve(&mut field, cfg.t, &opts);
    let states = traj.fields.as_ref().expect("record_fields was set");

    let mut trace = dir.csv("solve_trace.csv", &["t", "sup_state", "sup_hat", "claimed_cells"])?;
    for (k, &t) in traj.times.iter().enumerate() {
        let state = &states[k];
        let sup = state
            .iter()
            .flat_map(|ch| ch.iter())
            .fold(0.0f64, |a, &v| a.max(v.abs()));
        let sup_hat = if m == 2 {
            (0..spec.n_cells())
                .map(|i| (state[0][i] - state[1][i]).abs())
                .fold(0.0f64, f64::max)
        } else {
            f64::NAN
        };
        let claimed = traj.pluralities[k].iter().filter(|&&op| op != 0).count();
        trace.row(&[t.into(), sup.into(), sup_hat.into(), claimed.into()])?;
    }
    trace.close()?;

    let mut profile = {
        let mut cols: Vec<String> = vec!["cell".into()];
        for axis in 0..spec.dim {
            cols.push(format!("x{axis}"));
        }
        for ch in 1..=m {
            cols.push(format!("y{ch}"));
        }
        if m == 2 {
            cols.push("hat".into());
        }
        let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
        dir.csv("solve_profile.csv", &col_refs)?
    };
    for i in 0..spec.n_cells() {
        let mut row: Vec<Cell> = vec![i.into()];
        for x in spec.cell_center(i) {
            row.push(x.into());
        }
        let mut vals = Vec::with_capacity(m);
        for ch in 1..=m as u8 {
            vals.push(field.value(ch, i));
        }
        for &v in &vals {
            row.push(v.into());
        }
        if m == 2 {
            row.push((vals[0] - vals[1]).into());
        }
        profile.row(&row)?;
    }
    profile.close()?;

    let last = states.last().expect("at least the final snapshot");
    let sup_final = last
        .iter()
        .flat_map(|ch| ch.iter())
        .fold(0.0f64, |a, &v| a.max(v.abs()));
    let sup_hat_final = if m == 2 {
        (0..spec.n_cells())
            .map(|i| (last[0][i] - last[1][i]).abs())
            .fold(0.0f64, f64::max)
    } else {
        f64::NAN
    };
    if traj.freeze_violations > 0 {
        return Err(RunError::Runtime(format!(
            "{} interval-persistence violations along the flow",
            traj.freeze_violations
        )));
    }
    let headline = serde_json::json!({
        "t_final": cfg.t,
        "sup_state_final": sup_final,
        "sup_hat_final": sup_hat_final,
        "freeze_violations": traj.freeze_violations,
        "sup_drift_excess": traj.sup_excess,
        "lipschitz_drift_excess": traj.lipschitz_excess,
    });
    Ok((Status::Done, headline))
}
