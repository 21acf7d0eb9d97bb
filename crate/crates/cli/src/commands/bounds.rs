//! `bounds`: evaluate the scalar hierarchy machinery for one parameter set
//! and cross-check the closed forms against the brute-force recursion.

use super::{write_json, Failure};
use crate::config::{BoundsSection, ExperimentConfig};
use crate::csvout::{fmt, write_csv};
use crate::manifest::write_manifest;
use meanfield_core::hierarchy::{
    existence_time, final_marginal_bound, lambda_min, lambda_schedule, picard_equality_trace,
    verify_recursion,
};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct BoundRow {
    k: usize,
    closed_form: Option<f64>,
    recursion_value: f64,
}

#[derive(Serialize)]
struct BoundsReport {
    config_hash: String,
    lambda_min: f64,
    lambda_schedule: Vec<[f64; 2]>,
    growth_constant: f64,
    existence_time: f64,
    t: f64,
    in_regime: bool,
    table: Vec<BoundRow>,
    recursion_margin_min: f64,
    recursion_holds: bool,
}

pub fn run(
    config: &ExperimentConfig,
    section: &BoundsSection,
    out: &Path,
    plots: bool,
) -> Result<(), Failure> {
    std::fs::create_dir_all(out)?;
    let params = &section.params;
    params.validate()?;
    if section.k_max == 0 || section.k_max >= params.n {
        return Err(Failure::Config(format!(
            "k_max must lie in 1..N-1, got {} with N={}",
            section.k_max, params.n
        )));
    }
    let l_const = params.growth_constant();
    let t_star = existence_time(l_const, params.f0, params.f_cap);
    let schedule: Vec<[f64; 2]> = (0..=10)
        .map(|j| {
            let t = section.t * j as f64 / 10.0;
            [t, lambda_schedule(params.lambda_big, t)]
        })
        .collect();

    // Brute-force recursion with the terminal row pinned at F^N, the same
    // closure the closed-form bound collapses.
    let f0 = params.f0;
    let f_cap = params.f_cap;
    let n = params.n;
    let trace = picard_equality_trace(
        1,
        n,
        section.t,
        section.picard_steps,
        |k| f0.powi(k as i32),
        |_| f_cap.powi(n as i32),
        l_const,
    );
    let checks = verify_recursion(&trace, 1e-9)?;
    let margin_min = checks.iter().map(|c| c.margin + c.tolerance).fold(f64::INFINITY, f64::min);
    let holds = checks.iter().all(|c| c.holds);

    let in_regime = 4.0 * l_const * section.t * f0.max(f_cap) < 1.0;
    let last = trace.values.len() - 1;
    let mut table = Vec::new();
    let mut rows = Vec::new();
    for k in 1..=section.k_max {
        let closed = final_marginal_bound(k, n, f0, f_cap, l_const, section.t).ok();
        let recursion_value = trace.values[last][k - 1];
        rows.push(vec![
            k.to_string(),
            closed.map_or_else(|| "nan".to_string(), fmt),
            fmt(recursion_value),
        ]);
        table.push(BoundRow {
            k,
            closed_form: closed,
            recursion_value,
        });
    }
    write_csv(&out.join("bounds.csv"), &["k", "closed_form", "recursion_value"], &rows)?;

    let report = BoundsReport {
        config_hash: config.canonical_hash(),
        lambda_min: lambda_min(params.q, params.sigma),
        lambda_schedule: schedule,
        growth_constant: l_const,
        existence_time: t_star,
        t: section.t,
        in_regime,
        table,
        recursion_margin_min: margin_min,
        recursion_holds: holds,
    };
    write_json(&out.join("report.json"), &report)?;
    if plots {
        super::plots::emit_plots(out)?;
    }
    write_manifest(out, &config.canonical_hash(), "bounds").map_err(Failure::from)?;
    Ok(())
}
