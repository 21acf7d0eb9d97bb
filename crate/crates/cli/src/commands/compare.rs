//! `compare`: sweep the particle count and measure convergence of the
//! empirical marginals, either against a kinetic reference solve (d = 1) or
//! between successive particle counts (self-convergence).

use super::{write_json, Failure};
use crate::config::{CompareReference, CompareSection, ExperimentConfig};
use crate::csvout::{fmt, write_csv};
use crate::manifest::write_manifest;
use meanfield_core::ensemble::{run_ensemble, InitialLawSpec};
use meanfield_core::marginal::{chaos_distance, estimate_marginal, GridDensity};
use meanfield_core::vlasov::{solve_vpfp_1d, tensorize_phase, PhaseGrid1D};
use meanfield_core::CompiledKernel;
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct CompareReport {
    config_hash: String,
    n_values: Vec<usize>,
    time: f64,
    rows: Vec<serde_json::Value>,
}

pub fn run(
    config: &ExperimentConfig,
    section: &CompareSection,
    n_override: Option<&[usize]>,
    out: &Path,
    plots: bool,
) -> Result<(), Failure> {
    std::fs::create_dir_all(out)?;
    let n_values: Vec<usize> = n_override
        .map(|v| v.to_vec())
        .unwrap_or_else(|| section.n_values.clone());
    if n_values.len() < 2 {
        return Err(Failure::Config("compare needs at least two particle counts".into()));
    }
    let time = section.sim.t_end;
    let kernel = CompiledKernel::new(&section.sim.kernel)?;

    let ensemble_for = |n: usize| -> Result<meanfield_core::ensemble::EnsembleDataset, Failure> {
        let mut sim = section.sim.clone();
        sim.n_particles = n;
        Ok(run_ensemble(&sim, section.replicas, &section.initial_law)?)
    };

    let mut rows_csv = Vec::new();
    let mut rows_json = Vec::new();
    match &section.reference {
        CompareReference::KineticD1 { nx, nv, dt } => {
            if section.sim.dim != 1 {
                return Err(Failure::Config("kinetic reference requires d = 1".into()));
            }
            let velocity_std = match &section.initial_law {
                InitialLawSpec::ProductUniformGaussian { velocity_std } => *velocity_std,
                _ => {
                    return Err(Failure::Config(
                        "kinetic reference requires the product uniform-Gaussian law".into(),
                    ))
                }
            };
            let f0 =
                PhaseGrid1D::cosine_gaussian(*nx, *nv, section.grid.v_max, 0.0, velocity_std);
            let (sol, _) =
                solve_vpfp_1d(&f0, &section.sim.kernel, section.sim.sigma, time, *dt)?;
            if nx % section.grid.x_bins != 0 || nv % section.grid.v_bins != 0 {
                return Err(Failure::Config(
                    "marginal grid must divide the kinetic solver grid".into(),
                ));
            }
            let restricted =
                sol.restrict(nx / section.grid.x_bins, nv / section.grid.v_bins)?;
            let ref1 = tensorize_phase(&restricted, 1)?;
            let ref2 = tensorize_phase(&restricted, 2)?;
            for &n in &n_values {
                let dataset = ensemble_for(n)?;
                let m1 = estimate_marginal(&dataset, 1, time, &section.grid)?;
                let d1 = chaos_distance(&m1, &ref1, section.q, section.lambda, &kernel)?;
                let m2 = estimate_marginal(&dataset, 2, time, &section.grid)?;
                let d2 = chaos_distance(&m2, &ref2, section.q, section.lambda, &kernel)?;
                rows_csv.push(vec![
                    n.to_string(),
                    fmt(d1.l1),
                    fmt(d1.lq),
                    fmt(d2.l1),
                    fmt(d2.lq),
                ]);
                rows_json.push(serde_json::json!({
                    "n": n,
                    "l1_k1": d1.l1, "lq_k1": d1.lq, "weighted_lq_k1": d1.weighted_lq,
                    "l1_k2": d2.l1, "lq_k2": d2.lq, "weighted_lq_k2": d2.weighted_lq,
                }));
            }
            write_csv(
                &out.join("convergence.csv"),
                &["n", "l1_k1", "lq_k1", "l1_k2", "lq_k2"],
                &rows_csv,
            )?;
        }
        CompareReference::SelfConvergence => {
            let mut prev: Option<(usize, GridDensity)> = None;
            for &n in &n_values {
                let dataset = ensemble_for(n)?;
                let m = estimate_marginal(&dataset, 1, time, &section.grid)?;
                if let Some((n_prev, m_prev)) = prev.take() {
                    let d = chaos_distance(&m_prev, &m, section.q, section.lambda, &kernel)?;
                    rows_csv.push(vec![n_prev.to_string(), fmt(d.l1), fmt(d.lq)]);
                    rows_json.push(serde_json::json!({
                        "n": n_prev, "n_next": n, "l1": d.l1, "lq": d.lq,
                    }));
                }
                prev = Some((n, m));
            }
            write_csv(&out.join("convergence.csv"), &["n", "l1_k1", "lq_k1"], &rows_csv)?;
        }
    }

    let report = CompareReport {
        config_hash: config.canonical_hash(),
        n_values,
        time,
        rows: rows_json,
    };
    write_json(&out.join("report.json"), &report)?;
    if plots {
        super::plots::emit_plots(out)?;
    }
    write_manifest(out, &config.canonical_hash(), "compare").map_err(Failure::from)?;
    Ok(())
}
