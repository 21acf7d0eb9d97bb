//! `analyze`: estimate a marginal from a stored ensemble dataset and compute
//! its weighted-norm functionals.

use super::{save_density, write_json, Failure};
use crate::config::{AnalyzeSection, ExperimentConfig};
use crate::csvout::{fmt, write_csv};
use crate::manifest::write_manifest;
use meanfield_core::ensemble::restore;
use meanfield_core::marginal::{estimate_marginal, weighted_lq_norm};
use meanfield_core::CompiledKernel;
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct AnalyzeReport {
    config_hash: String,
    dataset_hash: String,
    k: usize,
    time: f64,
    mass: f64,
    truncation_mass: f64,
    weighted_norm: meanfield_core::marginal::WeightedNormReport,
}

pub fn run(
    config: &ExperimentConfig,
    section: &AnalyzeSection,
    config_dir: &Path,
    out: &Path,
    plots: bool,
) -> Result<(), Failure> {
    std::fs::create_dir_all(out)?;
    let dataset_dir = config_dir.join(&section.dataset_dir);
    let dataset = restore(&dataset_dir)?;
    let marginal = estimate_marginal(&dataset, section.k, section.time, &section.grid)?;
    let kernel = CompiledKernel::new(&dataset.config.kernel)?;
    let norm = weighted_lq_norm(&marginal, section.q, section.lambda, &kernel)?;

    save_density(&out.join("marginal.mft"), &marginal)?;
    export_slice(&marginal, out)?;
    let report = AnalyzeReport {
        config_hash: config.canonical_hash(),
        dataset_hash: dataset.config_hash.clone(),
        k: section.k,
        time: section.time,
        mass: marginal.mass(),
        truncation_mass: marginal.truncation_mass,
        weighted_norm: norm,
    };
    write_json(&out.join("report.json"), &report)?;
    if plots {
        super::plots::emit_plots(out)?;
    }
    write_manifest(out, &config.canonical_hash(), "analyze").map_err(Failure::from)?;
    Ok(())
}

/// CSV view of the first grid slot: (x, v, value) for kinetic grids in d=1,
/// (x1, x2, value) for spatial d=2 grids, (x, value) for spatial d=1 grids.
/// Orders k=2 are exported through their slot-1 marginal view.
fn export_slice(g: &meanfield_core::marginal::GridDensity, out: &Path) -> Result<(), Failure> {
    let view = if g.k == 2 {
        meanfield_core::marginal::marginalize_slot2(g)?
    } else {
        g.clone()
    };
    let mut rows = Vec::new();
    let header: Vec<&str>;
    if view.d == 1 && view.v_bins > 0 {
        header = vec!["x", "v", "value"];
        for j in 0..view.x_bins {
            for l in 0..view.v_bins {
                let x = (j as f64 + 0.5) / view.x_bins as f64;
                let v = -view.v_max + (l as f64 + 0.5) * 2.0 * view.v_max / view.v_bins as f64;
                rows.push(vec![fmt(x), fmt(v), fmt(view.values[j * view.v_bins + l])]);
            }
        }
    } else if view.d == 2 && view.v_bins == 0 {
        header = vec!["x1", "x2", "value"];
        for j in 0..view.x_bins {
            for l in 0..view.x_bins {
                let x1 = (j as f64 + 0.5) / view.x_bins as f64;
                let x2 = (l as f64 + 0.5) / view.x_bins as f64;
                rows.push(vec![fmt(x1), fmt(x2), fmt(view.values[j * view.x_bins + l])]);
            }
        }
    } else {
        header = vec!["x", "value"];
        for j in 0..view.values.len() {
            let x = (j as f64 + 0.5) / view.x_bins as f64;
            rows.push(vec![fmt(x), fmt(view.values[j])]);
        }
    }
    write_csv(&out.join("marginal.csv"), &header, &rows)?;
    Ok(())
}
