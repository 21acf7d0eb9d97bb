//! `simulate`: run a replica ensemble, store the dataset, and emit the
//! ensemble-mean energy trace with the predicted linear growth overlay.

use super::{write_json, Failure};
use crate::config::{ExperimentConfig, SimulateSection};
use crate::csvout::{fmt, write_csv};
use crate::manifest::write_manifest;
use meanfield_core::ensemble::{checkpoint, run_ensemble};
use meanfield_core::sim::{energy_report, expected_energy_slope};
use meanfield_core::CompiledKernel;
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct SimulateReport {
    config_hash: String,
    replica_count: usize,
    snapshot_times: Vec<f64>,
    expected_energy_slope: f64,
    mean_energy: Vec<f64>,
    min_pair_dist: f64,
    min_collision_floor_margin: f64,
}

pub fn run(
    config: &ExperimentConfig,
    section: &SimulateSection,
    out: &Path,
    plots: bool,
) -> Result<(), Failure> {
    std::fs::create_dir_all(out)?;
    let dataset = run_ensemble(&section.sim, section.replicas, &section.initial_law)?;
    checkpoint(&dataset, &out.join("dataset"))?;

    let kernel = CompiledKernel::new(&section.sim.kernel)?;
    let nt = dataset.snapshot_times.len();
    let mut mean_energy = vec![0.0; nt];
    let mut min_pair = f64::INFINITY;
    let mut min_floor_margin = f64::INFINITY;
    for replica in &dataset.snapshots {
        for (ti, state) in replica.iter().enumerate() {
            let rep = energy_report(state, &kernel);
            mean_energy[ti] += rep.total / dataset.replica_count as f64;
            if section.sim.n_particles > 1 {
                min_pair = min_pair.min(rep.min_pair_dist);
                min_floor_margin = min_floor_margin.min(rep.min_pair_dist - rep.collision_floor);
            }
        }
    }

    let slope = expected_energy_slope(&section.sim);
    let rows: Vec<Vec<String>> = dataset
        .snapshot_times
        .iter()
        .zip(&mean_energy)
        .map(|(&t, &e)| vec![fmt(t), fmt(e), fmt(mean_energy[0] + slope * t)])
        .collect();
    write_csv(&out.join("energy.csv"), &["time", "mean_energy", "expected"], &rows)?;

    let report = SimulateReport {
        config_hash: config.canonical_hash(),
        replica_count: dataset.replica_count,
        snapshot_times: dataset.snapshot_times.clone(),
        expected_energy_slope: slope,
        mean_energy,
        min_pair_dist: min_pair,
        min_collision_floor_margin: min_floor_margin,
    };
    write_json(&out.join("report.json"), &report)?;

    if plots {
        super::plots::emit_plots(out)?;
    }
    write_manifest(out, &config.canonical_hash(), "simulate").map_err(Failure::from)?;
    Ok(())
}
