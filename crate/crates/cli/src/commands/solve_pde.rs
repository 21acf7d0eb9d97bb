//! `solve-pde`: deterministic reference solves of the limiting equations,
//! serialized as density tensors with CSV profiles.

use super::{save_density, write_json, Failure};
use crate::config::{ExperimentConfig, SolvePdeSection};
use crate::csvout::{fmt, write_csv};
use crate::manifest::write_manifest;
use meanfield_core::vlasov::{
    solve_first_order, solve_vpfp_1d, tensorize_phase, tensorize_spatial, PhaseGrid1D,
    SpatialGrid,
};
use std::path::Path;

pub fn run(
    config: &ExperimentConfig,
    section: &SolvePdeSection,
    out: &Path,
    plots: bool,
) -> Result<(), Failure> {
    std::fs::create_dir_all(out)?;
    match section {
        SolvePdeSection::KineticD1 {
            kernel,
            sigma,
            t_end,
            dt,
            nx,
            nv,
            v_max,
            perturbation,
            velocity_std,
        } => {
            let f0 = PhaseGrid1D::cosine_gaussian(*nx, *nv, *v_max, *perturbation, *velocity_std);
            let (g, report) = solve_vpfp_1d(&f0, kernel, *sigma, *t_end, *dt)?;
            save_density(&out.join("phase.mft"), &tensorize_phase(&g, 1)?)?;
            let rho = g.spatial_density();
            let rows: Vec<Vec<String>> = rho
                .iter()
                .enumerate()
                .map(|(j, &v)| vec![fmt(g.x_center(j)), fmt(v)])
                .collect();
            write_csv(&out.join("rho.csv"), &["x", "density"], &rows)?;
            write_json(&out.join("report.json"), &report)?;
        }
        SolvePdeSection::FirstOrder {
            kernel,
            sigma,
            t_end,
            dt,
            n,
            d,
            perturbation,
        } => {
            let f0 = SpatialGrid::cosine(*n, *d, *perturbation);
            let (g, report) = solve_first_order(&f0, kernel, *sigma, *t_end, *dt)?;
            save_density(&out.join("phase.mft"), &tensorize_spatial(&g, 1)?)?;
            if *d == 1 {
                let rows: Vec<Vec<String>> = g
                    .f
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| vec![fmt((j as f64 + 0.5) / *n as f64), fmt(v)])
                    .collect();
                write_csv(&out.join("rho.csv"), &["x", "density"], &rows)?;
            }
            write_json(&out.join("report.json"), &report)?;
        }
    }
    if plots {
        super::plots::emit_plots(out)?;
    }
    write_manifest(out, &config.canonical_hash(), "solve-pde").map_err(Failure::from)?;
    Ok(())
}
