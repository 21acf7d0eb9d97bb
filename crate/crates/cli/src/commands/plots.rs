//! Static plot emission: scans a results directory for the data files the
//! other subcommands write and renders deterministic SVGs next to them.

use super::{load_density, Failure};
use crate::csvout::read_csv;
use crate::svg::{heatmap, line_chart, Series};
use meanfield_core::Error;
use std::path::Path;

/// Render every recognized data file in `dir`; errors with `MissingData` if
/// nothing was recognized.
pub fn emit_plots(dir: &Path) -> Result<Vec<String>, Failure> {
    let mut written = Vec::new();

    let energy = dir.join("energy.csv");
    if energy.is_file() {
        let (_, rows) = read_csv(&energy)?;
        let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mean: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let expected: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        let svg = line_chart(
            "ensemble mean energy",
            "time",
            "energy",
            &[
                Series { label: "measured", xs: &times, ys: &mean },
                Series { label: "expected slope", xs: &times, ys: &expected },
            ],
            false,
        );
        std::fs::write(dir.join("energy.svg"), svg)?;
        written.push("energy.svg".to_string());
    }

    let rho = dir.join("rho.csv");
    if rho.is_file() {
        let (_, rows) = read_csv(&rho)?;
        let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let svg = line_chart(
            "spatial density",
            "x",
            "density",
            &[Series { label: "rho", xs: &xs, ys: &ys }],
            false,
        );
        std::fs::write(dir.join("rho.svg"), svg)?;
        written.push("rho.svg".to_string());
    }

    let conv = dir.join("convergence.csv");
    if conv.is_file() {
        let (header, rows) = read_csv(&conv)?;
        let ns: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mut series_data = Vec::new();
        for col in 1..header.len() {
            let ys: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            series_data.push((header[col].clone(), ys));
        }
        let series: Vec<Series> = series_data
            .iter()
            .map(|(label, ys)| Series { label, xs: &ns, ys })
            .collect();
        let svg = line_chart(
            "marginal distance vs particle count (log-log)",
            "log10 N",
            "log10 distance",
            &series,
            true,
        );
        std::fs::write(dir.join("convergence.svg"), svg)?;
        written.push("convergence.svg".to_string());
    }

    let bounds = dir.join("bounds.csv");
    if bounds.is_file() {
        let (_, rows) = read_csv(&bounds)?;
        let finite: Vec<&Vec<f64>> = rows.iter().filter(|r| r[1].is_finite()).collect();
        let ks: Vec<f64> = finite.iter().map(|r| r[0]).collect();
        let closed: Vec<f64> = finite.iter().map(|r| r[1]).collect();
        let recursion: Vec<f64> = finite.iter().map(|r| r[2]).collect();
        let svg = line_chart(
            "marginal bound vs recursion value (log scale)",
            "k",
            "log10 value",
            &[
                Series { label: "closed form", xs: &ks, ys: &closed.iter().map(|v| v.log10()).collect::<Vec<_>>() },
                Series { label: "recursion", xs: &ks, ys: &recursion.iter().map(|v| v.log10()).collect::<Vec<_>>() },
            ],
            false,
        );
        std::fs::write(dir.join("bounds.svg"), svg)?;
        written.push("bounds.svg".to_string());
    }

    for name in ["phase.mft", "marginal.mft"] {
        let path = dir.join(name);
        if !path.is_file() {
            continue;
        }
        let g = load_density(&path)?;
        let (rows_n, cols_n, field) = heatmap_view(&g);
        if rows_n == 0 {
            continue;
        }
        let svg = heatmap("density heatmap", &field, rows_n, cols_n);
        let out = name.replace(".mft", ".svg");
        std::fs::write(dir.join(&out), svg)?;
        written.push(out);
    }

    if written.is_empty() {
        return Err(Failure::from(Error::MissingData(format!(
            "no plottable data in {}",
            dir.display()
        ))));
    }
    Ok(written)
}

/// Extract a 2D view for heatmapping: (v, x) for kinetic d=1 grids, (x2, x1)
/// for spatial d=2 grids. Returns zero rows when no 2D view exists.
fn heatmap_view(g: &meanfield_core::marginal::GridDensity) -> (usize, usize, Vec<f64>) {
    if g.k != 1 {
        return (0, 0, Vec::new());
    }
    if g.d == 1 && g.v_bins > 0 {
        let mut field = vec![0.0; g.x_bins * g.v_bins];
        for j in 0..g.x_bins {
            for l in 0..g.v_bins {
                field[l * g.x_bins + j] = g.values[j * g.v_bins + l];
            }
        }
        (g.v_bins, g.x_bins, field)
    } else if g.d == 2 && g.v_bins == 0 {
        (g.x_bins, g.x_bins, g.values.clone())
    } else {
        (0, 0, Vec::new())
    }
}
