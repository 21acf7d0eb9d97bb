//! Subcommand implementations and the shared failure type that drives the
//! process exit code.

pub mod analyze;
pub mod bounds;
pub mod compare;
pub mod plots;
pub mod simulate;
pub mod solve_pde;

use meanfield_core::marginal::GridDensity;
use meanfield_core::tensor_io::{load_tensor, save_tensor, Tensor};
use serde_json::json;
use std::path::Path;

/// Failure classification for the CLI: configuration problems exit with 2,
/// numerical breakdowns (blow-up, CFL, overflow, out-of-regime) with 3.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Config(_) => "config",
            Failure::Numerical(_) => "numerical",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<meanfield_core::Error> for Failure {
    fn from(e: meanfield_core::Error) -> Self {
        use meanfield_core::Error as E;
        let msg = e.to_string();
        match e {
            E::NonFiniteState { .. }
            | E::CflViolation { .. }
            | E::WeightOverflow { .. }
            | E::Overflow { .. }
            | E::OutOfRegime { .. } => Failure::Numerical(msg),
            _ => Failure::Config(msg),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<meanfield_core::Error>() {
            Ok(core) => core.into(),
            Err(other) => Failure::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Axis lengths of a density grid: per slot, d position axes then d velocity
/// axes (velocity axes absent on spatial-only grids).
fn density_shape(g: &GridDensity) -> Vec<usize> {
    let mut shape = Vec::new();
    for _ in 0..g.k {
        for _ in 0..g.d {
            shape.push(g.x_bins);
        }
        if g.v_bins > 0 {
            for _ in 0..g.d {
                shape.push(g.v_bins);
            }
        }
    }
    shape
}

pub fn save_density(path: &Path, g: &GridDensity) -> Result<(), Failure> {
    let metadata = json!({
        "k": g.k,
        "d": g.d,
        "x_bins": g.x_bins,
        "v_bins": g.v_bins,
        "v_max": g.v_max,
        "truncation_mass": g.truncation_mass,
        "pair_weight": g.pair_weight,
        "time": g.time,
    });
    let tensor = Tensor::new(density_shape(g), g.values.clone(), metadata)?;
    save_tensor(path, &tensor)?;
    Ok(())
}

pub fn load_density(path: &Path) -> Result<GridDensity, Failure> {
    let tensor = load_tensor(path)?;
    let m = &tensor.header.metadata;
    let need = |key: &str| -> Result<f64, Failure> {
        m.get(key)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Failure::Config(format!("density tensor missing field {key}")))
    };
    let g = GridDensity {
        k: need("k")? as usize,
        d: need("d")? as usize,
        x_bins: need("x_bins")? as usize,
        v_bins: need("v_bins")? as usize,
        v_max: need("v_max")?,
        values: tensor.data,
        truncation_mass: need("truncation_mass")?,
        pair_weight: need("pair_weight")?,
        time: need("time")?,
    };
    g.validate()?;
    Ok(g)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}
