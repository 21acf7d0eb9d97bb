//! Replica orchestration: run R independent copies of a simulation that
//! differ only in their seed, collect snapshots on a shared time grid, and
//! checkpoint/restore the whole dataset bit-exactly.

use crate::error::{Error, Result};
use crate::kernel::CompiledKernel;
use crate::marginal::GridDensity;
use crate::rng::{counter_normal, counter_uniform, Stream};
use crate::sim::{step_replica, Order, ParticleState, SimConfig};
use crate::tensor_io::{self, Tensor};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialLawSpec {
    /// Product law: positions uniform on the torus, velocities centered
    /// Gaussian with the given standard deviation (ignored in first-order
    /// mode).
    ProductUniformGaussian { velocity_std: f64 },
    /// Order-1 tabulated density sampled by inverse CDF over cells with a
    /// uniform jitter inside each cell.
    Tabulated { density: GridDensity },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDataset {
    pub config: SimConfig,
    pub replica_count: usize,
    pub snapshot_times: Vec<f64>,
    /// `snapshots[r][t]`, all replicas sharing `snapshot_times`.
    pub snapshots: Vec<Vec<ParticleState>>,
    pub config_hash: String,
}

pub fn config_hash(config: &SimConfig) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    let mut h = Sha256::new();
    h.update(&bytes);
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Replica r runs with seed `base_seed + r`.
pub fn replica_seed(base: u64, replica: usize) -> u64 {
    base.wrapping_add(replica as u64)
}

/// Draw the initial state of one replica. Deterministic in (config, law,
/// replica): every coordinate is a pure function of the replica seed and its
/// site index.
pub fn init_state(
    config: &SimConfig,
    law: &InitialLawSpec,
    replica: usize,
) -> Result<ParticleState> {
    let seed = replica_seed(config.seed, replica);
    let n = config.n_particles;
    let d = config.dim;
    let mut st = ParticleState::new(n, d, config.order, seed);
    match law {
        InitialLawSpec::ProductUniformGaussian { velocity_std } => {
            for i in 0..n * d {
                st.positions[i] = counter_uniform(seed, Stream::Init, 0, i as u64);
            }
            for i in 0..st.velocities.len() {
                st.velocities[i] =
                    velocity_std * counter_normal(seed, Stream::Init, 1, i as u64);
            }
        }
        InitialLawSpec::Tabulated { density } => {
            density.validate()?;
            if density.k != 1 || density.d != d {
                return Err(Error::InvalidConfig(
                    "tabulated initial law must be an order-1 density of matching dimension"
                        .into(),
                ));
            }
            if density.v_bins > 0 && matches!(config.order, Order::First) {
                return Err(Error::InvalidConfig(
                    "first-order mode takes a spatial-only initial density".into(),
                ));
            }
            let weights: Vec<f64> = density.values.clone();
            let total: f64 = weights.iter().sum();
            if total <= 0.0 {
                return Err(Error::InvalidConfig("initial density has no mass".into()));
            }
            let use_v = density.v_bins > 0 && matches!(config.order, Order::Second);
            for i in 0..n {
                let u = counter_uniform(seed, Stream::Init, 2, i as u64) * total;
                let mut acc = 0.0;
                let mut cell = weights.len() - 1;
                for (c, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        cell = c;
                        break;
                    }
                }
                // Decode the cell digits: d position axes then d velocity axes.
                let mut rem = cell;
                let mut vdig = vec![0usize; d];
                if density.v_bins > 0 {
                    for a in (0..d).rev() {
                        vdig[a] = rem % density.v_bins;
                        rem /= density.v_bins;
                    }
                }
                let mut xdig = vec![0usize; d];
                for a in (0..d).rev() {
                    xdig[a] = rem % density.x_bins;
                    rem /= density.x_bins;
                }
                for a in 0..d {
                    let j = counter_uniform(seed, Stream::Init, 3, (i * d + a) as u64);
                    st.positions[i * d + a] = (xdig[a] as f64 + j) / density.x_bins as f64;
                }
                if use_v {
                    let dv = 2.0 * density.v_max / density.v_bins as f64;
                    for a in 0..d {
                        let j = counter_uniform(seed, Stream::Init, 4, (i * d + a) as u64);
                        st.velocities[i * d + a] =
                            -density.v_max + (vdig[a] as f64 + j) * dv;
                    }
                } else if matches!(config.order, Order::Second) {
                    // Spatial-only table with a kinetic simulation: start at
                    // rest.
                }
            }
        }
    }
    Ok(st)
}

fn record_step(step: u64, stride: usize, last: u64) -> bool {
    step % stride as u64 == 0 || step == last
}

fn evolve_replica(
    mut st: ParticleState,
    config: &SimConfig,
    kernel: &CompiledKernel,
    replica: usize,
    until_step: u64,
) -> Result<Vec<ParticleState>> {
    let mut out = Vec::new();
    if st.step_index == 0 {
        out.push(st.clone());
    }
    while st.step_index < until_step {
        step_replica(&mut st, config, kernel, replica)?;
        if record_step(st.step_index, config.snapshot_stride, until_step) {
            out.push(st.clone());
        }
    }
    Ok(out)
}

/// Run R replicas of the configured dynamics, snapshotting every
/// `snapshot_stride` steps (plus the initial and final states).
pub fn run_ensemble(
    config: &SimConfig,
    replicas: usize,
    law: &InitialLawSpec,
) -> Result<EnsembleDataset> {
    config.validate()?;
    if replicas == 0 {
        return Err(Error::InvalidConfig("need at least one replica".into()));
    }
    let kernel = CompiledKernel::new(&config.kernel)?;
    let last = config.n_steps();
    let states: Vec<Result<Vec<ParticleState>>> = (0..replicas)
        .into_par_iter()
        .map(|r| evolve_replica(init_state(config, law, r)?, config, &kernel, r, last))
        .collect();
    let mut snapshots = Vec::with_capacity(replicas);
    for s in states {
        snapshots.push(s?);
    }
    let snapshot_times = snapshots[0].iter().map(|s| s.time).collect();
    Ok(EnsembleDataset {
        config: config.clone(),
        replica_count: replicas,
        snapshot_times,
        snapshots,
        config_hash: config_hash(config),
    })
}

/// Continue every replica from its last snapshot up to a new end time,
/// appending snapshots. Because the noise is keyed by absolute step index,
/// the continuation is bit-identical to an uninterrupted run.
pub fn extend_ensemble(dataset: &mut EnsembleDataset, new_t_end: f64) -> Result<()> {
    if new_t_end < dataset.config.t_end {
        return Err(Error::InvalidConfig("new end time precedes current one".into()));
    }
    let mut config = dataset.config.clone();
    config.t_end = new_t_end;
    let kernel = CompiledKernel::new(&config.kernel)?;
    let last = config.n_steps();
    let extra: Vec<Result<Vec<ParticleState>>> = dataset
        .snapshots
        .par_iter()
        .enumerate()
        .map(|(r, snaps)| {
            let st = snaps.last().expect("non-empty replica").clone();
            evolve_replica(st, &config, &kernel, r, last)
        })
        .collect();
    for (r, more) in extra.into_iter().enumerate() {
        dataset.snapshots[r].extend(more?);
    }
    dataset.config = config.clone();
    dataset.config_hash = config_hash(&config);
    dataset.snapshot_times = dataset.snapshots[0].iter().map(|s| s.time).collect();
    Ok(())
}

fn replica_tensor(config: &SimConfig, snaps: &[ParticleState]) -> Tensor {
    let n = config.n_particles;
    let d = config.dim;
    let vlen = snaps[0].velocities.len();
    let width = n * d + vlen;
    let mut data = Vec::with_capacity(snaps.len() * width);
    for s in snaps {
        data.extend_from_slice(&s.positions);
        data.extend_from_slice(&s.velocities);
    }
    let meta = json!({
        "times": snaps.iter().map(|s| s.time).collect::<Vec<_>>(),
        "steps": snaps.iter().map(|s| s.step_index).collect::<Vec<_>>(),
        "seed": snaps[0].seed,
    });
    Tensor::new(vec![snaps.len(), width], data, meta).expect("consistent shape")
}

/// Write the dataset as a directory: `config.json`, `snapshots/replica_r.bin`
/// tensors, and `manifest.json` with content hashes.
pub fn checkpoint(dataset: &EnsembleDataset, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir.join("snapshots"))?;
    std::fs::write(
        dir.join("config.json"),
        serde_json::to_vec_pretty(&dataset.config)?,
    )?;
    let mut files = BTreeMap::new();
    for r in 0..dataset.replica_count {
        let tensor = replica_tensor(&dataset.config, &dataset.snapshots[r]);
        let name = format!("replica_{r}.bin");
        let mut buf = Vec::new();
        tensor_io::write_tensor(&mut buf, &tensor)?;
        let mut h = Sha256::new();
        h.update(&buf);
        files.insert(name.clone(), hex(&h.finalize()));
        std::fs::write(dir.join("snapshots").join(name), buf)?;
    }
    let manifest = json!({
        "config_hash": dataset.config_hash,
        "replica_count": dataset.replica_count,
        "base_seed": dataset.config.seed,
        "snapshot_times": dataset.snapshot_times,
        "files": files,
    });
    std::fs::write(dir.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
    Ok(())
}

pub fn restore(dir: &Path) -> Result<EnsembleDataset> {
    let config: SimConfig =
        serde_json::from_slice(&std::fs::read(dir.join("config.json"))?)?;
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("manifest.json"))?)?;
    let corrupt = |reason: &str| Error::CorruptCheckpoint {
        reason: reason.into(),
    };
    if manifest["config_hash"].as_str() != Some(config_hash(&config).as_str()) {
        return Err(corrupt("config hash mismatch"));
    }
    let replica_count = manifest["replica_count"]
        .as_u64()
        .ok_or_else(|| corrupt("missing replica count"))? as usize;
    let files = manifest["files"]
        .as_object()
        .ok_or_else(|| corrupt("missing file table"))?;

    let n = config.n_particles;
    let d = config.dim;
    let mut snapshots = Vec::with_capacity(replica_count);
    for r in 0..replica_count {
        let name = format!("replica_{r}.bin");
        let bytes = std::fs::read(dir.join("snapshots").join(&name))?;
        let want = files
            .get(&name)
            .and_then(|v| v.as_str())
            .ok_or_else(|| corrupt("replica missing from manifest"))?;
        let mut h = Sha256::new();
        h.update(&bytes);
        if hex(&h.finalize()) != want {
            return Err(corrupt("replica hash mismatch"));
        }
        let tensor = tensor_io::read_tensor(&bytes[..])?;
        let [rows, width] = tensor.header.shape[..] else {
            return Err(corrupt("replica tensor must be 2d"));
        };
        let has_v = width == 2 * n * d;
        if !has_v && width != n * d {
            return Err(corrupt("replica tensor width inconsistent with config"));
        }
        let times: Vec<f64> =
            serde_json::from_value(tensor.header.metadata["times"].clone())
                .map_err(|_| corrupt("missing snapshot times"))?;
        let steps: Vec<u64> =
            serde_json::from_value(tensor.header.metadata["steps"].clone())
                .map_err(|_| corrupt("missing snapshot steps"))?;
        if times.len() != rows || steps.len() != rows {
            return Err(corrupt("metadata length mismatch"));
        }
        let seed = replica_seed(config.seed, r);
        let mut snaps = Vec::with_capacity(rows);
        for t in 0..rows {
            let row = &tensor.data[t * width..(t + 1) * width];
            snaps.push(ParticleState {
                n,
                dim: d,
                positions: row[..n * d].to_vec(),
                velocities: if has_v { row[n * d..].to_vec() } else { Vec::new() },
                time: times[t],
                step_index: steps[t],
                seed,
            });
        }
        snapshots.push(snaps);
    }
    let snapshot_times: Vec<f64> =
        serde_json::from_value(manifest["snapshot_times"].clone())
            .map_err(|_| corrupt("missing snapshot times"))?;
    Ok(EnsembleDataset {
        config_hash: config_hash(&config),
        config,
        replica_count,
        snapshot_times,
        snapshots,
    })
}
