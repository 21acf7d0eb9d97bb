//! Histogram estimates of k-particle marginals and the weighted functionals
//! built on them: energy-weighted L^q norms, Gaussian velocity moments, the
//! discrete convolution-regularization inequality, and grid distances between
//! an empirical marginal and a reference density.

use crate::ensemble::EnsembleDataset;
use crate::error::{Error, Result};
use crate::kernel::CompiledKernel;
use crate::torus::min_image_coord;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalGridSpec {
    pub x_bins: usize,
    /// 0 requests a spatial-only histogram (no velocity axes).
    pub v_bins: usize,
    pub v_max: f64,
}

/// Density on the k-fold phase-space (or position-space) grid. Values are
/// per-volume densities; `values.len() = (x_bins^d * v_bins^d)^k` with the
/// velocity factor dropped when `v_bins = 0`. Axis order per slot is the d
/// position axes then the d velocity axes, slot 1 most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity {
    pub k: usize,
    pub d: usize,
    pub x_bins: usize,
    pub v_bins: usize,
    pub v_max: f64,
    pub values: Vec<f64>,
    /// Fraction of samples outside the velocity box, zero for analytic grids.
    pub truncation_mass: f64,
    /// Coefficient of the pair-potential term in the energy weight: 1/N for
    /// an N-particle empirical marginal, 0 for tensorized limits.
    pub pair_weight: f64,
    pub time: f64,
}

impl GridDensity {
    pub fn slot_cells(&self) -> usize {
        let v = if self.v_bins == 0 { 1 } else { self.v_bins };
        self.x_bins.pow(self.d as u32) * v.pow(self.d as u32)
    }

    pub fn len(&self) -> usize {
        self.slot_cells().pow(self.k as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cell_volume(&self) -> f64 {
        let dx = 1.0 / self.x_bins as f64;
        let mut vol = dx.powi((self.d * self.k) as i32);
        if self.v_bins > 0 {
            let dv = 2.0 * self.v_max / self.v_bins as f64;
            vol *= dv.powi((self.d * self.k) as i32);
        }
        vol
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > 2 {
            return Err(Error::InvalidConfig("marginal order k must be 1 or 2".into()));
        }
        if self.values.len() != self.len() {
            return Err(Error::GridMismatch {
                reason: format!(
                    "values length {} does not match grid size {}",
                    self.values.len(),
                    self.len()
                ),
            });
        }
        if self.values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidConfig(
                "density values must be nonnegative and finite".into(),
            ));
        }
        Ok(())
    }

    /// Position-cell index (most significant digits) of a slot-cell index.
    fn slot_x_index(&self, slot_cell: usize) -> usize {
        let v = if self.v_bins == 0 { 1 } else { self.v_bins };
        slot_cell / v.pow(self.d as u32)
    }

    /// Center coordinates of a position-cell index.
    fn x_center(&self, mut x_cell: usize, out: &mut [f64]) {
        for a in (0..self.d).rev() {
            out[a] = (x_cell % self.x_bins) as f64 / self.x_bins as f64
                + 0.5 / self.x_bins as f64;
            x_cell /= self.x_bins;
        }
    }

    /// `sum_a v_a^2` at the center of a slot cell.
    fn slot_v_sq(&self, slot_cell: usize) -> f64 {
        if self.v_bins == 0 {
            return 0.0;
        }
        let mut rem = slot_cell % self.v_bins.pow(self.d as u32);
        let dv = 2.0 * self.v_max / self.v_bins as f64;
        let mut s = 0.0;
        for _ in 0..self.d {
            let c = rem % self.v_bins;
            rem /= self.v_bins;
            let v = -self.v_max + (c as f64 + 0.5) * dv;
            s += v * v;
        }
        s
    }

    fn same_grid(&self, other: &GridDensity) -> Result<()> {
        if self.k != other.k
            || self.d != other.d
            || self.x_bins != other.x_bins
            || self.v_bins != other.v_bins
            || (self.v_bins > 0 && (self.v_max - other.v_max).abs() > 1e-12)
        {
            return Err(Error::GridMismatch {
                reason: "densities live on different grids".into(),
            });
        }
        Ok(())
    }
}

fn check_resolution(spec: &MarginalGridSpec) -> Result<()> {
    if spec.x_bins < 4 {
        return Err(Error::GridTooCoarse {
            axis: "x".into(),
            bins: spec.x_bins,
        });
    }
    if spec.v_bins > 0 && spec.v_bins < 4 {
        return Err(Error::GridTooCoarse {
            axis: "v".into(),
            bins: spec.v_bins,
        });
    }
    if spec.v_bins > 0 && spec.v_max <= 0.0 {
        return Err(Error::InvalidConfig("v_max must be positive".into()));
    }
    Ok(())
}

/// Deterministic family of ordered k=2 index tuples: all N(N-1) ordered pairs
/// when that count is at most the budget, otherwise pairs `(i, i+g mod N)` for
/// strides `g = 1..=G` with `G = budget / N`. Every index appears equally
/// often in each slot, which makes the slot-2 marginalization of the pair
/// histogram agree with the k=1 histogram.
pub fn pair_tuples(n: usize, budget: usize) -> Vec<(usize, usize)> {
    if n * (n - 1) <= budget {
        let mut out = Vec::with_capacity(n * (n - 1));
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    out.push((i, j));
                }
            }
        }
        out
    } else {
        let g_max = (budget / n).clamp(1, n - 1);
        let mut out = Vec::with_capacity(n * g_max);
        for g in 1..=g_max {
            for i in 0..n {
                out.push((i, (i + g) % n));
            }
        }
        out
    }
}

pub const PAIR_SAMPLE_BUDGET: usize = 4096;

/// Histogram estimate of the order-k marginal at one snapshot time, pooling
/// all replicas and, for k=2, a deterministic family of ordered index pairs.
pub fn estimate_marginal(
    dataset: &EnsembleDataset,
    k: usize,
    time: f64,
    spec: &MarginalGridSpec,
) -> Result<GridDensity> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidConfig("marginal order k must be 1 or 2".into()));
    }
    check_resolution(spec)?;
    let t_idx = dataset
        .snapshot_times
        .iter()
        .position(|t| (t - time).abs() < 1e-9)
        .ok_or_else(|| Error::MissingData(format!("no snapshot at t={time}")))?;

    let d = dataset.config.dim;
    let n = dataset.config.n_particles;
    let use_v = spec.v_bins > 0;

    let mut grid = GridDensity {
        k,
        d,
        x_bins: spec.x_bins,
        v_bins: spec.v_bins,
        v_max: spec.v_max,
        values: Vec::new(),
        truncation_mass: 0.0,
        pair_weight: 1.0 / n as f64,
        time,
    };
    let cells = grid.len();

    let tuples = if k == 2 {
        pair_tuples(n, PAIR_SAMPLE_BUDGET)
    } else {
        Vec::new()
    };

    // One coordinate: cell index in 0..bins, or None if out of range.
    let bin_x = |x: f64| -> usize {
        // positions are wrapped to [0,1) already
        ((x * spec.x_bins as f64) as usize).min(spec.x_bins - 1)
    };
    let bin_v = |v: f64| -> Option<usize> {
        let u = (v + spec.v_max) / (2.0 * spec.v_max) * spec.v_bins as f64;
        if u < 0.0 || u >= spec.v_bins as f64 {
            None
        } else {
            Some(u as usize)
        }
    };
    let slot_index = |st: &crate::sim::ParticleState, i: usize| -> Option<usize> {
        let mut idx = 0usize;
        for a in 0..d {
            idx = idx * spec.x_bins + bin_x(st.positions[i * d + a]);
        }
        if use_v {
            for a in 0..d {
                idx = idx * spec.v_bins + bin_v(st.velocities[i * d + a])?;
            }
        }
        Some(idx)
    };

    // Integer counts per replica, merged by element-wise addition: exact, so
    // the result cannot depend on the parallel partitioning.
    let slot_cells = grid.slot_cells();
    let (counts, truncated, total) = (0..dataset.replica_count)
        .into_par_iter()
        .map(|r| {
            let st = &dataset.snapshots[r][t_idx];
            let mut counts = vec![0u64; cells];
            let mut truncated = 0u64;
            let mut total = 0u64;
            if k == 1 {
                for i in 0..n {
                    total += 1;
                    match slot_index(st, i) {
                        Some(c) => counts[c] += 1,
                        None => truncated += 1,
                    }
                }
            } else {
                for &(i, j) in &tuples {
                    total += 1;
                    match (slot_index(st, i), slot_index(st, j)) {
                        (Some(ci), Some(cj)) => counts[ci * slot_cells + cj] += 1,
                        _ => truncated += 1,
                    }
                }
            }
            (counts, truncated, total)
        })
        .reduce(
            || (vec![0u64; cells], 0u64, 0u64),
            |(mut ca, ta, na), (cb, tb, nb)| {
                for (a, b) in ca.iter_mut().zip(cb) {
                    *a += b;
                }
                (ca, ta + tb, na + nb)
            },
        );

    let vol = grid.cell_volume();
    let norm = 1.0 / (total as f64 * vol);
    grid.values = counts.into_iter().map(|c| c as f64 * norm).collect();
    grid.truncation_mass = truncated as f64 / total as f64;
    Ok(grid)
}

/// Sum out the last slot of an order-2 density, returning the order-1 density
/// (normalized by the remaining mass convention: plain integration).
pub fn marginalize_slot2(f: &GridDensity) -> Result<GridDensity> {
    if f.k != 2 {
        return Err(Error::InvalidConfig("marginalize_slot2 needs k=2".into()));
    }
    let sc = f.slot_cells();
    let slot_vol = f.cell_volume().sqrt();
    let mut values = vec![0.0; sc];
    for c1 in 0..sc {
        let mut s = 0.0;
        for c2 in 0..sc {
            s += f.values[c1 * sc + c2];
        }
        values[c1] = s * slot_vol;
    }
    Ok(GridDensity {
        k: 1,
        values,
        ..f.clone()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormReport {
    pub q: f64,
    pub lambda: f64,
    /// Estimate of `int |f|^q e^{lambda e_k}` on the truncated grid.
    pub value: f64,
    /// Estimate of `int e^{lambda sum |v_i|^2} f`.
    pub gaussian_moment: f64,
    pub truncation_mass: f64,
}

/// Pair-potential lookup table between position cells of a grid.
fn pair_potential_table(f: &GridDensity, kernel: &CompiledKernel) -> Vec<f64> {
    let nx = f.x_bins.pow(f.d as u32);
    let mut table = vec![0.0; nx * nx];
    let mut c1 = vec![0.0; f.d];
    let mut c2 = vec![0.0; f.d];
    let mut disp = vec![0.0; f.d];
    for i in 0..nx {
        f.x_center(i, &mut c1);
        for j in 0..nx {
            f.x_center(j, &mut c2);
            for a in 0..f.d {
                disp[a] = min_image_coord(c1[a] - c2[a]);
            }
            table[i * nx + j] = kernel.potential(&disp);
        }
    }
    table
}

/// Midpoint quadrature of `g(f) e^{lambda e_k}` over the grid, with
/// `e_k = sum_i (1 + |v_i|^2) + pair_weight * sum_{i != j} phi(x_i - x_j)`
/// at cell centers. `g` is applied to each stored value.
fn weighted_integral(
    f: &GridDensity,
    vals: &[f64],
    g: impl Fn(f64) -> f64 + Sync,
    lambda: f64,
    kernel: &CompiledKernel,
) -> Result<f64> {
    let sc = f.slot_cells();
    let slot_e: Vec<f64> = (0..sc).map(|c| 1.0 + f.slot_v_sq(c)).collect();
    let vol = f.cell_volume();

    let accumulate = |value: f64, e: f64| -> Result<f64> {
        let w = (lambda * e).exp();
        if !w.is_finite() && g(value) != 0.0 {
            return Err(Error::WeightOverflow {
                exponent: lambda * e,
            });
        }
        Ok(g(value) * w)
    };

    let total = if f.k == 1 {
        let mut s = 0.0;
        for (c, &v) in vals.iter().enumerate() {
            s += accumulate(v, slot_e[c])?;
        }
        s
    } else {
        let phi = pair_potential_table(f, kernel);
        let nx = f.x_bins.pow(f.d as u32);
        let rows: Vec<Result<f64>> = (0..sc)
            .into_par_iter()
            .map(|c1| {
                let x1 = f.slot_x_index(c1);
                let mut s = 0.0;
                for c2 in 0..sc {
                    let x2 = f.slot_x_index(c2);
                    let e = slot_e[c1]
                        + slot_e[c2]
                        + f.pair_weight * 2.0 * phi[x1 * nx + x2];
                    s += accumulate(vals[c1 * sc + c2], e)?;
                }
                Ok(s)
            })
            .collect();
        let mut s = 0.0;
        for row in rows {
            s += row?;
        }
        s
    };
    Ok(total * vol)
}

/// Energy-weighted L^q functional `int |f|^q e^{lambda e_k}` by midpoint
/// quadrature; the k=1 weight carries no pair term because the potential
/// vanishes at zero displacement.
pub fn weighted_lq_norm(
    f: &GridDensity,
    q: f64,
    lambda: f64,
    kernel: &CompiledKernel,
) -> Result<WeightedNormReport> {
    f.validate()?;
    if q < 1.0 || lambda < 0.0 {
        return Err(Error::InvalidConfig("need q >= 1 and lambda >= 0".into()));
    }
    let value = weighted_integral(f, &f.values, |v| v.powf(q), lambda, kernel)?;
    let gaussian_moment = gaussian_moment(f, lambda)?;
    Ok(WeightedNormReport {
        q,
        lambda,
        value,
        gaussian_moment,
        truncation_mass: f.truncation_mass,
    })
}

/// `int e^{beta sum_i |v_i|^2} f` by midpoint quadrature; equals the mass for
/// `beta = 0` or for spatial-only grids.
pub fn gaussian_moment(f: &GridDensity, beta: f64) -> Result<f64> {
    f.validate()?;
    let sc = f.slot_cells();
    let vol = f.cell_volume();
    let slot_w: Vec<f64> = (0..sc).map(|c| (beta * f.slot_v_sq(c)).exp()).collect();
    let mut s = 0.0;
    if f.k == 1 {
        for (c, &v) in f.values.iter().enumerate() {
            if !slot_w[c].is_finite() && v != 0.0 {
                return Err(Error::WeightOverflow {
                    exponent: beta * f.slot_v_sq(c),
                });
            }
            s += v * slot_w[c];
        }
    } else {
        for c1 in 0..sc {
            for c2 in 0..sc {
                let w = slot_w[c1] * slot_w[c2];
                let v = f.values[c1 * sc + c2];
                if !w.is_finite() && v != 0.0 {
                    return Err(Error::WeightOverflow {
                        exponent: beta * (f.slot_v_sq(c1) + f.slot_v_sq(c2)),
                    });
                }
                s += v * w;
            }
        }
    }
    Ok(s * vol)
}

/// `|K|` sampled at the grid displacements `m/n` (min-image), indexed like a
/// position-cell index, for use in [`holder_check`].
pub fn kernel_magnitude_grid(kernel: &CompiledKernel, n: usize) -> Vec<f64> {
    let d = kernel.dim();
    let cells = n.pow(d as u32);
    let mut out = vec![0.0; cells];
    let mut disp = vec![0.0; d];
    let mut force = vec![0.0; d];
    for c in 0..cells {
        let mut rem = c;
        for a in (0..d).rev() {
            disp[a] = min_image_coord((rem % n) as f64 / n as f64);
            rem /= n;
        }
        kernel.force(&disp, &mut force);
        out[c] = force.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Discrete check of the convolution regularization inequality on spatial
/// grids with normalized counting measure:
/// `|| int K(x_1 - y) f(x_1..x_k, y) dy ||_{L^q} <= ||K||_{L^p} ||f||_{L^q}`
/// for `1/p + 1/q <= 1`. `p = None` means the max norm. All norms use the
/// same grid, so the inequality is exact up to round-off.
pub fn holder_check(
    kernel_grid: &[f64],
    f: &GridDensity,
    p: Option<f64>,
    q: f64,
) -> Result<HolderReport> {
    f.validate()?;
    if f.v_bins != 0 {
        return Err(Error::InvalidConfig(
            "regularization check runs on spatial-only grids".into(),
        ));
    }
    if let Some(p) = p {
        let sum = 1.0 / p + 1.0 / q;
        if sum > 1.0 + 1e-12 {
            return Err(Error::ExponentViolation { sum });
        }
    }
    let n = f.x_bins;
    let d = f.d;
    let nx = n.pow(d as u32);
    if kernel_grid.len() != nx {
        return Err(Error::GridMismatch {
            reason: format!("kernel grid has {} cells, expected {nx}", kernel_grid.len()),
        });
    }
    let hvol = 1.0 / nx as f64;

    // f has k+1 slots; convolve slot x_1 against the last slot.
    let k_order = f.k - 1;
    if k_order == 0 {
        return Err(Error::InvalidConfig("density must have order k+1 >= 2".into()));
    }
    let lead = nx.pow(k_order as u32);

    // Displacement cell index of x_1-cell i minus y-cell j, wrapped per axis.
    let disp_index = |mut i: usize, mut j: usize| -> usize {
        let mut idx = 0;
        let mut axes = vec![0usize; d];
        for a in (0..d).rev() {
            let di = i % n;
            let dj = j % n;
            axes[a] = (di + n - dj) % n;
            i /= n;
            j /= n;
        }
        for a in 0..d {
            idx = idx * n + axes[a];
        }
        idx
    };

    let mut lhs_q = 0.0;
    for cells in 0..lead {
        let x1 = cells / nx.pow((k_order - 1) as u32);
        let mut g = 0.0;
        for y in 0..nx {
            g += kernel_grid[disp_index(x1, y)] * f.values[cells * nx + y];
        }
        g *= hvol;
        lhs_q += g.abs().powf(q);
    }
    let lhs = (lhs_q * hvol.powi(k_order as i32)).powf(1.0 / q);

    let k_norm = match p {
        Some(p) => (kernel_grid.iter().map(|v| v.abs().powf(p)).sum::<f64>() * hvol)
            .powf(1.0 / p),
        None => kernel_grid.iter().cloned().fold(0.0, f64::max),
    };
    let f_norm = (f
        .values
        .iter()
        .map(|v| v.abs().powf(q))
        .sum::<f64>()
        * hvol.powi((k_order + 1) as i32))
    .powf(1.0 / q);
    let rhs = k_norm * f_norm;
    Ok(HolderReport {
        lhs,
        rhs,
        satisfied: lhs <= rhs * (1.0 + 1e-9),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaosDistance {
    pub l1: f64,
    pub lq: f64,
    pub weighted_lq: f64,
}

/// Grid distances between two densities on the same grid: L^1, L^q, and the
/// e_k-weighted L^q distance (weight uses the empirical density's pair
/// coefficient).
pub fn chaos_distance(
    empirical: &GridDensity,
    reference: &GridDensity,
    q: f64,
    lambda: f64,
    kernel: &CompiledKernel,
) -> Result<ChaosDistance> {
    empirical.validate()?;
    reference.validate()?;
    empirical.same_grid(reference)?;
    let vol = empirical.cell_volume();
    let diff: Vec<f64> = empirical
        .values
        .iter()
        .zip(&reference.values)
        .map(|(a, b)| a - b)
        .collect();
    let l1 = diff.iter().map(|v| v.abs()).sum::<f64>() * vol;
    let lq = (diff.iter().map(|v| v.abs().powf(q)).sum::<f64>() * vol).powf(1.0 / q);
    let weighted =
        weighted_integral(empirical, &diff, |v| v.abs().powf(q), lambda, kernel)?;
    Ok(ChaosDistance {
        l1,
        lq,
        weighted_lq: weighted.powf(1.0 / q),
    })
}
