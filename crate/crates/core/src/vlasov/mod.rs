//! Deterministic solvers for the limiting equations: the kinetic
//! transport-diffusion equation in one space dimension (2D phase space) and
//! the first-order drift-diffusion equation in one or two dimensions.
//!
//! Position samples sit at cell centers `(j + 1/2)/n`, matching the histogram
//! grids of the marginal estimators, so solver output can be compared to
//! empirical marginals cell by cell.

mod fftutil;
mod spline;

pub use spline::Spline;

use crate::error::{Error, Result};
use crate::kernel::{eval_force, KernelFamily, KernelSpec};
use crate::marginal::GridDensity;
use crate::torus::min_image_coord;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid1D {
    pub nx: usize,
    pub nv: usize,
    pub v_max: f64,
    /// Density samples, x-major: `f[j * nv + l]` at `x = (j+1/2)/nx`,
    /// `v = -v_max + (l+1/2) dv`.
    pub f: Vec<f64>,
    pub time: f64,
}

impl PhaseGrid1D {
    pub fn dx(&self) -> f64 {
        1.0 / self.nx as f64
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.v_max / self.nv as f64
    }

    pub fn x_center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.nx as f64
    }

    pub fn v_center(&self, l: usize) -> f64 {
        -self.v_max + (l as f64 + 0.5) * self.dv()
    }

    pub fn mass(&self) -> f64 {
        self.f.iter().sum::<f64>() * self.dx() * self.dv()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.nx.is_power_of_two() || !self.nv.is_power_of_two() || self.nx < 8 || self.nv < 8
        {
            return Err(Error::InvalidConfig(
                "phase grid sizes must be powers of two, at least 8".into(),
            ));
        }
        if self.v_max <= 0.0 || self.f.len() != self.nx * self.nv {
            return Err(Error::InvalidConfig("inconsistent phase grid".into()));
        }
        if self.f.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite phase grid values".into()));
        }
        Ok(())
    }

    /// Product data `amp(x) * gaussian(v; s)`, normalized when `x_profile`
    /// averages to 1. `perturbation` is the cosine amplitude on mode 1.
    pub fn cosine_gaussian(nx: usize, nv: usize, v_max: f64, perturbation: f64, s: f64) -> Self {
        let mut g = PhaseGrid1D {
            nx,
            nv,
            v_max,
            f: vec![0.0; nx * nv],
            time: 0.0,
        };
        let norm = 1.0 / (s * (2.0 * PI).sqrt());
        for j in 0..nx {
            let x = g.x_center(j);
            let ax = 1.0 + perturbation * (2.0 * PI * x).cos();
            for l in 0..nv {
                let v = g.v_center(l);
                g.f[j * nv + l] = ax * norm * (-v * v / (2.0 * s * s)).exp();
            }
        }
        g
    }

    /// Spatial density `rho(x) = int f dv`.
    pub fn spatial_density(&self) -> Vec<f64> {
        let dv = self.dv();
        (0..self.nx)
            .map(|j| self.f[j * self.nv..(j + 1) * self.nv].iter().sum::<f64>() * dv)
            .collect()
    }

    /// Coarsen by cell averaging; factors must divide the grid sizes.
    pub fn restrict(&self, fx: usize, fv: usize) -> Result<PhaseGrid1D> {
        if fx == 0 || fv == 0 || self.nx % fx != 0 || self.nv % fv != 0 {
            return Err(Error::GridMismatch {
                reason: "restriction factors must divide the grid".into(),
            });
        }
        let nx = self.nx / fx;
        let nv = self.nv / fv;
        let mut f = vec![0.0; nx * nv];
        for j in 0..self.nx {
            for l in 0..self.nv {
                f[(j / fx) * nv + l / fv] += self.f[j * self.nv + l];
            }
        }
        let scale = 1.0 / (fx * fv) as f64;
        for v in &mut f {
            *v *= scale;
        }
        Ok(PhaseGrid1D {
            nx,
            nv,
            v_max: self.v_max,
            f,
            time: self.time,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub n: usize,
    pub d: usize,
    /// Density samples at cell centers, row-major for d=2.
    pub f: Vec<f64>,
    pub time: f64,
}

impl SpatialGrid {
    pub fn cells(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn mass(&self) -> f64 {
        self.f.iter().sum::<f64>() / self.cells() as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 8 || !(1..=2).contains(&self.d) {
            return Err(Error::InvalidConfig(
                "spatial grid needs power-of-two n >= 8 and d in {1,2}".into(),
            ));
        }
        if self.f.len() != self.cells() || self.f.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("inconsistent spatial grid".into()));
        }
        Ok(())
    }

    pub fn cosine(n: usize, d: usize, perturbation: f64) -> Self {
        let cells = n.pow(d as u32);
        let mut f = vec![0.0; cells];
        for (c, v) in f.iter_mut().enumerate() {
            let j = c / n.pow((d - 1) as u32);
            let x = (j as f64 + 0.5) / n as f64;
            *v = 1.0 + perturbation * (2.0 * PI * x).cos();
        }
        SpatialGrid {
            n,
            d,
            f,
            time: 0.0,
        }
    }
}

/// Convolution field `K * rho` on the spatial grid, one d-vector per cell
/// (interleaved components). Spectral: the singular coulomb family uses the
/// exact Poisson symbol, other families the transform of the sampled kernel.
pub fn field_from_density(rho: &[f64], n: usize, d: usize, kernel: &KernelSpec) -> Result<Vec<f64>> {
    kernel.validate()?;
    let cells = n.pow(d as u32);
    if rho.len() != cells {
        return Err(Error::GridMismatch {
            reason: format!("density has {} cells, expected {cells}", rho.len()),
        });
    }
    if matches!(kernel.family, KernelFamily::Zero) {
        return Ok(vec![0.0; cells * d]);
    }

    let rho_hat = fftutil::forward(rho, n, d);
    let symbols = kernel_symbols(kernel, n, d)?;
    let mut out = vec![0.0; cells * d];
    for (a, sym) in symbols.iter().enumerate() {
        let prod: Vec<Complex<f64>> = rho_hat
            .iter()
            .zip(sym)
            .map(|(r, s)| r * s)
            .collect();
        let comp = fftutil::inverse_real(prod, n, d);
        for c in 0..cells {
            out[c * d + a] = comp[c];
        }
    }
    Ok(out)
}

/// Per-axis Fourier symbols `K_hat_a(k)` such that the field is
/// `IDFT(symbol * DFT(rho))`.
fn kernel_symbols(kernel: &KernelSpec, n: usize, d: usize) -> Result<Vec<Vec<Complex<f64>>>> {
    let cells = n.pow(d as u32);
    let mut symbols = vec![vec![Complex::new(0.0, 0.0); cells]; d];
    match kernel.family {
        KernelFamily::Coulomb => {
            // phi_hat(k) = c_d / (4 pi^2 |k|^2): the periodized fundamental
            // solution scaled by the family's conventional prefactor.
            let c_d = match d {
                1 => 2.0 * kernel.strength,
                2 => 2.0 * PI * kernel.strength,
                _ => 4.0 * PI * kernel.strength,
            };
            for c in 0..cells {
                let mut rem = c;
                let mut freqs = [0i64; 2];
                for a in (0..d).rev() {
                    freqs[a] = fftutil::signed_freq(rem % n, n);
                    rem /= n;
                }
                let k2: f64 = freqs[..d].iter().map(|&k| (k * k) as f64).sum();
                if k2 == 0.0 || freqs[..d].iter().any(|&k| 2 * k == n as i64) {
                    continue;
                }
                let phi_hat = c_d / (4.0 * PI * PI * k2);
                for a in 0..d {
                    symbols[a][c] = Complex::new(0.0, -2.0 * PI * freqs[a] as f64) * phi_hat;
                }
            }
        }
        _ => {
            // Sample K at the displacement nodes m/n and transform; the
            // symbol is DFT(K)/cells so that multiplication implements the
            // volume-weighted circular convolution.
            let mut disp = vec![0.0; d];
            for a in 0..d {
                let mut samples = vec![0.0; cells];
                for (c, s) in samples.iter_mut().enumerate() {
                    let mut rem = c;
                    for ax in (0..d).rev() {
                        disp[ax] = min_image_coord((rem % n) as f64 / n as f64);
                        rem /= n;
                    }
                    *s = eval_force(kernel, &disp)?[a];
                }
                let hat = fftutil::forward(&samples, n, d);
                for (sym, h) in symbols[a].iter_mut().zip(hat) {
                    *sym = h / cells as f64;
                }
            }
        }
    }
    Ok(symbols)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub mass_initial: f64,
    pub mass_final: f64,
    /// Unnormalized drift; never corrected.
    pub mass_drift: f64,
    pub min_value: f64,
    pub max_value: f64,
    /// Set when min f dips below -1e-6 * max f at any step.
    pub negative_overshoot: bool,
    pub steps: u64,
}

/// Kinetic solve by Strang splitting: half x-transport, full field-driven
/// v-transport, full Crank-Nicolson v-diffusion with zero-flux walls, half
/// x-transport. Transport steps are semi-Lagrangian with cubic splines.
pub fn solve_vpfp_1d(
    f0: &PhaseGrid1D,
    kernel: &KernelSpec,
    sigma: f64,
    t_end: f64,
    dt: f64,
) -> Result<(PhaseGrid1D, SolveReport)> {
    f0.validate()?;
    if dt <= 0.0 || t_end <= 0.0 {
        return Err(Error::InvalidConfig("dt and t_end must be positive".into()));
    }
    let dx = f0.dx();
    let dv = f0.dv();
    if f0.v_max * dt > dx * (1.0 + 1e-12) {
        return Err(Error::CflViolation {
            quantity: "max|v| * dt".into(),
            value: f0.v_max * dt,
            limit: dx,
        });
    }

    let mut g = f0.clone();
    let steps = (t_end / dt).round().max(1.0) as u64;
    let mass0 = g.mass();
    let mut min_value = f64::INFINITY;
    let mut max_value = f64::NEG_INFINITY;

    // Crank-Nicolson coefficients for f_t = (sigma^2/2) f_vv, reflecting ends.
    let cn = sigma * sigma * dt / (4.0 * dv * dv);
    let nv = g.nv;
    let sub = vec![-cn; nv];
    let sup = vec![-cn; nv];
    let mut diag = vec![1.0 + 2.0 * cn; nv];
    diag[0] = 1.0 + cn;
    diag[nv - 1] = 1.0 + cn;

    let mut transposed = vec![0.0; g.f.len()];
    for step in 0..steps {
        transport_x(&mut g, &mut transposed, 0.5 * dt);

        // Field-driven v-transport, full step.
        let rho = g.spatial_density();
        let field = field_from_density(&rho, g.nx, 1, kernel)?;
        let max_e = field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max_e * dt > dv * (1.0 + 1e-12) {
            return Err(Error::CflViolation {
                quantity: "max|field| * dt".into(),
                value: max_e * dt,
                limit: dv,
            });
        }
        g.f.par_chunks_mut(nv).enumerate().for_each(|(j, col)| {
            let shift = field[j] * dt / dv;
            let sp = Spline::natural(col, dv);
            let new: Vec<f64> = (0..nv).map(|l| sp.eval(l as f64 - shift)).collect();
            col.copy_from_slice(&new);
        });

        // v-diffusion.
        if sigma > 0.0 {
            g.f.par_chunks_mut(nv).for_each(|col| {
                let mut rhs = vec![0.0; nv];
                for l in 0..nv {
                    let lap = if l == 0 {
                        col[1] - col[0]
                    } else if l == nv - 1 {
                        col[nv - 2] - col[nv - 1]
                    } else {
                        col[l - 1] - 2.0 * col[l] + col[l + 1]
                    };
                    rhs[l] = col[l] + cn * lap;
                }
                spline::solve_tridiagonal(&sub, &diag, &sup, &mut rhs);
                col.copy_from_slice(&rhs);
            });
        }

        transport_x(&mut g, &mut transposed, 0.5 * dt);
        g.time = f0.time + (step + 1) as f64 * dt;
        for &v in &g.f {
            min_value = min_value.min(v);
            max_value = max_value.max(v);
        }
        if g.f.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "solver produced non-finite values at t={}",
                g.time
            )));
        }
    }

    let mass1 = g.mass();
    let report = SolveReport {
        mass_initial: mass0,
        mass_final: mass1,
        mass_drift: mass1 - mass0,
        min_value,
        max_value,
        negative_overshoot: min_value < -1e-6 * max_value.max(0.0),
        steps,
    };
    Ok((g, report))
}

/// Semi-Lagrangian x-shift by `v * tau` for every velocity row.
fn transport_x(g: &mut PhaseGrid1D, transposed: &mut [f64], tau: f64) {
    let (nx, nv) = (g.nx, g.nv);
    let dx = g.dx();
    for j in 0..nx {
        for l in 0..nv {
            transposed[l * nx + j] = g.f[j * nv + l];
        }
    }
    transposed.par_chunks_mut(nx).enumerate().for_each(|(l, row)| {
        let v = -g.v_max + (l as f64 + 0.5) * 2.0 * g.v_max / nv as f64;
        let shift = v * tau / dx;
        let sp = Spline::periodic(row, dx);
        let new: Vec<f64> = (0..nx).map(|j| sp.eval(j as f64 - shift)).collect();
        row.copy_from_slice(&new);
    });
    for j in 0..nx {
        for l in 0..nv {
            g.f[j * nv + l] = transposed[l * nx + j];
        }
    }
}

/// First-order solve: Strang splitting of exact spectral diffusion half steps
/// around a full advection step in conservative (continuity) form, advanced
/// with midpoint RK2 and centered finite-volume fluxes.
pub fn solve_first_order(
    f0: &SpatialGrid,
    kernel: &KernelSpec,
    sigma: f64,
    t_end: f64,
    dt: f64,
) -> Result<(SpatialGrid, SolveReport)> {
    f0.validate()?;
    if dt <= 0.0 || t_end <= 0.0 {
        return Err(Error::InvalidConfig("dt and t_end must be positive".into()));
    }
    let n = f0.n;
    let d = f0.d;
    let h = f0.h();
    let cells = f0.cells();
    let steps = (t_end / dt).round().max(1.0) as u64;
    let mut g = f0.clone();
    let mass0 = g.mass();
    let mut min_value = f64::INFINITY;
    let mut max_value = f64::NEG_INFINITY;

    // Spectral half-step diffusion multipliers.
    let half_mult: Vec<f64> = (0..cells)
        .map(|c| {
            let mut rem = c;
            let mut k2 = 0.0;
            for _ in 0..d {
                let k = fftutil::signed_freq(rem % n, n) as f64;
                k2 += k * k;
                rem /= n;
            }
            (-sigma * sigma * 0.5 * 4.0 * PI * PI * k2 * 0.5 * dt).exp()
        })
        .collect();

    let diffuse_half = |f: &mut Vec<f64>| {
        if sigma == 0.0 {
            return;
        }
        let mut hat = fftutil::forward(f, n, d);
        for (c, m) in hat.iter_mut().zip(&half_mult) {
            *c *= *m;
        }
        *f = fftutil::inverse_real(hat, n, d);
    };

    let advect_rate = |f: &[f64]| -> Result<(Vec<f64>, f64)> {
        let field = field_from_density(f, n, d, kernel)?;
        let max_u = field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut rate = vec![0.0; cells];
        // Centered fluxes per axis; strides in the row-major layout.
        for a in 0..d {
            let stride = n.pow((d - 1 - a) as u32);
            for c in 0..cells {
                // Neighbor in +a direction with wraparound on that axis.
                let axis_pos = (c / stride) % n;
                let up = if axis_pos + 1 == n {
                    c + stride - stride * n
                } else {
                    c + stride
                };
                let flux = 0.25 * (field[c * d + a] + field[up * d + a]) * (f[c] + f[up]);
                rate[c] -= flux / h;
                rate[up] += flux / h;
            }
        }
        Ok((rate, max_u))
    };

    for step in 0..steps {
        diffuse_half(&mut g.f);

        let (r1, max_u) = advect_rate(&g.f)?;
        if max_u * dt > h * (1.0 + 1e-12) {
            return Err(Error::CflViolation {
                quantity: "max|field| * dt".into(),
                value: max_u * dt,
                limit: h,
            });
        }
        let mid: Vec<f64> = g.f.iter().zip(&r1).map(|(f, r)| f + 0.5 * dt * r).collect();
        let (r2, _) = advect_rate(&mid)?;
        for (f, r) in g.f.iter_mut().zip(&r2) {
            *f += dt * r;
        }

        diffuse_half(&mut g.f);
        g.time = f0.time + (step + 1) as f64 * dt;
        for &v in &g.f {
            min_value = min_value.min(v);
            max_value = max_value.max(v);
        }
        if g.f.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "solver produced non-finite values at t={}",
                g.time
            )));
        }
    }

    let mass1 = g.mass();
    let report = SolveReport {
        mass_initial: mass0,
        mass_final: mass1,
        mass_drift: mass1 - mass0,
        min_value,
        max_value,
        negative_overshoot: min_value < -1e-6 * max_value.max(0.0),
        steps,
    };
    Ok((g, report))
}

/// Product density `f^{tensor k}` on the k-fold phase grid; the order-1 case
/// is the identity embedding into the marginal grid type.
pub fn tensorize_phase(g: &PhaseGrid1D, k: usize) -> Result<GridDensity> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidConfig("tensor order must be 1 or 2".into()));
    }
    let sc = g.nx * g.nv;
    let values = match k {
        1 => g.f.clone(),
        _ => {
            let mut v = vec![0.0; sc * sc];
            for c1 in 0..sc {
                for c2 in 0..sc {
                    v[c1 * sc + c2] = g.f[c1] * g.f[c2];
                }
            }
            v
        }
    };
    Ok(GridDensity {
        k,
        d: 1,
        x_bins: g.nx,
        v_bins: g.nv,
        v_max: g.v_max,
        values,
        truncation_mass: 0.0,
        pair_weight: 0.0,
        time: g.time,
    })
}

pub fn tensorize_spatial(g: &SpatialGrid, k: usize) -> Result<GridDensity> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidConfig("tensor order must be 1 or 2".into()));
    }
    let sc = g.cells();
    let values = match k {
        1 => g.f.clone(),
        _ => {
            let mut v = vec![0.0; sc * sc];
            for c1 in 0..sc {
                for c2 in 0..sc {
                    v[c1 * sc + c2] = g.f[c1] * g.f[c2];
                }
            }
            v
        }
    };
    Ok(GridDensity {
        k,
        d: g.d,
        x_bins: g.n,
        v_bins: 0,
        v_max: 1.0,
        values,
        truncation_mass: 0.0,
        pair_weight: 0.0,
        time: g.time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::FourierMode;
    use approx::assert_relative_eq;

    #[test]
    fn field_zero_for_uniform_density() {
        let rho = vec![1.0; 64];
        for spec in [
            KernelSpec::coulomb(1, 1.0),
            KernelSpec::mild_power(1, 0.5, 0.5),
        ] {
            let field = field_from_density(&rho, 64, 1, &spec).unwrap();
            for v in field {
                assert!(v.abs() < 1e-10, "{v}");
            }
        }
    }

    #[test]
    fn field_poisson_single_mode() {
        // rho = 1 + 0.5 cos(2 pi x): field = alpha/(2 pi) sin(2 pi x) * ... ;
        // direct convolution with K = alpha(sign x - 2x) gives
        // 0.5 * alpha/pi * sin(2 pi x).
        let n = 128;
        let alpha = 1.3;
        let rho: Vec<f64> = (0..n)
            .map(|j| 1.0 + 0.5 * (2.0 * PI * (j as f64 + 0.5) / n as f64).cos())
            .collect();
        let field = field_from_density(&rho, n, 1, &KernelSpec::coulomb(1, alpha)).unwrap();
        for j in 0..n {
            let x = (j as f64 + 0.5) / n as f64;
            let want = 0.5 * alpha / PI * (2.0 * PI * x).sin();
            assert_relative_eq!(field[j], want, epsilon = 1e-10);
        }
    }

    #[test]
    fn field_linearity() {
        let n = 32;
        let spec = KernelSpec::mild_power(2, 0.7, 0.8);
        let rho1: Vec<f64> = (0..n * n).map(|c| 1.0 + 0.3 * (c as f64 * 0.1).sin()).collect();
        let rho2: Vec<f64> = (0..n * n).map(|c| 0.5 + 0.2 * (c as f64 * 0.23).cos()).collect();
        let sum: Vec<f64> = rho1.iter().zip(&rho2).map(|(a, b)| a + b).collect();
        let f1 = field_from_density(&rho1, n, 2, &spec).unwrap();
        let f2 = field_from_density(&rho2, n, 2, &spec).unwrap();
        let fs = field_from_density(&sum, n, 2, &spec).unwrap();
        for i in 0..fs.len() {
            assert_relative_eq!(fs[i], f1[i] + f2[i], epsilon = 1e-11);
        }
    }

    #[test]
    fn field_matches_direct_convolution_smooth() {
        // Brute-force circular convolution as the oracle.
        let n = 64;
        let spec = KernelSpec::smooth_fourier(
            1,
            1.0,
            vec![FourierMode {
                wavevector: vec![1],
                amplitude: 0.8,
            }],
        );
        let rho: Vec<f64> = (0..n)
            .map(|j| 1.0 + 0.4 * (4.0 * PI * (j as f64 + 0.5) / n as f64).sin())
            .collect();
        let field = field_from_density(&rho, n, 1, &spec).unwrap();
        for j in 0..n {
            let mut want = 0.0;
            for m in 0..n {
                let disp = min_image_coord((j as f64 - m as f64) / n as f64);
                want += eval_force(&spec, &[disp]).unwrap()[0] * rho[m];
            }
            want /= n as f64;
            assert_relative_eq!(field[j], want, epsilon = 1e-10);
        }
    }

    #[test]
    fn vpfp_free_transport() {
        // K = 0, sigma = 0: f(t,x,v) = f0(x - v t, v).
        let g0 = PhaseGrid1D::cosine_gaussian(128, 128, 2.0, 1.0, 0.4);
        let t = 0.125;
        let dt = 1.0 / 256.0;
        let (g, rep) = solve_vpfp_1d(&g0, &KernelSpec::zero(1), 0.0, t, dt).unwrap();
        assert!(rep.mass_drift.abs() < 1e-10);
        let mut l1 = 0.0;
        for j in 0..g.nx {
            let x = g.x_center(j);
            for l in 0..g.nv {
                let v = g.v_center(l);
                let x0 = (x - v * t).rem_euclid(1.0);
                let exact = (1.0 + (2.0 * PI * x0).cos())
                    * (-v * v / (2.0 * 0.4 * 0.4)).exp()
                    / (0.4 * (2.0 * PI).sqrt());
                l1 += (g.f[j * g.nv + l] - exact).abs();
            }
        }
        l1 *= g.dx() * g.dv();
        assert!(l1 <= 1e-6, "free transport L1 error {l1}");
    }

    #[test]
    fn vpfp_heat_variance() {
        // K = 0, sigma > 0: velocity variance grows like s^2 + sigma^2 t.
        let s = 0.5;
        let sigma = 0.8;
        let t = 0.25;
        let g0 = PhaseGrid1D::cosine_gaussian(32, 128, 6.0, 0.0, s);
        let (g, rep) = solve_vpfp_1d(&g0, &KernelSpec::zero(1), sigma, t, 1.0 / 256.0).unwrap();
        assert!(rep.mass_drift.abs() < 1e-10);
        let mut var = 0.0;
        for j in 0..g.nx {
            for l in 0..g.nv {
                let v = g.v_center(l);
                var += v * v * g.f[j * g.nv + l];
            }
        }
        var *= g.dx() * g.dv() / g.mass();
        let want = s * s + sigma * sigma * t;
        assert_relative_eq!(var, want, max_relative = 5e-3);
    }

    #[test]
    fn vpfp_cfl_guard() {
        let g0 = PhaseGrid1D::cosine_gaussian(32, 32, 4.0, 0.0, 1.0);
        assert!(matches!(
            solve_vpfp_1d(&g0, &KernelSpec::zero(1), 0.0, 0.1, 0.1),
            Err(Error::CflViolation { .. })
        ));
    }

    #[test]
    fn first_order_mode_decay() {
        let n = 64;
        let sigma = 0.7;
        let t = 0.2;
        let g0 = SpatialGrid::cosine(n, 1, 0.3);
        let (g, rep) =
            solve_first_order(&g0, &KernelSpec::zero(1), sigma, t, t / 16.0).unwrap();
        assert!(rep.mass_drift.abs() < 1e-12);
        let decay = (-sigma * sigma * 0.5 * 4.0 * PI * PI * t).exp();
        for j in 0..n {
            let x = (j as f64 + 0.5) / n as f64;
            let want = 1.0 + 0.3 * decay * (2.0 * PI * x).cos();
            assert_relative_eq!(g.f[j], want, epsilon = 1e-8);
        }
    }

    #[test]
    fn first_order_uniform_steady_state() {
        let g0 = SpatialGrid {
            n: 32,
            d: 2,
            f: vec![1.0; 32 * 32],
            time: 0.0,
        };
        let (g, _) =
            solve_first_order(&g0, &KernelSpec::coulomb(2, 1.0), 0.5, 0.1, 1.0 / 64.0).unwrap();
        for v in &g.f {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn first_order_strang_self_convergence() {
        // dt refinement: error(dt)/error(dt/2) close to 4 (second order).
        let n = 32;
        let spec = KernelSpec::mild_power(2, 1.0, 0.6);
        let mut g0 = SpatialGrid::cosine(n, 2, 0.4);
        // Break symmetry along the second axis.
        for c in 0..n * n {
            let y = (c % n) as f64 / n as f64;
            g0.f[c] *= 1.0 + 0.3 * (2.0 * PI * y).sin();
        }
        let t = 0.05;
        let run = |dt: f64| {
            solve_first_order(&g0, &spec, 0.4, t, dt)
                .unwrap()
                .0
                .f
        };
        let f1 = run(t / 8.0);
        let f2 = run(t / 16.0);
        let f4 = run(t / 32.0);
        let e12: f64 = f1.iter().zip(&f2).map(|(a, b)| (a - b).abs()).sum();
        let e24: f64 = f2.iter().zip(&f4).map(|(a, b)| (a - b).abs()).sum();
        let ratio = e12 / e24;
        assert!((3.5..4.5).contains(&ratio), "observed order ratio {ratio}");
    }

    #[test]
    fn restrict_preserves_mass_and_centers() {
        let g = PhaseGrid1D::cosine_gaussian(64, 64, 3.0, 0.7, 0.8);
        let r = g.restrict(4, 4).unwrap();
        assert_relative_eq!(r.mass(), g.mass(), max_relative = 1e-12);
        assert_eq!(r.nx, 16);
        assert!(g.restrict(3, 4).is_err());
    }

    #[test]
    fn tensorize_properties() {
        let g = PhaseGrid1D::cosine_gaussian(16, 16, 3.0, 0.5, 0.7);
        let t1 = tensorize_phase(&g, 1).unwrap();
        assert_eq!(t1.values, g.f);
        assert_relative_eq!(t1.mass(), g.mass(), max_relative = 1e-12);
        let t2 = tensorize_phase(&g, 2).unwrap();
        assert_relative_eq!(t2.mass(), g.mass() * g.mass(), max_relative = 1e-10);
        // Summing out slot 2 returns f times the mass.
        let reduced = crate::marginal::marginalize_slot2(&t2).unwrap();
        for (a, b) in reduced.values.iter().zip(&g.f) {
            assert_relative_eq!(*a, b * g.mass(), max_relative = 1e-10, epsilon = 1e-12);
        }
    }
}
