//! Interaction potentials `phi >= 0` and kernels `K = -grad phi` on the unit
//! torus, including the Ewald-periodized Coulomb kernel.

mod compiled;
mod ewald;
mod norms;
pub mod special;

pub use compiled::CompiledKernel;
pub use norms::{estimate_kernel_norms, KernelNormReport};

use crate::error::{Error, Result};
use crate::torus::norm;
use serde::{Deserialize, Serialize};
use special::{window, window_deriv};

/// One cosine mode of a smooth interaction potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub wavevector: Vec<i64>,
    pub amplitude: f64,
}

/// Interaction family. All potentials are even, so the forces are odd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelFamily {
    /// Periodized `K = alpha x / |x|^d`.
    Coulomb,
    /// Compactly supported radial potential with `|K| ~ |x|^(-alpha_exp)` at the origin.
    MildPower { alpha_exp: f64 },
    /// Finite cosine series potential; smooth everywhere.
    SmoothFourier { modes: Vec<FourierMode> },
    /// No interaction.
    Zero,
}

/// Full specification of an interaction kernel on the torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    /// Force amplitude alpha.
    pub strength: f64,
    pub dim: usize,
    /// Real-space image shells kept in the Ewald sum.
    #[serde(default = "default_shells")]
    pub image_shells: usize,
    /// Fourier cutoff of the Ewald tail.
    #[serde(default = "default_cutoff")]
    pub fourier_cutoff: usize,
    /// Constant added to the potential so that it is nonnegative.
    #[serde(default)]
    pub potential_shift: f64,
}

fn default_shells() -> usize {
    2
}
fn default_cutoff() -> usize {
    12
}

/// Cutoff radii of the mild-power window (inner plateau, outer support edge).
pub(crate) const MILD_S0: f64 = 0.2;
pub(crate) const MILD_S1: f64 = 0.45;

impl KernelSpec {
    pub fn zero(dim: usize) -> Self {
        KernelSpec {
            family: KernelFamily::Zero,
            strength: 0.0,
            dim,
            image_shells: default_shells(),
            fourier_cutoff: default_cutoff(),
            potential_shift: 0.0,
        }
    }

    pub fn coulomb(dim: usize, strength: f64) -> Self {
        KernelSpec {
            family: KernelFamily::Coulomb,
            strength,
            dim,
            image_shells: default_shells(),
            fourier_cutoff: default_cutoff(),
            potential_shift: 0.0,
        }
    }

    pub fn mild_power(dim: usize, strength: f64, alpha_exp: f64) -> Self {
        KernelSpec {
            family: KernelFamily::MildPower { alpha_exp },
            strength,
            dim,
            image_shells: default_shells(),
            fourier_cutoff: default_cutoff(),
            potential_shift: 0.0,
        }
    }

    pub fn smooth_fourier(dim: usize, strength: f64, modes: Vec<FourierMode>) -> Self {
        KernelSpec {
            family: KernelFamily::SmoothFourier { modes },
            strength,
            dim,
            image_shells: default_shells(),
            fourier_cutoff: default_cutoff(),
            potential_shift: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        match &self.family {
            KernelFamily::Coulomb if self.dim > 3 => Err(Error::NonIntegrableSingularity {
                family: "coulomb".into(),
                dim: self.dim,
            }),
            KernelFamily::MildPower { alpha_exp } => {
                if *alpha_exp <= 0.0 {
                    return Err(Error::InvalidConfig("alpha_exp must be positive".into()));
                }
                if *alpha_exp >= self.dim as f64 {
                    return Err(Error::NonIntegrableSingularity {
                        family: format!("mild_power({alpha_exp})"),
                        dim: self.dim,
                    });
                }
                Ok(())
            }
            KernelFamily::SmoothFourier { modes } => {
                for m in modes {
                    if m.wavevector.len() != self.dim {
                        return Err(Error::InvalidConfig(format!(
                            "mode wavevector length {} does not match dim {}",
                            m.wavevector.len(),
                            self.dim
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Power `a` of the force singularity `|K| ~ |x|^(-a)` at the origin.
    pub(crate) fn force_singularity_power(&self) -> f64 {
        match &self.family {
            KernelFamily::Coulomb => (self.dim - 1) as f64,
            KernelFamily::MildPower { alpha_exp } => *alpha_exp,
            _ => 0.0,
        }
    }

    /// Scan a grid of the unshifted potential and set `potential_shift` so the
    /// shifted potential is nonnegative (with a small margin).
    pub fn with_auto_shift(mut self, resolution: usize) -> Result<Self> {
        self.validate()?;
        self.potential_shift = 0.0;
        let mut min = f64::INFINITY;
        let mut argmin = vec![0.0; self.dim];
        let h = 1.0 / resolution as f64;
        let d = self.dim;
        let mut idx = vec![0usize; d];
        let mut r = vec![0.0; d];
        'scan: loop {
            let mut at_origin = true;
            for a in 0..d {
                r[a] = idx[a] as f64 * h - 0.5;
                // Keep a cell-center offset so the Coulomb singularity is skipped.
                r[a] += 0.5 * h;
                if r[a].abs() > 1e-14 {
                    at_origin = false;
                }
            }
            if !at_origin {
                let v = eval_potential(&self, &r)?;
                if v < min {
                    min = v;
                    argmin.copy_from_slice(&r);
                }
            }
            let mut axis = 0;
            loop {
                if axis == d {
                    break 'scan;
                }
                idx[axis] += 1;
                if idx[axis] == resolution {
                    idx[axis] = 0;
                    axis += 1;
                } else {
                    break;
                }
            }
        }
        // Local refinement around the coarse minimizer: shrink a 5-point
        // stencil per axis until the residual quadratic error is negligible.
        let mut span = h;
        for _ in 0..16 {
            let mut stencil = vec![0usize; d];
            'refine: loop {
                let mut at_origin = true;
                for a in 0..d {
                    r[a] = argmin[a] + (stencil[a] as f64 - 2.0) * span / 4.0;
                    if r[a].abs() > 1e-12 {
                        at_origin = false;
                    }
                }
                if !at_origin {
                    let v = eval_potential(&self, &r)?;
                    if v < min {
                        min = v;
                        argmin.copy_from_slice(&r);
                    }
                }
                let mut axis = 0;
                loop {
                    if axis == d {
                        break 'refine;
                    }
                    stencil[axis] += 1;
                    if stencil[axis] == 5 {
                        stencil[axis] = 0;
                        axis += 1;
                    } else {
                        break;
                    }
                }
            }
            span *= 0.5;
        }
        if min < 0.0 {
            self.potential_shift = -min + 1e-12;
        }
        Ok(self)
    }
}

/// Unshifted periodized potential at a min-image displacement.
pub(crate) fn potential_unshifted(spec: &KernelSpec, r: &[f64]) -> Result<f64> {
    spec.validate()?;
    let alpha = spec.strength;
    Ok(match &spec.family {
        KernelFamily::Zero => 0.0,
        KernelFamily::SmoothFourier { modes } => {
            let tau = std::f64::consts::TAU;
            alpha
                * modes
                    .iter()
                    .map(|m| {
                        let phase: f64 =
                            m.wavevector.iter().zip(r).map(|(&k, &x)| k as f64 * x).sum();
                        m.amplitude * (tau * phase).cos()
                    })
                    .sum::<f64>()
        }
        KernelFamily::MildPower { alpha_exp } => {
            let s = norm(r);
            if s >= MILD_S1 {
                0.0
            } else {
                alpha * (mild_psi(s, *alpha_exp) - mild_psi(MILD_S1, *alpha_exp)) * window(s, MILD_S0, MILD_S1)
            }
        }
        KernelFamily::Coulomb => match spec.dim {
            1 => {
                let x = r[0].abs();
                alpha * (x * x - x + 1.0 / 6.0)
            }
            2 | 3 => ewald::potential(spec.dim, alpha, r, spec.image_shells, spec.fourier_cutoff),
            _ => unreachable!("validated above"),
        },
    })
}

/// `psi(s)` with `-psi'(s) = s^(-a)`: the radial antiderivative of the mild force.
fn mild_psi(s: f64, a: f64) -> f64 {
    if (a - 1.0).abs() < 1e-12 {
        -s.ln()
    } else {
        s.powf(1.0 - a) / (a - 1.0)
    }
}

/// Shifted periodized potential `phi(r)`; returns 0 at `r = 0` exactly.
pub fn eval_potential(spec: &KernelSpec, r: &[f64]) -> Result<f64> {
    if r.iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    Ok(potential_unshifted(spec, r)? + spec.potential_shift)
}

/// Force `K(r) = -grad phi(r)`; returns the zero vector at `r = 0`.
pub fn eval_force(spec: &KernelSpec, r: &[f64]) -> Result<Vec<f64>> {
    spec.validate()?;
    let d = spec.dim;
    let mut out = vec![0.0; d];
    if r.iter().all(|&c| c == 0.0) {
        return Ok(out);
    }
    let alpha = spec.strength;
    match &spec.family {
        KernelFamily::Zero => {}
        KernelFamily::SmoothFourier { modes } => {
            let tau = std::f64::consts::TAU;
            for m in modes {
                let phase: f64 = m.wavevector.iter().zip(r).map(|(&k, &x)| k as f64 * x).sum();
                let coeff = alpha * m.amplitude * tau * (tau * phase).sin();
                for (i, &k) in m.wavevector.iter().enumerate() {
                    out[i] += coeff * k as f64;
                }
            }
        }
        KernelFamily::MildPower { alpha_exp } => {
            let s = norm(r);
            if s < MILD_S1 {
                let a = *alpha_exp;
                let w = window(s, MILD_S0, MILD_S1);
                let dw = window_deriv(s, MILD_S0, MILD_S1);
                // K = -(d phi/ds) r/s
                let mag =
                    alpha * (s.powf(-a) * w - (mild_psi(s, a) - mild_psi(MILD_S1, a)) * dw) / s;
                for i in 0..d {
                    out[i] = mag * r[i];
                }
            }
        }
        KernelFamily::Coulomb => match d {
            1 => {
                let x = r[0];
                out[0] = alpha * (x.signum() - 2.0 * x);
            }
            2 | 3 => ewald::force(d, alpha, r, spec.image_shells, spec.fourier_cutoff, &mut out),
            _ => unreachable!(),
        },
    }
    Ok(out)
}
