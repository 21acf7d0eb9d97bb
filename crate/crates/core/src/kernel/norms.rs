//! Numerical verification of the kernel integrability assumptions: the L^p
//! norm of K and the exponential-potential integral.

use super::{eval_force, eval_potential, KernelFamily, KernelSpec};
use crate::error::{Error, Result};

/// Estimates of the kernel norms entering the hierarchy hypotheses.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelNormReport {
    pub p_exponent: f64,
    /// Estimate of ||K||_{L^p} over the torus.
    pub lp_norm: f64,
    pub theta_exp: f64,
    /// Estimate of the integral of exp(theta * phi).
    pub exp_phi_integral: f64,
    /// Absolute difference between the two-resolution estimates.
    pub quadrature_error: f64,
}

/// Surface area of the unit sphere in dimension d.
fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::TAU,
        3 => 4.0 * std::f64::consts::PI,
        _ => unreachable!(),
    }
}

fn ball_volume(d: usize, radius: f64) -> f64 {
    sphere_area(d) * radius.powi(d as i32) / d as f64
}

/// Power `c` of the potential blow-up written as `phi ~ -c' ln r` (log case)
/// or detection of stronger-than-log singularities.
enum PhiSingularity {
    Bounded,
    Log(f64),
    SuperLog,
}

fn phi_singularity(spec: &KernelSpec) -> PhiSingularity {
    match &spec.family {
        KernelFamily::Coulomb => match spec.dim {
            1 => PhiSingularity::Bounded,
            2 => PhiSingularity::Log(spec.strength),
            _ => PhiSingularity::SuperLog,
        },
        KernelFamily::MildPower { alpha_exp } => {
            if *alpha_exp > 1.0 {
                PhiSingularity::SuperLog
            } else if (*alpha_exp - 1.0).abs() < 1e-12 {
                PhiSingularity::Log(spec.strength)
            } else {
                PhiSingularity::Bounded
            }
        }
        _ => PhiSingularity::Bounded,
    }
}

/// Estimate `||K||_{L^p}` and the integral of `e^{theta phi}` with midpoint
/// quadrature, the origin cell handled by analytic integration of the leading
/// singular term. The reported error compares resolutions `r` and `r/2`.
pub fn estimate_kernel_norms(
    spec: &KernelSpec,
    p: f64,
    theta: f64,
    resolution: usize,
) -> Result<KernelNormReport> {
    spec.validate()?;
    if p <= 1.0 {
        return Err(Error::InvalidConfig(format!("p must be > 1, got {p}")));
    }
    if theta <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "theta must be > 0, got {theta}"
        )));
    }
    if resolution < 16 {
        return Err(Error::InvalidConfig(format!(
            "resolution must be >= 16, got {resolution}"
        )));
    }

    let d = spec.dim as f64;
    let a = spec.force_singularity_power();
    if a * p >= d {
        return Err(Error::DivergentIntegral {
            reason: format!("|K|^p ~ r^(-{:.3}) is not integrable in dimension {}", a * p, spec.dim),
        });
    }
    match phi_singularity(spec) {
        PhiSingularity::SuperLog => {
            return Err(Error::DivergentIntegral {
                reason: "exp(theta*phi) has a super-logarithmic potential singularity".into(),
            })
        }
        PhiSingularity::Log(c) => {
            if theta * c >= d {
                return Err(Error::DivergentIntegral {
                    reason: format!(
                        "exp(theta*phi) ~ r^(-{:.3}) is not integrable in dimension {}",
                        theta * c,
                        spec.dim
                    ),
                });
            }
        }
        PhiSingularity::Bounded => {}
    }

    let (lp_hi, ephi_hi) = quadrature(spec, p, theta, resolution)?;
    let (lp_lo, ephi_lo) = quadrature(spec, p, theta, resolution / 2)?;
    let lp_norm = lp_hi.powf(1.0 / p);
    let quadrature_error =
        (lp_hi.powf(1.0 / p) - lp_lo.powf(1.0 / p)).abs().max((ephi_hi - ephi_lo).abs());
    Ok(KernelNormReport {
        p_exponent: p,
        lp_norm,
        theta_exp: theta,
        exp_phi_integral: ephi_hi,
        quadrature_error,
    })
}

/// Returns (integral of |K|^p, integral of e^{theta phi}).
fn quadrature(spec: &KernelSpec, p: f64, theta: f64, resolution: usize) -> Result<(f64, f64)> {
    let d = spec.dim;
    let h = 1.0 / resolution as f64;
    let cell_vol = h.powi(d as i32);
    let half = resolution as i64 / 2;

    let mut lp_sum = 0.0;
    let mut ephi_sum = 0.0;
    let mut idx = vec![-half; d];
    let mut r = vec![0.0; d];
    'outer: loop {
        let at_origin = idx.iter().all(|&i| i == 0);
        for axis in 0..d {
            r[axis] = idx[axis] as f64 * h;
        }
        if at_origin {
            let (lp0, ephi0) = origin_cell(spec, p, theta, h)?;
            lp_sum += lp0;
            ephi_sum += ephi0;
        } else {
            let f = eval_force(spec, &r)?;
            let mag: f64 = f.iter().map(|c| c * c).sum::<f64>().sqrt();
            lp_sum += mag.powf(p) * cell_vol;
            let phi = eval_potential(spec, &r)?;
            let w = theta * phi;
            if w > 700.0 {
                return Err(Error::WeightOverflow { exponent: w });
            }
            ephi_sum += w.exp() * cell_vol;
        }
        let mut axis = 0;
        loop {
            if axis == d {
                break 'outer;
            }
            idx[axis] += 1;
            if idx[axis] >= half {
                idx[axis] = -half;
                axis += 1;
            } else {
                break;
            }
        }
    }
    Ok((lp_sum, ephi_sum))
}

/// Analytic treatment of the cell containing the origin.
fn origin_cell(spec: &KernelSpec, p: f64, theta: f64, h: f64) -> Result<(f64, f64)> {
    let d = spec.dim;
    let df = d as f64;
    let radius = 0.5 * h;
    let cell_vol = h.powi(d as i32);
    let ball_vol = ball_volume(d, radius);
    let a = spec.force_singularity_power();

    // Reference point on the first axis at the inscribed-ball radius: used to
    // read off the effective singular prefactor including smooth corrections.
    let mut rref = vec![0.0; d];
    rref[0] = radius;

    // |K|^p part.
    let lp = if a > 0.0 {
        let f = eval_force(spec, &rref)?;
        let mag: f64 = f.iter().map(|c| c * c).sum::<f64>().sqrt();
        let prefactor = mag * radius.powf(a);
        let ball = prefactor.powf(p) * sphere_area(d) * radius.powf(df - a * p) / (df - a * p);
        ball + corner_mean_force_p(spec, p, radius)? * (cell_vol - ball_vol)
    } else {
        let f = eval_force(spec, &rref)?;
        let mag: f64 = f.iter().map(|c| c * c).sum::<f64>().sqrt();
        mag.powf(p) * cell_vol
    };

    // e^{theta phi} part.
    let ephi = match phi_singularity(spec) {
        PhiSingularity::Bounded => {
            let phi = eval_potential(spec, &rref)?;
            (theta * phi).exp() * cell_vol
        }
        PhiSingularity::Log(c) => {
            // phi = -c ln r + g(r): pull the smooth factor from the reference point.
            let phi_ref = eval_potential(spec, &rref)?;
            let smooth = (theta * (phi_ref + c * radius.ln())).exp();
            let ball =
                smooth * sphere_area(d) * radius.powf(df - theta * c) / (df - theta * c);
            ball + corner_mean_exp_phi(spec, theta, radius)? * (cell_vol - ball_vol)
        }
        PhiSingularity::SuperLog => unreachable!("rejected before quadrature"),
    };
    Ok((lp, ephi))
}

fn cell_corners(d: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut corners = Vec::with_capacity(1 << d);
    for mask in 0..(1usize << d) {
        corners.push(
            (0..d)
                .map(|a| if mask >> a & 1 == 1 { radius } else { -radius })
                .collect(),
        );
    }
    corners
}

fn corner_mean_force_p(spec: &KernelSpec, p: f64, radius: f64) -> Result<f64> {
    let corners = cell_corners(spec.dim, radius);
    let mut acc = 0.0;
    for c in &corners {
        let f = eval_force(spec, c)?;
        let mag: f64 = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        acc += mag.powf(p);
    }
    Ok(acc / corners.len() as f64)
}

fn corner_mean_exp_phi(spec: &KernelSpec, theta: f64, radius: f64) -> Result<f64> {
    let corners = cell_corners(spec.dim, radius);
    let mut acc = 0.0;
    for c in &corners {
        acc += (theta * eval_potential(spec, c)?).exp();
    }
    Ok(acc / corners.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_kernel_norms() {
        let mut spec = KernelSpec::zero(2);
        spec.potential_shift = 0.3;
        let rep = estimate_kernel_norms(&spec, 1.5, 0.7, 32).unwrap();
        assert_eq!(rep.lp_norm, 0.0);
        assert!((rep.exp_phi_integral - (0.7f64 * 0.3).exp()).abs() < 1e-12);
    }

    #[test]
    fn coulomb_d2_power_counting() {
        let spec = KernelSpec::coulomb(2, 1.0);
        assert!(estimate_kernel_norms(&spec, 1.5, 0.1, 64).is_ok());
        assert!(matches!(
            estimate_kernel_norms(&spec, 2.0, 0.1, 64),
            Err(Error::DivergentIntegral { .. })
        ));
        // exp(theta*phi) with theta*alpha >= d diverges.
        assert!(matches!(
            estimate_kernel_norms(&spec, 1.5, 2.0, 64),
            Err(Error::DivergentIntegral { .. })
        ));
    }

    #[test]
    fn mild_power_counting() {
        // alpha_exp * p < d finite, >= d divergent; alpha_exp < 1 keeps the
        // potential bounded so the exponential integral is harmless.
        let spec = KernelSpec::mild_power(2, 1.0, 0.9);
        assert!(estimate_kernel_norms(&spec, 1.5, 0.5, 64).is_ok());
        assert!(matches!(
            estimate_kernel_norms(&spec, 2.3, 0.5, 64),
            Err(Error::DivergentIntegral { .. })
        ));
        // A potential blowing up like a positive power makes exp(theta*phi)
        // non-integrable no matter how small theta is.
        let hard = KernelSpec::mild_power(2, 1.0, 1.2);
        assert!(matches!(
            estimate_kernel_norms(&hard, 1.5, 0.01, 64),
            Err(Error::DivergentIntegral { .. })
        ));
    }

    #[test]
    fn coulomb_d3_exp_phi_divergent() {
        let spec = KernelSpec::coulomb(3, 1.0);
        assert!(matches!(
            estimate_kernel_norms(&spec, 1.2, 0.01, 32),
            Err(Error::DivergentIntegral { .. })
        ));
    }

    #[test]
    fn smooth_kernel_lp_matches_closed_form() {
        // phi = amp*cos(2 pi x): |K| = amp*2 pi |sin(2 pi x)|;
        // int |K|^2 = (amp*2 pi)^2 / 2.
        let spec = KernelSpec::smooth_fourier(
            1,
            1.0,
            vec![super::super::FourierMode {
                wavevector: vec![1],
                amplitude: 0.5,
            }],
        );
        let rep = estimate_kernel_norms(&spec, 2.0, 0.3, 256).unwrap();
        let want = ((0.5 * std::f64::consts::TAU).powi(2) / 2.0).sqrt();
        assert!(
            (rep.lp_norm - want).abs() < 1e-3,
            "{} vs {}",
            rep.lp_norm,
            want
        );
    }

    #[test]
    fn coulomb_d2_exp_phi_vs_radial_oracle() {
        // Independent adaptive radial quadrature of exp(theta*phi) using only
        // eval_potential on rays, exploiting near-radial symmetry close to 0
        // plus direct 2d summation away from it.
        let spec = KernelSpec::coulomb(2, 1.0).with_auto_shift(128).unwrap();
        let theta = 0.1;
        let rep = estimate_kernel_norms(&spec, 1.5, theta, 128).unwrap();

        // Oracle: fine midpoint sum away from origin + closed-form radial
        // integral of r^(-theta*alpha) inside a small disc.
        let n = 512usize;
        let h = 1.0 / n as f64;
        let r0 = 0.02;
        let mut acc = 0.0;
        for iy in 0..n {
            for ix in 0..n {
                let x = (ix as f64 + 0.5) * h - 0.5;
                let y = (iy as f64 + 0.5) * h - 0.5;
                let rho = (x * x + y * y).sqrt();
                if rho < r0 {
                    continue;
                }
                acc += (theta * eval_potential(&spec, &[x, y]).unwrap()).exp() * h * h;
            }
        }
        // Inside the disc: phi = -ln r + g with g ~ const; e^{theta phi} =
        // C r^{-theta}, C from the potential on the disc edge.
        let phi_edge = eval_potential(&spec, &[r0, 0.0]).unwrap();
        let c = (theta * (phi_edge + r0.ln())).exp();
        acc += c * std::f64::consts::TAU * r0.powf(2.0 - theta) / (2.0 - theta);
        assert!(
            (rep.exp_phi_integral - acc).abs() < 0.02 * acc,
            "{} vs oracle {}",
            rep.exp_phi_integral,
            acc
        );
    }

    #[test]
    fn reports_quadrature_error() {
        let spec = KernelSpec::coulomb(2, 1.0);
        let rep = estimate_kernel_norms(&spec, 1.5, 0.1, 64).unwrap();
        assert!(rep.quadrature_error.is_finite());
        assert!(rep.lp_norm.is_finite() && rep.lp_norm > 0.0);
        assert!(rep.exp_phi_integral.is_finite() && rep.exp_phi_integral > 0.0);
    }
}
