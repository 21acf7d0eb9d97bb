//! Ewald-split periodization of the Coulomb kernel on the unit torus.
//!
//! The potential splits into a Gaussian-screened real-space image sum and a
//! Gaussian-damped Fourier tail. The splitting width `eta` is chosen from the
//! configured shell count and Fourier cutoff so both truncation tails are far
//! below the self-consistency tolerance.

use super::special::exp_int_e1;
use statrs::function::erf::erfc;

/// Splitting parameter balancing the real-space and Fourier truncation errors.
pub fn splitting_eta(image_shells: usize, fourier_cutoff: usize) -> f64 {
    std::f64::consts::PI * fourier_cutoff as f64 / (image_shells as f64 + 0.5)
}

fn fourier_weight(k2: f64, eta: f64) -> f64 {
    let pi = std::f64::consts::PI;
    (-pi * pi * k2 / eta).exp() / (4.0 * pi * pi * k2)
}

/// Iterate integer vectors in the box `[-m, m]^d` excluding zero.
fn for_each_lattice(d: usize, m: i64, mut f: impl FnMut(&[i64])) {
    let mut k = vec![-m; d];
    loop {
        if !k.iter().all(|&c| c == 0) {
            f(&k);
        }
        let mut axis = 0;
        loop {
            if axis == d {
                return;
            }
            k[axis] += 1;
            if k[axis] > m {
                k[axis] = -m;
                axis += 1;
            } else {
                break;
            }
        }
    }
}

/// Screened nearest-image potential term (the part singular at r = 0).
pub fn screened_point_potential(d: usize, alpha: f64, rho2: f64, eta: f64) -> f64 {
    match d {
        2 => 0.5 * alpha * exp_int_e1(eta * rho2),
        3 => {
            let rho = rho2.sqrt();
            alpha * erfc(eta.sqrt() * rho) / rho
        }
        _ => unreachable!("Ewald split only used for d in {{2,3}}"),
    }
}

/// Magnitude/rho of the screened nearest-image force term; multiply by the
/// displacement vector to get the force contribution.
pub fn screened_point_force_over_r(d: usize, alpha: f64, rho2: f64, eta: f64) -> f64 {
    match d {
        2 => alpha * (-eta * rho2).exp() / rho2,
        3 => {
            let rho = rho2.sqrt();
            let sqrt_eta = eta.sqrt();
            alpha
                * (erfc(sqrt_eta * rho) / rho2
                    + 2.0 * (eta / std::f64::consts::PI).sqrt() * (-eta * rho2).exp() / rho)
                / rho
        }
        _ => unreachable!(),
    }
}

fn fourier_prefactor(d: usize, alpha: f64) -> f64 {
    let pi = std::f64::consts::PI;
    match d {
        2 => 2.0 * pi * alpha,
        3 => 4.0 * pi * alpha,
        _ => unreachable!(),
    }
}

/// Full periodized potential (unshifted), `r` in min-image coordinates.
pub fn potential(d: usize, alpha: f64, r: &[f64], shells: usize, cutoff: usize) -> f64 {
    let eta = splitting_eta(shells, cutoff);
    let mut real = 0.0;
    let m = shells as i64;
    // n = 0 image first.
    let rho2_0: f64 = r.iter().map(|c| c * c).sum();
    real += screened_point_potential(d, alpha, rho2_0, eta);
    for_each_lattice(d, m, |n| {
        let rho2: f64 = r
            .iter()
            .zip(n)
            .map(|(c, &ni)| {
                let y = c + ni as f64;
                y * y
            })
            .sum();
        real += screened_point_potential(d, alpha, rho2, eta);
    });

    let pref = fourier_prefactor(d, alpha);
    let mut four = 0.0;
    let tau = std::f64::consts::TAU;
    for_each_lattice(d, cutoff as i64, |k| {
        let k2: f64 = k.iter().map(|&c| (c * c) as f64).sum();
        let phase: f64 = r.iter().zip(k).map(|(c, &ki)| c * ki as f64).sum();
        four += fourier_weight(k2, eta) * (tau * phase).cos();
    });

    real + pref * four - pref / (4.0 * eta)
}

/// Full periodized force `K = -grad phi` (unshifted), `r` in min-image coordinates.
pub fn force(d: usize, alpha: f64, r: &[f64], shells: usize, cutoff: usize, out: &mut [f64]) {
    let eta = splitting_eta(shells, cutoff);
    out.iter_mut().for_each(|c| *c = 0.0);
    let m = shells as i64;

    let mut add_image = |shift: &[f64]| {
        let mut rho2 = 0.0;
        for (i, c) in r.iter().enumerate() {
            let y = c + shift[i];
            rho2 += y * y;
        }
        let mag = screened_point_force_over_r(d, alpha, rho2, eta);
        for (i, c) in r.iter().enumerate() {
            out[i] += mag * (c + shift[i]);
        }
    };
    add_image(&vec![0.0; d]);
    for_each_lattice(d, m, |n| {
        let shift: Vec<f64> = n.iter().map(|&x| x as f64).collect();
        add_image(&shift);
    });

    let pref = fourier_prefactor(d, alpha);
    let tau = std::f64::consts::TAU;
    for_each_lattice(d, cutoff as i64, |k| {
        let k2: f64 = k.iter().map(|&c| (c * c) as f64).sum();
        let phase: f64 = r.iter().zip(k.iter()).map(|(c, &ki)| c * ki as f64).sum();
        let coeff = pref * fourier_weight(k2, eta) * tau * (tau * phase).sin();
        for (i, &ki) in k.iter().enumerate() {
            out[i] += coeff * ki as f64;
        }
    });
}
