//! Scalar special functions used by the periodized kernels.

/// Exponential integral E1(x) for x > 0.
///
/// Power series for x <= 1, modified Lentz continued fraction for x > 1.
pub fn exp_int_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 requires x > 0, got {x}");
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for n in 1..=60 {
            term *= -x / n as f64;
            let add = -term / n as f64;
            sum += add;
            if add.abs() < 1e-18 * (1.0 + sum.abs()) {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + sum
    } else {
        // E1(x) = e^{-x} * 1/(x+1- 1/(x+3- 4/(x+5- 9/(x+7- ...))))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Quintic smoothstep window: 1 for s <= s0, 0 for s >= s1, C^2 in between.
pub fn window(s: f64, s0: f64, s1: f64) -> f64 {
    if s <= s0 {
        1.0
    } else if s >= s1 {
        0.0
    } else {
        let u = (s - s0) / (s1 - s0);
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// Derivative of [`window`] with respect to `s`.
pub fn window_deriv(s: f64, s0: f64, s1: f64) -> f64 {
    if s <= s0 || s >= s1 {
        0.0
    } else {
        let w = s1 - s0;
        let u = (s - s0) / w;
        -(30.0 * u * u * (1.0 - u) * (1.0 - u)) / w
    }
}
