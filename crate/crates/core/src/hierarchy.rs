//! Scalar machinery for the coupled moment recursion
//! `X_k(t) <= X_k(0) + k L int_0^t X_{k+1}(s) ds`:
//! the decreasing weight schedule, admissibility constraints on the schedule
//! constant, the growth constant, the guaranteed existence time, the explicit
//! induction and decay bounds, and a brute-force discretized solution of the
//! equality recursion used to validate the closed forms.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyParams {
    pub q: f64,
    pub p: f64,
    pub d: usize,
    pub sigma: f64,
    /// Schedule constant, must satisfy `lambda >= lambda_min(q, sigma)`.
    pub lambda_big: f64,
    pub c_const: f64,
    pub theta_exp: f64,
    pub k_lp_norm: f64,
    pub f0: f64,
    pub f_cap: f64,
    pub n: usize,
}

impl HierarchyParams {
    pub fn validate(&self) -> Result<()> {
        if self.q < 2.0 {
            return Err(Error::InvalidConfig("q must be >= 2".into()));
        }
        if self.p <= 1.0 || 1.0 / self.p + 1.0 / self.q > 1.0 + 1e-12 {
            return Err(Error::ExponentViolation {
                sum: 1.0 / self.p + 1.0 / self.q,
            });
        }
        if self.sigma <= 0.0 {
            return Err(Error::InvalidConfig("sigma must be positive".into()));
        }
        if self.lambda_big < lambda_min(self.q, self.sigma) - 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "schedule constant {} below admissible minimum {}",
                self.lambda_big,
                lambda_min(self.q, self.sigma)
            )));
        }
        if self.c_const <= 0.0
            || self.theta_exp <= 0.0
            || self.k_lp_norm < 0.0
            || self.f0 <= 0.0
            || self.f_cap <= 0.0
            || self.n == 0
        {
            return Err(Error::InvalidConfig(
                "C, theta, F0, F must be positive; ||K|| nonnegative; N >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn growth_constant(&self) -> f64 {
        growth_constant(
            self.c_const,
            self.theta_exp,
            self.lambda_big,
            self.k_lp_norm,
            self.q,
        )
    }
}

/// Decreasing exponential weight rate `lambda(t) = 1 / (Lambda (1 + t))`.
pub fn lambda_schedule(lambda_big: f64, t: f64) -> f64 {
    debug_assert!(lambda_big > 0.0 && t >= 0.0);
    1.0 / (lambda_big * (1.0 + t))
}

/// Smallest admissible schedule constant: the larger of the two constraints
/// `q sigma^2 / (q-1)` and `q (1 + 2 ((q-2) q - 1)^2 / (q sigma^2))`.
pub fn lambda_min(q: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let first = q / (q - 1.0) * s2;
    let c = (q - 2.0) * q - 1.0;
    let second = q * (1.0 + 2.0 * c * c / (q * s2));
    first.max(second)
}

/// Default loss exponent `theta = (q - 2) + q d / (2 q*)`, `1/q + 1/q* = 1`.
pub fn default_theta(q: f64, d: usize) -> f64 {
    let q_star = q / (q - 1.0);
    (q - 2.0) + q * d as f64 / (2.0 * q_star)
}

/// `L = C * lambda(1)^{-theta} * ||K||^q`.
pub fn growth_constant(c_const: f64, theta_exp: f64, lambda_big: f64, k_lp_norm: f64, q: f64) -> f64 {
    c_const * lambda_schedule(lambda_big, 1.0).powf(-theta_exp) * k_lp_norm.powf(q)
}

/// Guaranteed time window `min(1, 1/(4 L max(F0, F)))`; the full unit window
/// when `L = 0`.
pub fn existence_time(l: f64, f0: f64, f: f64) -> f64 {
    if l == 0.0 {
        return 1.0;
    }
    (1.0 / (4.0 * l * f0.max(f))).min(1.0)
}

/// `C(n, k)` as a float: exact integer arithmetic (correctly rounded on cast)
/// for n <= 120, log-gamma otherwise.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 120 {
        let mut acc: u128 = 1;
        for i in 1..=k as u128 {
            acc = acc * (n as u128 - k as u128 + i) / i;
        }
        acc as f64
    } else {
        (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
            .exp()
    }
}

/// Tail function `X_{m+1}` sampled on a time grid, for the induction bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledTail {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledTail {
    pub fn zero(t: f64) -> Self {
        SampledTail {
            times: vec![0.0, t],
            values: vec![0.0, 0.0],
        }
    }
}

/// Explicit induction bound
/// `sum_{l=k}^m F0^l L^{l-k} t^{l-k} C(l-1, k-1)
///  + L^{m+1-k} int_0^t X_{m+1}(s) (t-s)^{m-k} C(m, k-1) (m-k+1)... ds`
/// with the tail integral by trapezoid on the tail's own grid. The factorial
/// ratio in the tail term is `m! / ((k-1)! (m-k)!) = C(m, k-1) (m-k+1)`.
pub fn induction_bound(
    k: usize,
    m: usize,
    t: f64,
    f0: f64,
    l_const: f64,
    tail: &SampledTail,
) -> Result<f64> {
    assert!(k >= 1 && k <= m && t >= 0.0);
    let mut sum = 0.0;
    for l in k..=m {
        let term = f0.powi(l as i32)
            * (l_const * t).powi((l - k) as i32)
            * binomial(l as u64 - 1, k as u64 - 1);
        if !term.is_finite() {
            return Err(Error::Overflow { l });
        }
        sum += term;
    }

    let coeff = binomial(m as u64, k as u64 - 1) * (m - k + 1) as f64;
    let mut integral = 0.0;
    for w in tail.times.windows(2).zip(tail.values.windows(2)) {
        let (ts, vs) = w;
        let (s0, s1) = (ts[0], ts[1]);
        if s0 >= t {
            break;
        }
        let s1 = s1.min(t);
        let g0 = vs[0] * (t - s0).powi((m - k) as i32);
        let g1 = vs[1] * (t - s1).powi((m - k) as i32);
        integral += 0.5 * (g0 + g1) * (s1 - s0);
    }
    let tail_term = l_const.powi((m + 1 - k) as i32) * coeff * integral;
    if !tail_term.is_finite() {
        return Err(Error::Overflow { l: m + 1 });
    }
    Ok(sum + tail_term)
}

/// Closed-form marginal bound `2^k F0^k + F^k 2^{2k - N - 1}`, valid only
/// while `4 L t max(F0, F) < 1`.
pub fn final_marginal_bound(
    k: usize,
    n: usize,
    f0: f64,
    f: f64,
    l_const: f64,
    t: f64,
) -> Result<f64> {
    assert!(k >= 1 && k <= n);
    let regime = 4.0 * l_const * t * f0.max(f);
    if regime >= 1.0 {
        return Err(Error::OutOfRegime { value: regime });
    }
    Ok(2f64.powi(k as i32) * f0.powi(k as i32)
        + f.powi(k as i32) * 2f64.powi(2 * k as i32 - n as i32 - 1))
}

/// Geometric decay bound `2^k M^k (2 L M t)^{m+1-k}` for the homogeneous
/// recursion started from zero data.
pub fn uniqueness_decay(k: usize, m: usize, t: f64, l_tilde: f64, m_tilde: f64) -> f64 {
    assert!(m >= k);
    2f64.powi(k as i32) * m_tilde.powi(k as i32)
        * (2.0 * l_tilde * m_tilde * t).powi((m + 1 - k) as i32)
}

/// Trace of recursion values on a shared time grid, `values[j]` holding
/// `X_k(t_j)` for `k = k_min .. k_min + values[j].len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionTrace {
    pub times: Vec<f64>,
    pub k_min: usize,
    /// Row per time node, one column per k.
    pub values: Vec<Vec<f64>>,
    pub l_used: f64,
}

impl RecursionTrace {
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.values.len() || self.times.len() < 2 {
            return Err(Error::InvalidConfig("trace needs >= 2 time nodes".into()));
        }
        let width = self.values[0].len();
        if width < 2 {
            return Err(Error::InvalidConfig("trace needs >= 2 marginal orders".into()));
        }
        for row in &self.values {
            if row.len() != width || row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidConfig(
                    "trace values must be nonnegative and finite".into(),
                ));
            }
        }
        if !self.times.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidConfig("trace times must increase".into()));
        }
        Ok(())
    }

    pub fn k_max(&self) -> usize {
        self.k_min + self.values[0].len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionCheck {
    pub k: usize,
    pub time: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; nonnegative up to tolerance when the inequality holds.
    pub margin: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Check `X_k(t_j) <= X_k(t_0) + k L int_{t_0}^{t_j} X_{k+1}` for every k
/// except the last column and every time node, trapezoid quadrature. The
/// tolerance combines the caller's relative slack with a second-difference
/// estimate of the trapezoid error.
pub fn verify_recursion(trace: &RecursionTrace, rel_tol: f64) -> Result<Vec<RecursionCheck>> {
    trace.validate()?;
    let nt = trace.times.len();
    let width = trace.values[0].len();
    let mut out = Vec::new();
    for col in 0..width - 1 {
        let k = trace.k_min + col;
        let x0 = trace.values[0][col];
        let mut integral = 0.0;
        let mut quad_err = 0.0;
        for j in 0..nt {
            if j > 0 {
                let h = trace.times[j] - trace.times[j - 1];
                integral +=
                    0.5 * h * (trace.values[j - 1][col + 1] + trace.values[j][col + 1]);
                if j > 1 {
                    let d2 = trace.values[j][col + 1] - 2.0 * trace.values[j - 1][col + 1]
                        + trace.values[j - 2][col + 1];
                    quad_err += h / 12.0 * d2.abs();
                }
            }
            let lhs = trace.values[j][col];
            let rhs = x0 + k as f64 * trace.l_used * integral;
            let tolerance =
                rel_tol * lhs.abs().max(rhs.abs()) + k as f64 * trace.l_used * quad_err;
            let margin = rhs - lhs;
            out.push(RecursionCheck {
                k,
                time: trace.times[j],
                lhs,
                rhs,
                margin,
                tolerance,
                holds: margin >= -tolerance,
            });
        }
    }
    Ok(out)
}

/// Solve the equality recursion
/// `X_k(t) = X_k(0) + k L int_0^t X_{k+1}(s) ds` on a uniform grid with `j_steps`
/// intervals, given the terminal row `X_{k_terminal}(t)` as a function of time.
/// The system is triangular in k, so a single downward substitution pass gives
/// the fixed point; iteration continues until values stop changing to guard
/// against accumulation error.
pub fn picard_equality_trace(
    k_min: usize,
    k_terminal: usize,
    t_end: f64,
    j_steps: usize,
    initial: impl Fn(usize) -> f64,
    terminal: impl Fn(f64) -> f64,
    l_const: f64,
) -> RecursionTrace {
    assert!(k_terminal > k_min && j_steps >= 2);
    let nt = j_steps + 1;
    let h = t_end / j_steps as f64;
    let times: Vec<f64> = (0..nt).map(|j| j as f64 * h).collect();
    let width = k_terminal - k_min + 1;
    let mut cols: Vec<Vec<f64>> = vec![vec![0.0; nt]; width];
    for (j, t) in times.iter().enumerate() {
        cols[width - 1][j] = terminal(*t);
    }
    for col in (0..width - 1).rev() {
        let k = k_min + col;
        let x0 = initial(k);
        let mut last_rel = f64::INFINITY;
        while last_rel > 1e-12 {
            let mut integral = 0.0;
            let mut max_rel: f64 = 0.0;
            for j in 0..nt {
                if j > 0 {
                    integral += 0.5 * h * (cols[col + 1][j - 1] + cols[col + 1][j]);
                }
                let new = x0 + k as f64 * l_const * integral;
                let old = cols[col][j];
                max_rel = max_rel.max((new - old).abs() / new.abs().max(1e-300));
                cols[col][j] = new;
            }
            // Triangular in k: the pass converges immediately, the loop exits
            // on the second sweep.
            if last_rel.is_infinite() {
                last_rel = max_rel.max(1e-11);
            } else {
                last_rel = max_rel;
            }
        }
    }
    let values = (0..nt)
        .map(|j| (0..width).map(|c| cols[c][j]).collect())
        .collect();
    RecursionTrace {
        times,
        k_min,
        values,
        l_used: l_const,
    }
}
