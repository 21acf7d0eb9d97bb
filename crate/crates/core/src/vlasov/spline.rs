//! Cubic spline interpolation on uniform grids, used by the semi-Lagrangian
//! transport steps. Periodic splines for the position direction, natural
//! splines for the truncated velocity direction.

/// Solve a tridiagonal system in place (Thomas algorithm). `a` is the
/// subdiagonal, `b` the diagonal, `c` the superdiagonal; `d` holds the right
/// side on entry and the solution on exit.
pub fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], d: &mut [f64]) {
    let n = d.len();
    let mut cp = vec![0.0; n];
    let mut bp = b[0];
    d[0] /= bp;
    for i in 1..n {
        cp[i - 1] = c[i - 1] / bp;
        bp = b[i] - a[i] * cp[i - 1];
        d[i] = (d[i] - a[i] * d[i - 1]) / bp;
    }
    for i in (0..n - 1).rev() {
        d[i] -= cp[i] * d[i + 1];
    }
}

/// Cubic spline over samples on a uniform grid with spacing `h`, holding the
/// second derivatives at the nodes.
pub struct Spline<'a> {
    values: &'a [f64],
    m: Vec<f64>,
    h: f64,
    periodic: bool,
}

impl<'a> Spline<'a> {
    /// Periodic spline: node i sits at `x0 + i h`, and the function repeats
    /// with period `n h`.
    pub fn periodic(values: &'a [f64], h: f64) -> Self {
        let n = values.len();
        assert!(n >= 3);
        // Cyclic tridiagonal system M_{i-1} + 4 M_i + M_{i+1} = 6 d2_i / h^2,
        // solved with the Sherman-Morrison correction.
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let im = (i + n - 1) % n;
            let ip = (i + 1) % n;
            rhs[i] = 6.0 * (values[im] - 2.0 * values[i] + values[ip]) / (h * h);
        }
        let gamma = -4.0;
        let a = vec![1.0; n];
        let c = vec![1.0; n];
        let mut b = vec![4.0; n];
        b[0] -= gamma;
        b[n - 1] -= 1.0 / gamma;
        let mut y = rhs;
        solve_tridiagonal(&a, &b, &c, &mut y);
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = 1.0;
        let mut z = u.clone();
        solve_tridiagonal(&a, &b, &c, &mut z);
        let fact = (y[0] + y[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
        let m = y.iter().zip(&z).map(|(yi, zi)| yi - fact * zi).collect();
        Spline {
            values,
            m,
            h,
            periodic: true,
        }
    }

    /// Natural spline: zero second derivative at both ends.
    pub fn natural(values: &'a [f64], h: f64) -> Self {
        let n = values.len();
        assert!(n >= 3);
        let mut m = vec![0.0; n];
        let inner = n - 2;
        let a = vec![1.0; inner];
        let b = vec![4.0; inner];
        let c = vec![1.0; inner];
        let mut rhs = vec![0.0; inner];
        for i in 0..inner {
            rhs[i] =
                6.0 * (values[i] - 2.0 * values[i + 1] + values[i + 2]) / (h * h);
        }
        solve_tridiagonal(&a, &b, &c, &mut rhs);
        m[1..n - 1].copy_from_slice(&rhs);
        Spline {
            values,
            m,
            h,
            periodic: false,
        }
    }

    /// Value at offset `u` grid units from node 0 (so the physical position is
    /// `x0 + u h`). Periodic splines wrap; natural splines return 0 outside
    /// the sampled range.
    pub fn eval(&self, u: f64) -> f64 {
        let n = self.values.len();
        let u = if self.periodic {
            u.rem_euclid(n as f64)
        } else {
            if u < 0.0 || u > (n - 1) as f64 {
                return 0.0;
            }
            u
        };
        let i = (u as usize).min(if self.periodic { n - 1 } else { n - 2 });
        let ip = if self.periodic { (i + 1) % n } else { i + 1 };
        let t = u - i as f64;
        let h2 = self.h * self.h;
        let a = 1.0 - t;
        // Standard second-derivative form on [x_i, x_{i+1}].
        a * self.values[i]
            + t * self.values[ip]
            + h2 / 6.0 * ((a * a * a - a) * self.m[i] + (t * t * t - t) * self.m[ip])
    }
}
