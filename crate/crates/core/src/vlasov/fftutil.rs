//! Thin wrappers over rustfft for the spectral field solves: complex
//! transforms on 1D and 2D grids of real data.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Unnormalized forward DFT of real samples.
pub fn forward(data: &[f64], n: usize, d: usize) -> Vec<Complex<f64>> {
    let mut buf: Vec<Complex<f64>> = data.iter().map(|&x| Complex::new(x, 0.0)).collect();
    transform(&mut buf, n, d, false);
    buf
}

/// Unnormalized inverse DFT; returns the real parts divided by the cell count.
pub fn inverse_real(mut buf: Vec<Complex<f64>>, n: usize, d: usize) -> Vec<f64> {
    transform(&mut buf, n, d, true);
    let cells = n.pow(d as u32) as f64;
    buf.into_iter().map(|c| c.re / cells).collect()
}

fn transform(buf: &mut [Complex<f64>], n: usize, d: usize, inverse: bool) {
    assert!(d == 1 || d == 2);
    assert_eq!(buf.len(), n.pow(d as u32));
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    if d == 1 {
        fft.process(buf);
        return;
    }
    // Rows.
    for row in buf.chunks_exact_mut(n) {
        fft.process(row);
    }
    // Columns.
    let mut col = vec![Complex::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = buf[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            buf[i * n + j] = col[i];
        }
    }
}

/// Signed integer frequency for DFT index `i` on an n-point grid.
pub fn signed_freq(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
