//! Fourier differentiation on uniform periodic grids over `[0, 2π)`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

fn wavenumber(idx: usize, n: usize) -> f64 {
    if 2 * idx == n {
        // Nyquist mode has no well-defined real derivative
        0.0
    } else if 2 * idx < n {
        idx as f64
    } else {
        idx as f64 - n as f64
    }
}

fn differentiate_in_place(buf: &mut [Complex64], forward: &dyn Fft<f64>, inverse: &dyn Fft<f64>) {
    let n = buf.len();
    forward.process(buf);
    for (idx, c) in buf.iter_mut().enumerate() {
        *c *= Complex64::new(0.0, wavenumber(idx, n));
    }
    inverse.process(buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
}

pub(crate) fn derivative_complex(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut buf = samples.to_vec();
    differentiate_in_place(&mut buf, forward.as_ref(), inverse.as_ref());
    buf
}

/// d/dθ of a real periodic sample vector.
pub(crate) fn derivative(samples: &[f64]) -> Vec<f64> {
    let c: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    derivative_complex(&c).into_iter().map(|z| z.re).collect()
}

/// Partial derivative of an `n × n` row-major torus grid; `axis` 0 is the
/// first angle (row index), 1 the second.
pub(crate) fn torus_partial(samples: &[f64], n: usize, axis: usize) -> Vec<f64> {
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut out = vec![0.0; n * n];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let index = |fixed: usize, k: usize| if axis == 0 { k * n + fixed } else { fixed * n + k };
    for fixed in 0..n {
        for (k, z) in line.iter_mut().enumerate() {
            *z = Complex64::new(samples[index(fixed, k)], 0.0);
        }
        differentiate_in_place(&mut line, forward.as_ref(), inverse.as_ref());
        for (k, z) in line.iter().enumerate() {
            out[index(fixed, k)] = z.re;
        }
    }
    out
}
