//! FFT helpers for the periodic torus grid.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanMap = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<PlanMap>> = OnceLock::new();
    let plans = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = plans.lock().unwrap();
    guard
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

/// Integer wavenumber for index `j` on an `n`-point grid: `0..n/2, −n/2+1..−1`.
/// The Nyquist index carries `n/2`.
pub fn wavenumber(j: usize, n: usize) -> f64 {
    if j <= n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

/// In-place 2D FFT of a row-major `n×n` buffer.
pub fn fft2(data: &mut [Complex64], n: usize, inverse: bool) {
    assert_eq!(data.len(), n * n);
    let fft = plan(n, inverse);
    // rows
    for row in data.chunks_exact_mut(n) {
        fft.process(row);
    }
    // columns via transpose
    let mut col = vec![Complex64::default(); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
    if inverse {
        let scale = 1.0 / (n * n) as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Forward transform of a real field.
pub fn forward_real(values: &[f64], n: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, n, false);
    buf
}

/// Inverse transform, discarding the (round-off) imaginary part.
pub fn inverse_to_real(mut spectrum: Vec<Complex64>, n: usize) -> Vec<f64> {
    fft2(&mut spectrum, n, true);
    spectrum.into_iter().map(|v| v.re).collect()
}

/// Inverse transform keeping complex values.
pub fn inverse_complex(mut spectrum: Vec<Complex64>, n: usize) -> Vec<Complex64> {
    fft2(&mut spectrum, n, true);
    spectrum
}

/// Applies `f(k1, k2)` as a multiplier in frequency space.
pub fn apply_multiplier(
    spectrum: &mut [Complex64],
    n: usize,
    f: impl Fn(f64, f64) -> Complex64,
) {
    for i in 0..n {
        let k1 = wavenumber(i, n);
        for j in 0..n {
            let k2 = wavenumber(j, n);
            spectrum[i * n + j] *= f(k1, k2);
        }
    }
}

/// Zeroes the Nyquist rows/columns; used before odd-order derivatives so the
/// result of differentiating a real field stays real.
pub fn zero_nyquist(spectrum: &mut [Complex64], n: usize) {
    let ny = n / 2;
    for j in 0..n {
        spectrum[ny * n + j] = Complex64::default();
        spectrum[j * n + ny] = Complex64::default();
    }
}

/// Evaluates the band-limited interpolant of `values` at the shifted grid
/// `x + (d1, d2)`; exact for band-limited data.
pub fn shifted_samples(values: &[f64], n: usize, d1: f64, d2: f64) -> Vec<f64> {
    use std::f64::consts::TAU;
    let mut spec = forward_real(values, n);
    apply_multiplier(&mut spec, n, |k1, k2| {
        Complex64::from_polar(1.0, TAU * (k1 * d1 + k2 * d2))
    });
    inverse_to_real(spec, n)
}
