//! Uniform grids on the unit circle and FFT-based Fourier coefficients.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rustfft::FftPlanner;

use crate::C64;

/// Default number of grid points on the circle.
pub const DEFAULT_GRID: usize = 4096;

/// Upper limit for automatically enlarged grids.
pub const MAX_GRID: usize = 1 << 18;

static GRID_OVERRIDE: OnceLock<Option<usize>> = OnceLock::new();

/// Default grid, honoring the `SUPEROPT_GRID` environment variable.
pub fn default_grid() -> usize {
    let over = GRID_OVERRIDE.get_or_init(|| {
        std::env::var("SUPEROPT_GRID")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|n| *n >= 16)
            .map(|n| n.next_power_of_two())
    });
    over.unwrap_or(DEFAULT_GRID)
}

/// `exp(2 pi i k / n)` for `k = 0..n`.
pub fn points(n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// Smallest power-of-two grid (at least `base`) on which a function whose
/// singularities lie at modulus ratio `rho < 1` from the circle aliases below
/// `1e-17` relative.
pub fn grid_for_decay(base: usize, rho: f64) -> usize {
    let mut n = base.max(16).next_power_of_two();
    if rho <= 0.0 || rho >= 1.0 {
        return n;
    }
    // coefficients decay like rho^k; aliasing comes in at k ~ n/2
    let needed = 2.0 * (1e-17f64).ln() / rho.ln();
    while (n as f64) < needed && n < MAX_GRID {
        n *= 2;
    }
    n
}

/// Fourier coefficients of grid samples: entry `k` is the coefficient of
/// `z^k` (indices wrap modulo `n`).
pub fn fourier_from_values(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// Grid samples from Fourier coefficients laid out as in [`fourier_from_values`].
pub fn values_from_fourier(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    buf
}

/// Coefficient of `z^k` from a wrapped spectrum.
pub fn wrapped(spec: &[C64], k: i64) -> C64 {
    let n = spec.len() as i64;
    spec[k.rem_euclid(n) as usize]
}
