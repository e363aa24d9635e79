//! Fourier-family transforms on a grid/dual-grid pair.
//!
//! With `xₖ = -L + kΔx` and `pⱼ = (j - N/2)Δp`, `Δx·Δp = 2π/N`, the phase
//! factorises as `e^{i pⱼ xₖ} = (-1)^{j-N/2} (-1)^k e^{2πi jk/N}`, so both
//! directions reduce to a plain DFT between two sign modulations.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::grid::Grid;

fn parity_sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Multiplies every sample by `Π_axis (-1)^{kᵢ + shiftᵢ}`.
fn modulate(data: &mut [Complex64], grid: &Grid, shifted: bool) {
    let counts = grid.counts();
    for (flat, z) in data.iter_mut().enumerate() {
        let mut rest = flat;
        let mut parity = 0;
        for &n in counts.iter().rev() {
            let k = rest % n;
            rest /= n;
            parity += if shifted { k + n / 2 } else { k };
        }
        *z *= parity_sign(parity);
    }
}

fn transform_axes(data: &mut [Complex64], counts: &[usize], direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    let total = data.len();
    for axis in 0..counts.len() {
        let n = counts[axis];
        let stride: usize = counts[axis + 1..].iter().product();
        let fft = planner.plan_fft(n, direction);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let block = n * stride;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, &value) in line.iter().enumerate() {
                    data[base + k * stride] = value;
                }
            }
        }
    }
}

/// `c(pⱼ) = (2π)^{-n} Σₖ u(xₖ) e^{+i(pⱼ|xₖ)} Δx`, returned on the dual ordering.
pub(crate) fn forward(samples: &[Complex64], space: &Grid) -> Vec<Complex64> {
    let mut data = samples.to_vec();
    modulate(&mut data, space, false);
    transform_axes(&mut data, space.counts(), FftDirection::Inverse);
    modulate(&mut data, space, true);
    let scale = space.quadrature_weight() / (2.0 * std::f64::consts::PI).powi(space.dim() as i32);
    for z in &mut data {
        *z *= scale;
    }
    data
}

/// `u(xₗ) = Σⱼ c(pⱼ) e^{-i(pⱼ|xₗ)} Δp`, with `space` the grid the result lives on.
pub(crate) fn inverse(coefficients: &[Complex64], space: &Grid) -> Vec<Complex64> {
    let mut data = coefficients.to_vec();
    modulate(&mut data, space, true);
    transform_axes(&mut data, space.counts(), FftDirection::Forward);
    modulate(&mut data, space, false);
    let scale = space.dual().quadrature_weight();
    for z in &mut data {
        *z *= scale;
    }
    data
}
