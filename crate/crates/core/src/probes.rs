//! Test functions: seeded random band-limited probes and the Gaussian probe
//! set used for weak (paired) residuals.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::families::{superpose, SchwartzFamily};
use crate::grid::{Grid, GridDistribution};

pub const DEFAULT_SEED: u64 = 42;

/// Number of random probes used when deciding operator equality.
pub const PROBE_COUNT: usize = 16;

/// Random probes whose Fourier coordinates are supported on the lowest
/// quarter of the frequency band along every axis.
pub fn band_limited_probes(grid: &Grid, count: usize, seed: u64) -> Vec<GridDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fourier = SchwartzFamily::fourier(grid);
    let index = fourier.index_grid().clone();
    (0..count)
        .map(|_| {
            let coefficients: Vec<Complex64> = (0..index.len())
                .map(|k| {
                    let inside = index
                        .multi_index(k)
                        .iter()
                        .zip(grid.counts())
                        .all(|(&j, &n)| (j as i64 - (n / 2) as i64).unsigned_abs() as usize <= n / 8);
                    if inside {
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            let c = GridDistribution::new(index.clone(), coefficients)
                .expect("random coefficients are finite");
            superpose(&c, &fourier).expect("probe grids match by construction")
        })
        .collect()
}

/// Random complex scalars for linearity probes.
pub fn random_scalars(count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect()
}

/// Isotropic Gaussian test function `exp(-|x - c|² / (2w²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianProbe {
    pub center: Vec<f64>,
    pub width: f64,
}

impl GaussianProbe {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (-r2 / (2.0 * self.width * self.width)).exp()
    }

    pub fn sample(&self, grid: &Grid) -> GridDistribution {
        GridDistribution::from_fn(grid, |x| Complex64::new(self.eval(x), 0.0))
            .expect("gaussian samples are finite")
    }
}

/// Eight Gaussians of width `4Δx` centred at evenly spaced points along the
/// box diagonal, `cᵢ = -Lᵢ + (k + ½)·2Lᵢ/8`.
pub fn gaussian_probe_set(grid: &Grid) -> Vec<GaussianProbe> {
    const CENTERS: usize = 8;
    let width = 4.0
        * grid
            .spacings()
            .into_iter()
            .fold(0.0, f64::max);
    (0..CENTERS)
        .map(|k| GaussianProbe {
            center: grid
                .half_extents()
                .iter()
                .map(|&l| -l + (k as f64 + 0.5) * 2.0 * l / CENTERS as f64)
                .collect(),
            width,
        })
        .collect()
}
