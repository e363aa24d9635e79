//! Brute-force dense operators used as independent references: matrices
//! assembled column by column, and periodic central finite differences.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, SpectralError};
use crate::families::SchwartzFamily;
use crate::grid::{Grid, GridDistribution, SymbolFunction};
use crate::solver::DifferentialOperatorSpec;
use crate::spectral::spectral_apply;

/// Dense oracles hold `N²` complex entries; this caps `N`.
pub const MAX_DENSE_POINTS: usize = 4096;

/// Square complex matrix acting on samples of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    grid: Grid,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(grid: &Grid, matrix: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(SpectralError::GridMismatch(format!(
                "{}x{} matrix for a grid with {n} points",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SpectralError::NonFinite("dense operator entry".into()));
        }
        Ok(Self {
            grid: grid.clone(),
            matrix,
        })
    }

    pub fn identity(grid: &Grid) -> Result<Self> {
        check_size(grid)?;
        Self::new(grid, DMatrix::identity(grid.len(), grid.len()))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, u: &GridDistribution) -> Result<GridDistribution> {
        self.grid.ensure_same(u.grid(), "dense apply")?;
        let x = DVector::from_column_slice(u.samples());
        let y = &self.matrix * x;
        GridDistribution::new(self.grid.clone(), y.as_slice().to_vec())
    }

    /// Solves `M u = d` by LU factorization.
    pub fn solve(&self, d: &GridDistribution) -> Result<GridDistribution> {
        self.grid.ensure_same(d.grid(), "dense solve")?;
        let rhs = DVector::from_column_slice(d.samples());
        let x = self
            .matrix
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or(SpectralError::IllConditioned {
                condition: f64::INFINITY,
                limit: f64::INFINITY,
            })?;
        GridDistribution::new(self.grid.clone(), x.as_slice().to_vec())
    }

    /// `shift·I + scale·M`.
    pub fn shifted(&self, shift: Complex64, scale: Complex64) -> Self {
        let n = self.grid.len();
        let matrix = DMatrix::identity(n, n) * shift + &self.matrix * scale;
        Self {
            grid: self.grid.clone(),
            matrix,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

fn check_size(grid: &Grid) -> Result<()> {
    if grid.len() > MAX_DENSE_POINTS {
        return Err(SpectralError::TooLarge {
            points: grid.len(),
            limit: MAX_DENSE_POINTS,
        });
    }
    Ok(())
}

/// Matrix of `u ↦ ∫ a[u|v] v`, one column per unit sample.
pub fn dense_from_diagonal(v: &SchwartzFamily, a: &SymbolFunction) -> Result<DenseOperator> {
    let grid = v.space_grid();
    check_size(grid)?;
    let n = grid.len();
    let mut matrix = DMatrix::zeros(n, n);
    for col in 0..n {
        let image = spectral_apply(a, v, &GridDistribution::unit(grid, col))?;
        for (row, &z) in image.samples().iter().enumerate() {
            matrix[(row, col)] = z;
        }
    }
    DenseOperator::new(grid, matrix)
}

/// Fornberg's recursion: weights of the `order`-th derivative at `z` from
/// values at `nodes`.
fn fornberg_weights(z: f64, nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Central stencil on unit spacing: `(offset, weight)` pairs.
fn central_stencil(derivative: usize, accuracy: usize) -> Vec<(i64, f64)> {
    if derivative == 0 {
        return vec![(0, 1.0)];
    }
    let points = 2 * derivative.div_ceil(2) - 1 + accuracy;
    let half = (points / 2) as i64;
    let offsets: Vec<i64> = (-half..=half).collect();
    let nodes: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    offsets
        .into_iter()
        .zip(fornberg_weights(0.0, &nodes, derivative))
        .filter(|(_, w)| *w != 0.0)
        .collect()
}

fn apply_axis_stencil(
    samples: &[Complex64],
    grid: &Grid,
    axis: usize,
    stencil: &[(i64, f64)],
    scale: f64,
) -> Vec<Complex64> {
    let n = grid.counts()[axis] as i64;
    let stride: usize = grid.counts()[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); samples.len()];
    for (flat, slot) in out.iter_mut().enumerate() {
        let k = ((flat / stride) % n as usize) as i64;
        let base = flat - k as usize * stride;
        let mut acc = Complex64::new(0.0, 0.0);
        for &(offset, w) in stencil {
            let j = (k + offset).rem_euclid(n) as usize;
            acc += samples[base + j * stride] * w;
        }
        *slot = acc * scale;
    }
    out
}

/// Periodic central-difference matrix for `spec` with accuracy order 2 or 4.
pub fn finite_difference(
    spec: &DifferentialOperatorSpec,
    grid: &Grid,
    order: usize,
) -> Result<DenseOperator> {
    if order != 2 && order != 4 {
        return Err(SpectralError::UnsupportedOrder(order));
    }
    if spec.dim() != grid.dim() {
        return Err(SpectralError::ArityMismatch {
            expected: grid.dim(),
            found: spec.dim(),
        });
    }
    check_size(grid)?;
    let n = grid.len();
    let mut matrix = DMatrix::zeros(n, n);
    for (index, coeff) in spec.terms() {
        for col in 0..n {
            let mut column = GridDistribution::unit(grid, col).into_samples();
            for (axis, &m) in index.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                let stencil = central_stencil(m as usize, order);
                let scale = grid.spacing(axis).powi(-(m as i32));
                column = apply_axis_stencil(&column, grid, axis, &stencil, scale);
            }
            for (row, z) in column.into_iter().enumerate() {
                matrix[(row, col)] += coeff * z;
            }
        }
    }
    DenseOperator::new(grid, matrix)
}
