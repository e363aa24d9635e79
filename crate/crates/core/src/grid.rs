//! Uniform lattices standing in for ℝⁿ, complex samples on them, and
//! symbol functions evaluated on lattice points.
//!
//! Every axis `i` covers the half-open box `[-Lᵢ, Lᵢ)` with `Nᵢ` nodes,
//! `xₖ = -Lᵢ + k·Δxᵢ`, `Δxᵢ = 2Lᵢ/Nᵢ`. Points are enumerated row-major with
//! axis 0 varying slowest.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectralError};

/// Relative tolerance (in units of the spacing) used to snap index points to nodes.
const NODE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    counts: Vec<usize>,
    half_extents: Vec<f64>,
}

impl Grid {
    pub fn new(dim: usize, counts: &[usize], half_extents: &[f64]) -> Result<Self> {
        if dim == 0 {
            return Err(SpectralError::InvalidGrid("dimension must be positive".into()));
        }
        if counts.len() != dim || half_extents.len() != dim {
            return Err(SpectralError::InvalidGrid(format!(
                "expected {dim} counts and extents, got {} and {}",
                counts.len(),
                half_extents.len()
            )));
        }
        for (axis, &n) in counts.iter().enumerate() {
            if n < 4 || n % 2 != 0 {
                return Err(SpectralError::InvalidGrid(format!(
                    "axis {axis}: count {n} must be even and at least 4"
                )));
            }
        }
        for (axis, &l) in half_extents.iter().enumerate() {
            if !(l.is_finite() && l > 0.0) {
                return Err(SpectralError::InvalidGrid(format!(
                    "axis {axis}: half extent {l} must be finite and positive"
                )));
            }
        }
        Ok(Self {
            counts: counts.to_vec(),
            half_extents: half_extents.to_vec(),
        })
    }

    /// One-dimensional shorthand.
    pub fn line(count: usize, half_extent: f64) -> Result<Self> {
        Self::new(1, &[count], &[half_extent])
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn half_extents(&self) -> &[f64] {
        &self.half_extents
    }

    /// Total number of nodes, `Π Nᵢ`.
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.half_extents[axis] / self.counts[axis] as f64
    }

    pub fn spacings(&self) -> Vec<f64> {
        (0..self.dim()).map(|axis| self.spacing(axis)).collect()
    }

    /// Cell volume `Π Δxᵢ` used by every quadrature sum over this grid.
    pub fn quadrature_weight(&self) -> f64 {
        (0..self.dim()).map(|axis| self.spacing(axis)).product()
    }

    /// Coordinate of node `k` along `axis`.
    pub fn coordinate(&self, axis: usize, k: usize) -> f64 {
        -self.half_extents[axis] + k as f64 * self.spacing(axis)
    }

    /// Per-axis node coordinates.
    pub fn axis_points(&self, axis: usize) -> Vec<f64> {
        (0..self.counts[axis]).map(|k| self.coordinate(axis, k)).collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.counts[axis];
            flat /= self.counts[axis];
        }
        idx
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.counts)
            .fold(0, |acc, (&k, &n)| acc * n + k)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(axis, &k)| self.coordinate(axis, k))
            .collect()
    }

    /// All nodes in row-major order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Flat index of the node at `point`, rejecting anything that is not a node.
    pub fn locate(&self, point: &[f64]) -> Result<usize> {
        if point.len() != self.dim() {
            return Err(SpectralError::ArityMismatch {
                expected: self.dim(),
                found: point.len(),
            });
        }
        let mut multi = Vec::with_capacity(self.dim());
        for (axis, &p) in point.iter().enumerate() {
            let h = self.spacing(axis);
            let k = ((p + self.half_extents[axis]) / h).round();
            let off = || SpectralError::IndexOffGrid {
                point: point.to_vec(),
            };
            if !k.is_finite() || k < 0.0 || k >= self.counts[axis] as f64 {
                return Err(off());
            }
            let k = k as usize;
            if (self.coordinate(axis, k) - p).abs() > NODE_TOLERANCE * h {
                return Err(off());
            }
            multi.push(k);
        }
        Ok(self.flat_index(&multi))
    }

    /// Frequency lattice matched to this grid: same counts, nodes
    /// `pⱼ = j·π/Lᵢ` for `j ∈ [-Nᵢ/2, Nᵢ/2)`.
    pub fn dual(&self) -> Grid {
        let half_extents = self
            .counts
            .iter()
            .zip(&self.half_extents)
            .map(|(&n, &l)| (n / 2) as f64 * PI / l)
            .collect();
        Grid {
            counts: self.counts.clone(),
            half_extents,
        }
    }

    pub fn ensure_same(&self, other: &Grid, context: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(SpectralError::GridMismatch(format!(
                "{context}: {self} vs {other}"
            )))
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "grid(")?;
        for axis in 0..self.dim() {
            if axis > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{} on ±{}", self.counts[axis], self.half_extents[axis])?;
        }
        write!(f, ")")
    }
}

pub fn make_grid(dim: usize, counts: &[usize], half_extents: &[f64]) -> Result<Grid> {
    Grid::new(dim, counts, half_extents)
}

pub fn dual_grid(grid: &Grid) -> Grid {
    grid.dual()
}

pub fn quadrature_weight(grid: &Grid) -> f64 {
    grid.quadrature_weight()
}

/// Complex samples on a grid; the finite stand-in for a tempered distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDistribution {
    grid: Grid,
    samples: Vec<Complex64>,
}

impl GridDistribution {
    pub fn new(grid: Grid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(SpectralError::GridMismatch(format!(
                "{} samples for {} with {} points",
                samples.len(),
                grid,
                grid.len()
            )));
        }
        if let Some(k) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SpectralError::NonFinite(format!("sample {k}")));
        }
        Ok(Self { grid, samples })
    }

    pub(crate) fn from_parts(grid: Grid, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(grid.len(), samples.len());
        Self { grid, samples }
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid: grid.clone(),
        }
    }

    pub fn from_real(grid: &Grid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid.clone(),
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&[f64]) -> Complex64) -> Result<Self> {
        let samples = (0..grid.len()).map(|k| f(&grid.point(k))).collect();
        Self::new(grid.clone(), samples)
    }

    /// Unit sample (value 1) at node `k`, zero elsewhere.
    pub fn unit(grid: &Grid, k: usize) -> Self {
        let mut out = Self::zeros(grid);
        out.samples[k] = Complex64::new(1.0, 0.0);
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|&z| f(z)).collect(),
        }
    }

    fn zip_with(
        &self,
        other: &Self,
        context: &str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.grid.ensure_same(&other.grid, context)?;
        Ok(Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    pub fn mul_pointwise(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, "pointwise product", |a, b| a * b)
    }

    /// Pointwise product with a symbol sampled on this grid.
    pub fn mul_symbol(&self, symbol: &SymbolFunction) -> Result<Self> {
        let values = symbol.sample(&self.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(values)
                .map(|(&z, a)| z * a)
                .collect(),
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Discrete L² norm `(Σ |u|² Δx)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.samples.iter().map(|z| z.norm_sqr()).sum();
        (sum * self.grid.quadrature_weight()).sqrt()
    }

    /// Bilinear quadrature pairing `Σ u(xₖ) φ(xₖ) Δx`.
    pub fn pairing(&self, test: &Self) -> Result<Complex64> {
        self.grid.ensure_same(&test.grid, "pairing")?;
        let sum: Complex64 = self
            .samples
            .iter()
            .zip(&test.samples)
            .map(|(&a, &b)| a * b)
            .sum();
        Ok(sum * self.grid.quadrature_weight())
    }

    /// `‖self − other‖∞ / ‖other‖∞`, or the absolute error when `other` vanishes.
    pub fn relative_sup_error(&self, reference: &Self) -> Result<f64> {
        let diff = self.sub(reference)?.sup_norm();
        let scale = reference.sup_norm();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }

    /// `‖self − other‖₂ / ‖other‖₂`, or the absolute error when `other` vanishes.
    pub fn relative_l2_error(&self, reference: &Self) -> Result<f64> {
        let diff = self.sub(reference)?.l2_norm();
        let scale = reference.l2_norm();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }
}

type SymbolFn = dyn Fn(&[f64]) -> Complex64 + Send + Sync;

/// A smooth, slowly increasing function on ℝᵐ: eigenvalue systems,
/// multipliers and measure arguments.
#[derive(Clone)]
pub struct SymbolFunction {
    arity: usize,
    descriptor: String,
    eval: Arc<SymbolFn>,
}

impl fmt::Debug for SymbolFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymbolFunction")
            .field("arity", &self.arity)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl SymbolFunction {
    pub fn new(
        arity: usize,
        descriptor: impl Into<String>,
        eval: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            arity,
            descriptor: descriptor.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn real(
        arity: usize,
        descriptor: impl Into<String>,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(arity, descriptor, move |p| Complex64::new(eval(p), 0.0))
    }

    pub fn constant(arity: usize, value: Complex64) -> Self {
        Self::new(arity, format!("{value}"), move |_| value)
    }

    pub fn one(arity: usize) -> Self {
        Self::new(arity, "1", |_| Complex64::new(1.0, 0.0))
    }

    pub fn zero(arity: usize) -> Self {
        Self::new(arity, "0", |_| Complex64::new(0.0, 0.0))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn eval(&self, point: &[f64]) -> Complex64 {
        (self.eval)(point)
    }

    /// Values at every node of `grid`, in row-major order.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<Complex64>> {
        if grid.dim() != self.arity {
            return Err(SpectralError::ArityMismatch {
                expected: self.arity,
                found: grid.dim(),
            });
        }
        let values: Vec<Complex64> = (0..grid.len()).map(|k| self.eval(&grid.point(k))).collect();
        if let Some(k) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(SpectralError::NonFinite(format!(
                "symbol `{}` at {:?}",
                self.descriptor,
                grid.point(k)
            )));
        }
        Ok(values)
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(SpectralError::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Ok(Self::new(
            self.arity,
            format!("({})·({})", self.descriptor, other.descriptor),
            move |p| f(p) * g(p),
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Ok(Self::new(
            self.arity,
            format!("({})+({})", self.descriptor, other.descriptor),
            move |p| f(p) + g(p),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Ok(Self::new(
            self.arity,
            format!("({})-({})", self.descriptor, other.descriptor),
            move |p| f(p) - g(p),
        ))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let f = self.eval.clone();
        Self::new(
            self.arity,
            format!("{factor}·({})", self.descriptor),
            move |p| factor * f(p),
        )
    }

    /// `1/self`; only meaningful where the symbol does not vanish.
    pub fn recip(&self) -> Self {
        let f = self.eval.clone();
        Self::new(self.arity, format!("1/({})", self.descriptor), move |p| {
            f(p).inv()
        })
    }
}
